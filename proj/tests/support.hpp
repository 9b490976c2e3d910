#pragma once

#include <cmath>
#include <random>

#include "convexa/bruhat.hpp"
#include "convexa/rotations.hpp"

namespace testsupport {

using convexa::Mat3;
using convexa::UnitQuaternion;
using convexa::Vec3;

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline UnitQuaternion random_unit_quaternion(std::mt19937_64& g) {
  std::normal_distribution<double> n(0.0, 1.0);
  return UnitQuaternion(n(g), n(g), n(g), n(g));
}

inline Mat3 random_rotation(std::mt19937_64& g) {
  return convexa::project(random_unit_quaternion(g));
}

// Upper triangular, positive diagonal, det 1.
inline Mat3 random_upper(std::mt19937_64& g) {
  std::uniform_real_distribution<double> diag(0.2, 2.0), off(-2.0, 2.0);
  Mat3 U = Mat3::Identity();
  U(0, 0) = diag(g);
  U(1, 1) = diag(g);
  U(2, 2) = diag(g);
  U(0, 1) = off(g);
  U(0, 2) = off(g);
  U(1, 2) = off(g);
  return U / std::cbrt(U.determinant());
}

// Random element of SL3 close to the identity.
inline Mat3 random_sl3_near_identity(std::mt19937_64& g, double spread = 0.3) {
  std::uniform_real_distribution<double> off(-spread, spread);
  Mat3 A;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) A(r, c) = (r == c ? 1.0 : 0.0) + off(g);
  return A / std::cbrt(A.determinant());
}

}  // namespace testsupport
