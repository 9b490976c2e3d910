#pragma once

#include <Eigen/Dense>
#include <vector>

#include "convexa/errors.hpp"

namespace convexa {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Purely imaginary quaternion x*i + y*j + z*k stored as (x, y, z).
using ImQuaternion = Vec3;

// Unit quaternion w + x*i + y*j + z*k. The public constructor normalizes, so
// every instance lies on the 3-sphere; `raw` skips that for values already
// known to be unit (library internals and compile-time constants).
struct UnitQuaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  UnitQuaternion() = default;
  UnitQuaternion(double w_, double x_, double y_, double z_);

  static UnitQuaternion raw(double w_, double x_, double y_, double z_) {
    UnitQuaternion q;
    q.w = w_;
    q.x = x_;
    q.y = y_;
    q.z = z_;
    return q;
  }

  Vec3 vec() const { return Vec3(x, y, z); }
  UnitQuaternion conjugate() const { return raw(w, -x, -y, -z); }
  UnitQuaternion operator-() const { return raw(-w, -x, -y, -z); }
  UnitQuaternion operator*(const UnitQuaternion& r) const;
  double dot(const UnitQuaternion& r) const {
    return w * r.w + x * r.x + y * r.y + z * r.z;
  }
  // Applies the rotation this quaternion projects to: q * v * q^-1.
  Vec3 rotate(const Vec3& v) const;
  bool approx(const UnitQuaternion& r, double tol) const {
    return std::abs(w - r.w) <= tol && std::abs(x - r.x) <= tol &&
           std::abs(y - r.y) <= tol && std::abs(z - r.z) <= tol;
  }
};

// exp of the imaginary quaternion v: cos|v| + sin|v| * v/|v|.
UnitQuaternion exp_im(const ImQuaternion& v);

// Principal logarithm (image has norm <= pi). Throws BranchAmbiguous at -1,
// where the direction of the logarithm is undefined.
ImQuaternion log_unit(const UnitQuaternion& q);

// Unit quaternion 0 + v; |v| must be 1 within 1e-9.
UnitQuaternion pure_unit(const Vec3& v);

// Rotation matrix of the conjugation action v -> q v q^-1 on (i, j, k).
Mat3 project(const UnitQuaternion& q);

bool is_rotation(const Mat3& M, double tol = 1e-10);
void require_rotation(const Mat3& M, double tol = 1e-10);

// The lift with the first component of (w, x, y, z) exceeding 1e-9 in
// magnitude made positive. Deterministic choice between the two preimages.
UnitQuaternion canonical_lift(const Mat3& R);

// Continuous lift of a discrete path of rotations, starting from `start`
// (which must project to frames[0]). Throws BranchAmbiguous when successive
// samples are too far apart for the sign choice to be meaningful.
std::vector<UnitQuaternion> lift_path(const std::vector<Mat3>& frames,
                                      const UnitQuaternion& start);

// Distance in S^3 (chord length) from q to the circle
// {cos(t) + sin(t)*axis : t}; axis must be a unit imaginary quaternion.
double dist_to_circle(const UnitQuaternion& q, const ImQuaternion& axis);

// QR factorization M = Q R with Q special orthogonal and R upper triangular
// with positive diagonal. Requires det M > 0; optional out-param for R.
Mat3 gram_schmidt(const Mat3& M, Mat3* R_out = nullptr);

namespace quat {
// 1, i, j, k and the auxiliary constants used throughout:
//   khat = (i + k)/sqrt(2), ihat = (i - k)/sqrt(2), h = exp(pi/8 * j).
extern const UnitQuaternion one, i, j, k, h;
extern const ImQuaternion khat, ihat;
}  // namespace quat

}  // namespace convexa
