#include "convexa/rotations.hpp"

#include <cmath>

namespace convexa {

UnitQuaternion::UnitQuaternion(double w_, double x_, double y_, double z_) {
  const double n = std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
  if (!(n > 1e-12) || !std::isfinite(n))
    throw Degenerate("quaternion with vanishing norm");
  w = w_ / n;
  x = x_ / n;
  y = y_ / n;
  z = z_ / n;
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& r) const {
  return raw(w * r.w - x * r.x - y * r.y - z * r.z,
             w * r.x + x * r.w + y * r.z - z * r.y,
             w * r.y - x * r.z + y * r.w + z * r.x,
             w * r.z + x * r.y - y * r.x + z * r.w);
}

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
  // q v q^-1 expanded: v + 2 w (u x v) + 2 u x (u x v) with u = (x, y, z).
  const Vec3 u(x, y, z);
  const Vec3 t = 2.0 * u.cross(v);
  return v + w * t + u.cross(t);
}

UnitQuaternion exp_im(const ImQuaternion& v) {
  const double theta = v.norm();
  double s;  // sin(theta)/theta
  if (theta < 1e-4) {
    const double t2 = theta * theta;
    s = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  } else {
    s = std::sin(theta) / theta;
  }
  return UnitQuaternion(std::cos(theta), s * v.x(), s * v.y(), s * v.z());
}

ImQuaternion log_unit(const UnitQuaternion& q) {
  const double s = q.vec().norm();
  if (s < 1e-12) {
    if (q.w > 0) return ImQuaternion::Zero();
    throw BranchAmbiguous("logarithm at -1 has no preferred direction");
  }
  const double angle = std::atan2(s, q.w);
  return (angle / s) * q.vec();
}

UnitQuaternion pure_unit(const Vec3& v) {
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw Degenerate("pure_unit needs a unit vector");
  return UnitQuaternion::raw(0.0, v.x(), v.y(), v.z());
}

Mat3 project(const UnitQuaternion& q) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Mat3 R;
  R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return R;
}

bool is_rotation(const Mat3& M, double tol) {
  if (!M.allFinite()) return false;
  if ((M.transpose() * M - Mat3::Identity()).cwiseAbs().maxCoeff() > tol)
    return false;
  return std::abs(M.determinant() - 1.0) <= 10 * tol;
}

void require_rotation(const Mat3& M, double tol) {
  if (!is_rotation(M, tol))
    throw NotARotation("matrix is not special orthogonal within tolerance");
}

UnitQuaternion canonical_lift(const Mat3& R) {
  require_rotation(R, 1e-8);
  const double t = R.trace();
  double w, x, y, z;
  // Shepperd's method: branch on the largest of trace and diagonal entries
  // so the divisor is always well away from zero.
  if (t >= R(0, 0) && t >= R(1, 1) && t >= R(2, 2)) {
    const double r = std::sqrt(1.0 + t);
    w = 0.5 * r;
    x = (R(2, 1) - R(1, 2)) / (2 * r);
    y = (R(0, 2) - R(2, 0)) / (2 * r);
    z = (R(1, 0) - R(0, 1)) / (2 * r);
  } else if (R(0, 0) >= R(1, 1) && R(0, 0) >= R(2, 2)) {
    const double r = std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2));
    x = 0.5 * r;
    w = (R(2, 1) - R(1, 2)) / (2 * r);
    y = (R(0, 1) + R(1, 0)) / (2 * r);
    z = (R(0, 2) + R(2, 0)) / (2 * r);
  } else if (R(1, 1) >= R(2, 2)) {
    const double r = std::sqrt(1.0 - R(0, 0) + R(1, 1) - R(2, 2));
    y = 0.5 * r;
    w = (R(0, 2) - R(2, 0)) / (2 * r);
    x = (R(0, 1) + R(1, 0)) / (2 * r);
    z = (R(1, 2) + R(2, 1)) / (2 * r);
  } else {
    const double r = std::sqrt(1.0 - R(0, 0) - R(1, 1) + R(2, 2));
    z = 0.5 * r;
    w = (R(1, 0) - R(0, 1)) / (2 * r);
    x = (R(0, 2) + R(2, 0)) / (2 * r);
    y = (R(1, 2) + R(2, 1)) / (2 * r);
  }
  UnitQuaternion q(w, x, y, z);
  const double c[4] = {q.w, q.x, q.y, q.z};
  for (double v : c) {
    if (std::abs(v) > 1e-9) {
      if (v < 0) q = -q;
      break;
    }
  }
  return q;
}

std::vector<UnitQuaternion> lift_path(const std::vector<Mat3>& frames,
                                      const UnitQuaternion& start) {
  if (frames.empty()) throw Degenerate("empty frame path");
  if ((project(start) - frames.front()).cwiseAbs().maxCoeff() > 1e-8)
    throw ProjectionMismatch("start quaternion does not lift frames[0]");
  std::vector<UnitQuaternion> lifts;
  lifts.reserve(frames.size());
  lifts.push_back(start);
  for (size_t i = 1; i < frames.size(); ++i) {
    UnitQuaternion q = canonical_lift(frames[i]);
    const double d = q.dot(lifts.back());
    if (std::abs(d) < 0.1)
      throw BranchAmbiguous("frame samples too far apart for continuous lift");
    if (d < 0) q = -q;
    lifts.push_back(q);
  }
  return lifts;
}

double dist_to_circle(const UnitQuaternion& q, const ImQuaternion& axis) {
  if (std::abs(axis.norm() - 1.0) > 1e-9)
    throw Degenerate("circle axis must be a unit imaginary quaternion");
  // sqrt(2 - 2 r) cancels catastrophically near the circle; rewriting via the
  // off-plane component 1 - r^2 = |perp|^2 keeps absolute accuracy ~ eps.
  const double c = q.vec().dot(axis);
  const ImQuaternion perp = q.vec() - c * axis;
  const double r = std::min(1.0, std::hypot(q.w, c));
  return perp.norm() * std::sqrt(2.0 / (1.0 + r));
}

Mat3 gram_schmidt(const Mat3& M, Mat3* R_out) {
  if (!(M.determinant() > 0) || !M.allFinite())
    throw Degenerate("QR with positive pivots needs det > 0");
  Mat3 Q = Mat3::Zero();
  Mat3 R = Mat3::Zero();
  for (int c = 0; c < 3; ++c) {
    // Two projection passes keep Q orthogonal to machine precision even for
    // badly conditioned inputs (classical Gram-Schmidt alone loses
    // orthogonality proportionally to the squared condition number).
    Vec3 u = M.col(c);
    for (int pass = 0; pass < 2; ++pass) {
      for (int p = 0; p < c; ++p) {
        const double r = Q.col(p).dot(u);
        R(p, c) += r;
        u -= r * Q.col(p);
      }
    }
    R(c, c) = u.norm();
    if (!(R(c, c) > 1e-13 * (1.0 + M.norm())))
      throw Degenerate("columns nearly dependent in QR");
    Q.col(c) = u / R(c, c);
  }
  if (R_out) *R_out = R;
  return Q;
}

namespace quat {
const UnitQuaternion one = UnitQuaternion::raw(1, 0, 0, 0);
const UnitQuaternion i = UnitQuaternion::raw(0, 1, 0, 0);
const UnitQuaternion j = UnitQuaternion::raw(0, 0, 1, 0);
const UnitQuaternion k = UnitQuaternion::raw(0, 0, 0, 1);
const UnitQuaternion h =
    UnitQuaternion::raw(std::cos(M_PI / 8), 0, std::sin(M_PI / 8), 0);
const ImQuaternion khat = ImQuaternion(1, 0, 1) / std::sqrt(2.0);
const ImQuaternion ihat = ImQuaternion(1, 0, -1) / std::sqrt(2.0);
}  // namespace quat

}  // namespace convexa
