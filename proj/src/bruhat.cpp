#include "convexa/bruhat.hpp"

#include <algorithm>
#include <cmath>

namespace convexa {

namespace {

const char* cycle_name(const std::array<int, 3>& row) {
  if (row == std::array<int, 3>{0, 1, 2}) return "e";
  if (row == std::array<int, 3>{1, 0, 2}) return "(12)";
  if (row == std::array<int, 3>{2, 1, 0}) return "(13)";
  if (row == std::array<int, 3>{0, 2, 1}) return "(23)";
  if (row == std::array<int, 3>{1, 2, 0}) return "(123)";
  return "(132)";  // {2, 0, 1}
}

std::vector<SignedPerm> cells_by_name(std::initializer_list<const char*> names) {
  std::vector<SignedPerm> out;
  for (const char* n : names) out.push_back(perm_from_name(n));
  return out;
}

}  // namespace

Mat3 SignedPerm::matrix() const {
  Mat3 M = Mat3::Zero();
  for (int c = 0; c < 3; ++c) M(row[c], c) = sign[c];
  return M;
}

int SignedPerm::inversions() const {
  int n = 0;
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      if (row[a] > row[b]) ++n;
  return n;
}

int SignedPerm::sign_code() const {
  return 4 * (sign[0] < 0) + 2 * (sign[1] < 0) + (sign[2] < 0);
}

std::string SignedPerm::name() const {
  return std::string(cycle_name(row)) + ";" + std::to_string(sign_code());
}

SignedPerm SignedPerm::from_matrix(const Mat3& P, double tol) {
  SignedPerm p;
  std::array<bool, 3> taken{false, false, false};
  for (int c = 0; c < 3; ++c) {
    int r = 0;
    for (int rr = 1; rr < 3; ++rr)
      if (std::abs(P(rr, c)) > std::abs(P(r, c))) r = rr;
    const double v = P(r, c);
    if (std::abs(std::abs(v) - 1.0) > tol || taken[r])
      throw Degenerate("not a signed permutation matrix");
    for (int rr = 0; rr < 3; ++rr)
      if (rr != r && std::abs(P(rr, c)) > tol)
        throw Degenerate("not a signed permutation matrix");
    taken[r] = true;
    p.row[c] = r;
    p.sign[c] = v > 0 ? 1 : -1;
  }
  if (p.matrix().determinant() < 0)
    throw Degenerate("signed permutation with det -1");
  return p;
}

const std::vector<SignedPerm>& group() {
  static const std::vector<SignedPerm> all = [] {
    const std::array<std::array<int, 3>, 6> perms = {{
        {0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}}};
    std::vector<SignedPerm> v;
    for (const auto& rw : perms)
      for (int code = 0; code < 8; ++code) {
        SignedPerm p;
        p.row = rw;
        p.sign = {code & 4 ? -1 : 1, code & 2 ? -1 : 1, code & 1 ? -1 : 1};
        if (p.matrix().determinant() > 0.5) v.push_back(p);
      }
    return v;
  }();
  return all;
}

SignedPerm perm_from_name(const std::string& name) {
  for (const SignedPerm& p : group())
    if (p.name() == name) return p;
  throw FormatError("unknown cell name '" + name + "'");
}

NormalForm normal_form(const Mat3& Q, double tol) {
  if (!Q.allFinite() || !(Q.determinant() > 0))
    throw Degenerate("triangular factorization needs det > 0");
  Mat3 A = Q;
  Mat3 U0 = Mat3::Identity();
  Mat3 U1 = Mat3::Identity();
  std::array<bool, 3> used{false, false, false};
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double lo = scale * tol / 10, hi = scale * tol * 10;
  for (int c = 0; c < 3; ++c) {
    int r = -1;
    for (int rr = 2; rr >= 0; --rr) {
      if (used[rr]) continue;
      const double m = std::abs(A(rr, c));
      if (m <= lo) continue;
      if (m < hi)
        throw NearBoundary("pivot candidate of ambiguous magnitude");
      r = rr;
      break;
    }
    if (r < 0) throw Degenerate("no pivot available in column");
    used[r] = true;
    for (int rr = 0; rr < r; ++rr) {
      if (used[rr]) continue;
      const double f = A(rr, c) / A(r, c);
      A.row(rr) -= f * A.row(r);
      A(rr, c) = 0.0;
      U0.col(r) += f * U0.col(rr);
    }
    for (int cc = c + 1; cc < 3; ++cc) {
      const double g = A(r, cc) / A(r, c);
      A.col(cc) -= g * A.col(c);
      A(r, cc) = 0.0;
      U1.row(c) += g * U1.row(cc);
    }
    const double s = std::abs(A(r, c));
    A.row(r) /= s;
    U0.col(r) *= s;
  }
  NormalForm nf;
  nf.perm = SignedPerm::from_matrix(A, 1e-5);
  nf.P = nf.perm.matrix();
  const double rebalance = std::cbrt(1.0 / (U0(0, 0) * U0(1, 1) * U0(2, 2)));
  nf.U0 = rebalance * U0;
  nf.U1 = U1 / rebalance;
  return nf;
}

SignedPerm cell_id(const Mat3& Q, double tol) { return normal_form(Q, tol).perm; }

std::pair<double, double> open_cell_minors(const Mat3& Q) {
  return {Q(2, 0), Q(1, 0) * Q(2, 1) - Q(1, 1) * Q(2, 0)};
}

int open_cell_of(const Mat3& Q) {
  const auto [m1, m2] = open_cell_minors(Q);
  if (m1 == 0 || m2 == 0) return 0;
  if (m1 > 0) return m2 > 0 ? 2 : 1;
  return m2 > 0 ? 4 : 7;
}

bool is_open_convex(const Mat3& Q) {
  const auto [m1, m2] = open_cell_minors(Q);
  return m1 > 0 && m2 > 0;
}

const std::vector<SignedPerm>& convex_cells() {
  static const std::vector<SignedPerm> cells = cells_by_name(
      {"(13);2", "(123);6", "(132);0", "(23);2", "(12);4", "e;0"});
  return cells;
}

const std::vector<SignedPerm>& graftable_cells() {
  static const std::vector<SignedPerm> cells =
      cells_by_name({"(13);1", "(13);4", "(13);7", "(123);3", "(123);5",
                     "(132);5", "(132);6", "e;5"});
  return cells;
}

bool is_convex_matrix(const Mat3& Q, double tol) {
  const SignedPerm p = cell_id(Q, tol);
  const auto& cs = convex_cells();
  return std::find(cs.begin(), cs.end(), p) != cs.end();
}

bool is_graftable(const Mat3& Q, double tol) {
  const SignedPerm p = cell_id(Q, tol);
  const auto& cs = graftable_cells();
  return std::find(cs.begin(), cs.end(), p) != cs.end();
}

GoodArcClass good_arc_membership(const Mat3& Q, double tol) {
  const SignedPerm p = cell_id(Q, tol);
  const auto& g = graftable_cells();
  const bool in_octad = std::find(g.begin(), g.end(), p) != g.end();
  if (in_octad && p.name() != "e;5") return GoodArcClass::A1;
  const auto& cs = convex_cells();
  const bool in_hexad = std::find(cs.begin(), cs.end(), p) != cs.end();
  if (in_hexad && p.name() != "e;0") return GoodArcClass::A2;
  return GoodArcClass::Outside;
}

std::string LiftedSignedPerm::name() const {
  return (sign > 0 ? "+" : "-") + perm.name();
}

const std::vector<LiftedSignedPerm>& lifted_group() {
  static const std::vector<LiftedSignedPerm> all = [] {
    std::vector<LiftedSignedPerm> v;
    for (const SignedPerm& p : group()) {
      const UnitQuaternion q = canonical_lift(p.matrix());
      v.push_back({p, 1, q});
      v.push_back({p, -1, -q});
    }
    return v;
  }();
  return all;
}

LiftedSignedPerm signed_cell(const UnitQuaternion& z, double tol) {
  const Mat3 Q = project(z);
  const NormalForm nf = normal_form(Q, tol);
  const UnitQuaternion canon = canonical_lift(nf.P);
  // Contract the triangular factors to the identity; the resulting path
  // stays inside the coset of Q and ends at the permutation matrix.
  for (int n = 64; n <= 4096; n *= 2) {
    std::vector<Mat3> frames(n + 1);
    for (int m = 0; m <= n; ++m) {
      const double s = double(m) / n;
      const Mat3 V0 = (1 - s) * Mat3::Identity() + s * nf.U0;
      const Mat3 V1 = (1 - s) * Mat3::Identity() + s * nf.U1;
      frames[m] = gram_schmidt(V0.inverse() * Q * V1.inverse());
    }
    std::vector<UnitQuaternion> lifts;
    try {
      lifts = lift_path(frames, z);
    } catch (const BranchAmbiguous&) {
      continue;
    }
    const double d = lifts.back().dot(canon);
    if (std::abs(d) < 0.999)
      throw ProjectionMismatch("coset path did not end at a lift of P");
    const int sign = d > 0 ? 1 : -1;
    return {nf.perm, sign, sign > 0 ? canon : -canon};
  }
  throw NoConvergence("could not lift the coset contraction path");
}

namespace {

const std::vector<LiftedSignedPerm>& convex_spin_cells() {
  static const std::vector<LiftedSignedPerm> cells = [] {
    const double r = 1.0 / std::sqrt(2.0);
    const std::vector<UnitQuaternion> reps = {
        UnitQuaternion(0, r, 0, r),
        UnitQuaternion(-0.5, 0.5, -0.5, 0.5),
        UnitQuaternion(-0.5, 0.5, 0.5, 0.5),
        UnitQuaternion(-r, r, 0, 0),
        UnitQuaternion(-r, 0, 0, r),
        UnitQuaternion(-1, 0, 0, 0)};
    std::vector<LiftedSignedPerm> v;
    for (const auto& q : reps) v.push_back(signed_cell(q));
    return v;
  }();
  return cells;
}

}  // namespace

bool is_convex_quat(const UnitQuaternion& z, double tol) {
  const LiftedSignedPerm c = signed_cell(z, tol);
  const auto& cs = convex_spin_cells();
  return std::find(cs.begin(), cs.end(), c) != cs.end();
}

bool is_stably_convex_quat(const UnitQuaternion& z, double tol) {
  return signed_cell(z, tol) == convex_spin_cells().front();
}

bool is_anticonvex_quat(const UnitQuaternion& z, double tol) {
  return is_convex_quat(-z, tol);
}

bool is_stably_anticonvex_quat(const UnitQuaternion& z, double tol) {
  return is_stably_convex_quat(-z, tol);
}

const GraftCellData& graft_cell_data(int ell) {
  static const auto make = [](int l, double th0, double ph0, double th1,
                              double ph1) {
    GraftCellData d;
    d.ell = l;
    d.theta0 = th0;
    d.phi0 = ph0;
    d.theta1 = th1;
    d.phi1 = ph1;
    d.z0 = exp_im(th0 / 2 * Vec3(0, 0, 1)) * exp_im(ph0 / 2 * Vec3(0, 1, 0));
    d.z1 = exp_im(th1 / 2 * Vec3(0, 0, 1)) * exp_im(ph1 / 2 * Vec3(0, 1, 0)) *
           exp_im(M_PI / 2 * Vec3(1, 0, 0));
    d.Q0 = project(d.z0);
    d.Q1 = project(d.z1);
    return d;
  };
  static const GraftCellData d1 = make(1, 0.0, -M_PI / 3, M_PI, M_PI / 6);
  static const GraftCellData d4 = make(4, 0.0, -M_PI / 6, M_PI, M_PI / 3);
  static const GraftCellData d7 = make(7, 0.0, -M_PI / 4, 0.0, M_PI / 4);
  switch (ell) {
    case 1:
      return d1;
    case 4:
      return d4;
    case 7:
      return d7;
    default:
      throw WrongCell("grafting is defined for cells 1, 4 and 7");
  }
}

Mat3 graft_normalizer(const Mat3& Q0, const Mat3& Q1, int ell, double tol) {
  const GraftCellData& data = graft_cell_data(ell);
  const Mat3 X = Q0.transpose() * Q1;
  const NormalForm nfx = normal_form(X, tol);
  if (nfx.perm.name() != "(13);" + std::to_string(ell))
    throw WrongCell("frame change lies in cell " + nfx.perm.name() +
                    ", expected (13);" + std::to_string(ell));
  const Mat3 Y = data.Q0.transpose() * data.Q1;
  const NormalForm nfy = normal_form(Y, tol);
  Mat3 D = Mat3::Zero();
  for (int d = 0; d < 3; ++d) D(d, d) = nfx.U0(d, d) / nfy.U0(d, d);
  const Mat3 U = nfy.U0 * D * nfx.U0.inverse();
  if ((gram_schmidt(U * X) - Y).cwiseAbs().maxCoeff() > 1e-8)
    throw ProjectionMismatch("normalizer failed to map onto the model frames");
  return U;
}

}  // namespace convexa
