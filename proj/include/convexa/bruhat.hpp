#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "convexa/rotations.hpp"

namespace convexa {

// Element of the 24-element group of orientation-preserving signed
// permutation matrices. Column c carries sign[c] in row row[c]. Names follow
// the cycle of the underlying permutation plus the column signs read as
// binary with minus = 1 (MSB = column 0), e.g. "(13);2" for the matrix with
// columns +e3, -e2, +e1.
struct SignedPerm {
  std::array<int, 3> row{0, 1, 2};
  std::array<int, 3> sign{1, 1, 1};

  Mat3 matrix() const;
  int inversions() const;
  int dimension() const { return inversions(); }
  int sign_code() const;
  std::string name() const;
  bool operator==(const SignedPerm&) const = default;

  // Validates that P is a signed permutation matrix with det +1 within tol.
  static SignedPerm from_matrix(const Mat3& P, double tol = 1e-9);
};

// All 24 elements, in a fixed order (permutation major, sign code minor).
const std::vector<SignedPerm>& group();

// Lookup by name, e.g. "(123);5". Throws FormatError for unknown names.
SignedPerm perm_from_name(const std::string& name);

// Triangular factorization Q = U0 * P * U1 with U0, U1 upper triangular with
// positive diagonal and P a signed permutation matrix; P identifies the
// double coset of Q under the upper triangular group. U0 is normalized to
// det 1; then det U1 = det Q (so both factors have det 1 for det-1 input).
struct NormalForm {
  SignedPerm perm;
  Mat3 P;
  Mat3 U0, U1;
};

// Entries whose zero/nonzero status is decided during pivoting must stay out
// of the band (tol/10, 10*tol) in magnitude, otherwise NearBoundary is
// thrown: the coset is not decidable at this tolerance.
NormalForm normal_form(const Mat3& Q, double tol = 1e-9);

SignedPerm cell_id(const Mat3& Q, double tol = 1e-9);

// Corner minors that classify the four open (3-dimensional) cosets:
// first = Q(2,0), second = Q(1,0)*Q(2,1) - Q(1,1)*Q(2,0).
std::pair<double, double> open_cell_minors(const Mat3& Q);

// Sign code (1, 2, 4 or 7) of the open coset by the signs of the two corner
// minors, or 0 when either minor vanishes (Q lies in a lower cell).
int open_cell_of(const Mat3& Q);

// Open coset of frame changes along short convex arcs: both minors positive.
bool is_open_convex(const Mat3& Q);

// Membership in the six cells realized by frame changes of convex arcs
// (resp. the eight cells where latitude-circle grafting is possible).
bool is_convex_matrix(const Mat3& Q, double tol = 1e-9);
bool is_graftable(const Mat3& Q, double tol = 1e-9);

const std::vector<SignedPerm>& convex_cells();     // 6 cells
const std::vector<SignedPerm>& graftable_cells();  // 8 cells

// Step-acceptance classes for the convexity marching test: A1 is the set of
// frame changes allowed across a step interior, A2 additionally allows the
// closed convex cells (valid when the left endpoint is the base point).
enum class GoodArcClass { A1, A2, Outside };
GoodArcClass good_arc_membership(const Mat3& Q, double tol = 1e-9);

// One of the 48 spin cells: a coset cell together with the choice among the
// two lifts of its permutation matrix.
struct LiftedSignedPerm {
  SignedPerm perm;
  int sign = 1;          // +1 when lift == canonical_lift(perm.matrix())
  UnitQuaternion lift;   // sign * canonical_lift(perm.matrix())
  std::string name() const;
  bool operator==(const LiftedSignedPerm& o) const {
    return perm == o.perm && sign == o.sign;
  }
};

// All 48 spin cells, group() order with + before -.
const std::vector<LiftedSignedPerm>& lifted_group();

// Spin cell of z: contracts the triangular factors of project(z) to the
// identity, which moves project(z) to its permutation matrix inside its
// coset, and transports the lift along that path.
LiftedSignedPerm signed_cell(const UnitQuaternion& z, double tol = 1e-9);

// z is convex when some arc with everywhere-positive frame minors realizes z
// as its lifted frame change; this holds exactly on six spin cells. The
// stable case is the single open spin cell of (i+k)/sqrt(2). Anticonvex
// means -z is convex.
bool is_convex_quat(const UnitQuaternion& z, double tol = 1e-9);
bool is_stably_convex_quat(const UnitQuaternion& z, double tol = 1e-9);
bool is_anticonvex_quat(const UnitQuaternion& z, double tol = 1e-9);
bool is_stably_anticonvex_quat(const UnitQuaternion& z, double tol = 1e-9);

// Model endpoint frames for grafting in the open cell with sign code ell
// (1, 4 or 7): z0 = exp(theta0 k/2) exp(phi0 j/2) is tangent to a latitude
// circle, z1 = exp(theta1 k/2) exp(phi1 j/2) exp(pi i/2) likewise after a
// quarter turn, with -pi/2 < phi0 < 0 < phi1 < pi/2.
struct GraftCellData {
  int ell;
  double theta0, phi0, theta1, phi1;
  UnitQuaternion z0, z1;
  Mat3 Q0, Q1;
};
const GraftCellData& graft_cell_data(int ell);

// The unique unipotent upper triangular U such that Gram-Schmidt of
// U * (Q0^-1 Q1) equals the model frame change of cell ell. Throws WrongCell
// when Q0^-1 Q1 does not lie in the open cell ell.
Mat3 graft_normalizer(const Mat3& Q0, const Mat3& Q1, int ell,
                      double tol = 1e-9);

}  // namespace convexa
