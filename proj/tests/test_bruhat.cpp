#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "convexa/bruhat.hpp"
#include "support.hpp"

using namespace convexa;
using testsupport::random_rotation;
using testsupport::random_unit_quaternion;
using testsupport::random_upper;

TEST_SUITE("bruhat") {
  TEST_CASE("the signed permutation group has 24 named elements") {
    const auto& g = group();
    CHECK(g.size() == 24);
    std::set<std::string> names;
    for (const auto& p : g) {
      CHECK(p.matrix().determinant() == doctest::Approx(1.0));
      CHECK(is_rotation(p.matrix(), 1e-15));
      names.insert(p.name());
      CHECK(perm_from_name(p.name()) == p);
      CHECK(SignedPerm::from_matrix(p.matrix()) == p);
    }
    CHECK(names.size() == 24);
    CHECK_THROWS_AS(perm_from_name("(31);9"), FormatError);
  }

  TEST_CASE("displayed antidiagonal representatives") {
    Mat3 P1, P2;
    P1 << 0, 0, -1, 0, 1, 0, 1, 0, 0;
    P2 << 0, 0, 1, 0, -1, 0, 1, 0, 0;
    CHECK(perm_from_name("(13);1").matrix() == P1);
    CHECK(perm_from_name("(13);2").matrix() == P2);
    CHECK(perm_from_name("(13);1").dimension() == 3);
    CHECK(perm_from_name("e;0").matrix() == Mat3::Identity());
    CHECK(perm_from_name("e;0").dimension() == 0);
    CHECK(perm_from_name("(12);4").dimension() == 1);
    CHECK(perm_from_name("(123);5").dimension() == 2);
  }

  TEST_CASE("normal form recovers the cell of a synthetic factorization") {
    auto g = testsupport::rng(21);
    for (int it = 0; it < 2000; ++it) {
      const SignedPerm& p = group()[size_t(it) % group().size()];
      const Mat3 U0 = random_upper(g), U1 = random_upper(g);
      const Mat3 Q = U0 * p.matrix() * U1;
      const NormalForm nf = normal_form(Q);
      CHECK(nf.perm == p);
      CHECK((nf.U0 * nf.P * nf.U1 - Q).cwiseAbs().maxCoeff() <
            1e-9 * (1 + Q.cwiseAbs().maxCoeff()));
      CHECK(nf.U0(1, 0) == 0.0);
      CHECK(nf.U0(2, 0) == 0.0);
      CHECK(nf.U0(2, 1) == 0.0);
      CHECK(nf.U0(0, 0) > 0);
      CHECK(nf.U1(0, 0) > 0);
      CHECK(nf.U0.determinant() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(nf.U1.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("normal form flags undecidable pivots") {
    Mat3 M = Mat3::Identity();
    M(2, 0) = 3e-9;  // inside the ambiguity band for tol = 1e-9
    CHECK_THROWS_AS(normal_form(M, 1e-9), NearBoundary);
    M(2, 0) = 3e-7;  // decidably nonzero: corner minors are (+, -)
    CHECK(normal_form(M, 1e-9).perm.name() == "(13);1");
    CHECK(open_cell_of(M) == 1);
  }

  TEST_CASE("small rotations about coordinate axes land in low cells") {
    const Mat3 Rz = project(exp_im(0.15 * Vec3(0, 0, 1)));
    CHECK(cell_id(Rz).name() == "(12);2");
    CHECK(cell_id(Mat3(Mat3::Identity())).name() == "e;0");
  }

  TEST_CASE("open cells are classified by the two corner minors") {
    auto g = testsupport::rng(22);
    for (int ell : {1, 2, 4, 7}) {
      const std::string want = "(13);" + std::to_string(ell);
      CHECK(open_cell_of(perm_from_name(want).matrix()) == ell);
    }
    for (int it = 0; it < 2000; ++it) {
      const Mat3 Q = random_rotation(g);
      const int ell = open_cell_of(Q);
      if (ell == 0) continue;  // measure-zero boundary
      CHECK(cell_id(Q).name() == "(13);" + std::to_string(ell));
      CHECK(is_open_convex(Q) == (ell == 2));
    }
  }

  TEST_CASE("convex and graftable cell tables") {
    CHECK(convex_cells().size() == 6);
    CHECK(graftable_cells().size() == 8);
    for (const auto& p : convex_cells()) CHECK(is_convex_matrix(p.matrix()));
    for (const auto& p : graftable_cells()) CHECK(is_graftable(p.matrix()));
    CHECK(!is_convex_matrix(perm_from_name("(13);1").matrix()));
    CHECK(!is_graftable(perm_from_name("(13);2").matrix()));
  }

  TEST_CASE("step acceptance classes") {
    CHECK(good_arc_membership(perm_from_name("(13);1").matrix()) ==
          GoodArcClass::A1);
    CHECK(good_arc_membership(perm_from_name("(123);5").matrix()) ==
          GoodArcClass::A1);
    CHECK(good_arc_membership(perm_from_name("(13);2").matrix()) ==
          GoodArcClass::A2);
    CHECK(good_arc_membership(perm_from_name("(23);2").matrix()) ==
          GoodArcClass::A2);
    CHECK(good_arc_membership(perm_from_name("e;5").matrix()) ==
          GoodArcClass::Outside);
    CHECK(good_arc_membership(Mat3(Mat3::Identity())) ==
          GoodArcClass::Outside);
  }

  TEST_CASE("spin cells fix the 48 lifted elements") {
    const auto& lg = lifted_group();
    CHECK(lg.size() == 48);
    std::set<std::string> names;
    for (const auto& e : lg) {
      names.insert(e.name());
      const LiftedSignedPerm back = signed_cell(e.lift);
      CHECK(back == e);
      CHECK(back.lift.approx(e.lift, 1e-12));
    }
    CHECK(names.size() == 48);
  }

  TEST_CASE("spin cell is constant along triangular orbits") {
    auto g = testsupport::rng(23);
    for (int it = 0; it < 30; ++it) {
      const UnitQuaternion z = random_unit_quaternion(g);
      const LiftedSignedPerm c = signed_cell(z);
      // Move z inside its coset and check the spin cell is unchanged:
      // the projected frame moves by Gram-Schmidt of U * Q, the lift follows
      // the unique continuous path, here sampled densely.
      const Mat3 U = random_upper(g);
      const Mat3 Q = project(z);
      std::vector<Mat3> frames;
      for (int m = 0; m <= 128; ++m) {
        const double s = m / 128.0;
        frames.push_back(
            gram_schmidt(((1 - s) * Mat3::Identity() + s * U) * Q));
      }
      const auto lifts = lift_path(frames, z);
      CHECK(signed_cell(lifts.back()) == c);
    }
  }

  TEST_CASE("convexity of quaternions matches the six listed elements") {
    const double r = 1.0 / std::sqrt(2.0);
    const UnitQuaternion hexad[6] = {
        UnitQuaternion(0, r, 0, r),      UnitQuaternion(-0.5, 0.5, -0.5, 0.5),
        UnitQuaternion(-0.5, 0.5, 0.5, 0.5), UnitQuaternion(-r, r, 0, 0),
        UnitQuaternion(-r, 0, 0, r),     UnitQuaternion(-1, 0, 0, 0)};
    const char* names[6] = {"(13);2", "(123);6", "(132);0",
                            "(23);2", "(12);4",  "e;0"};
    for (int i = 0; i < 6; ++i) {
      CHECK(signed_cell(hexad[i]).perm.name() == names[i]);
      CHECK(is_convex_quat(hexad[i]));
      CHECK(is_anticonvex_quat(-hexad[i]));
      CHECK(!is_convex_quat(-hexad[i]));
      CHECK(is_stably_convex_quat(hexad[i]) == (i == 0));
    }
    CHECK(!is_convex_quat(quat::one));
    CHECK(!is_convex_quat(quat::i));
    CHECK(!is_convex_quat(-quat::i));
    CHECK(is_convex_quat(-quat::one));
  }

  TEST_CASE("points of the open circle arc are stably convex") {
    for (double psi : {0.2, 1.5, 3.0}) {
      CHECK(is_stably_convex_quat(exp_im(psi * quat::khat)));
      CHECK(is_stably_anticonvex_quat(exp_im((psi + M_PI) * quat::khat)));
    }
    CHECK(!is_stably_convex_quat(-quat::one));
  }

  TEST_CASE("graft model frames sit in their cells") {
    for (int ell : {1, 4, 7}) {
      const GraftCellData& d = graft_cell_data(ell);
      CHECK(d.phi0 < 0);
      CHECK(d.phi1 > 0);
      CHECK(std::abs(d.phi0) < M_PI / 2);
      CHECK(std::abs(d.phi1) < M_PI / 2);
      const Mat3 X = d.Q0.transpose() * d.Q1;
      CHECK(cell_id(X).name() == "(13);" + std::to_string(ell));
      CHECK(is_graftable(X));
      CHECK((project(d.z0) - d.Q0).cwiseAbs().maxCoeff() < 1e-14);
      CHECK((project(d.z1) - d.Q1).cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK_THROWS_AS(graft_cell_data(2), WrongCell);
  }

  TEST_CASE("graft normalizer maps onto the model frames") {
    auto g = testsupport::rng(24);
    int done = 0;
    while (done < 60) {
      const Mat3 Q0 = random_rotation(g);
      const Mat3 X = random_rotation(g);
      const int ell = open_cell_of(X);
      if (ell != 1 && ell != 4 && ell != 7) continue;
      const Mat3 Q1 = Q0 * X;
      const Mat3 U = graft_normalizer(Q0, Q1, ell);
      for (int d = 0; d < 3; ++d)
        CHECK(U(d, d) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(U(1, 0) == 0.0);
      CHECK(U(2, 0) == 0.0);
      CHECK(U(2, 1) == 0.0);
      const GraftCellData& data = graft_cell_data(ell);
      const Mat3 model = data.Q0.transpose() * data.Q1;
      CHECK((gram_schmidt(U * X) - model).cwiseAbs().maxCoeff() < 1e-8);
      // Wrong target cell must be rejected.
      const int other = ell == 1 ? 4 : 1;
      CHECK_THROWS_AS(graft_normalizer(Q0, Q1, other), WrongCell);
      ++done;
    }
  }
}
