#include <doctest.h>

#include <cmath>

#include "convexa/convexity.hpp"
#include "convexa/errors.hpp"
#include "support.hpp"

using namespace convexa;

namespace {

// Based curve winding k times around the circle through e1 and e3 tangent to
// e2, with constant speed and curvature density k pi sqrt(2).
FramedCurve winding_circle(int k, int cells = 0) {
  const double rate = k * M_PI * std::sqrt(2.0);
  const int n = cells > 0 ? cells : 32 * k;
  std::vector<double> grid(n + 1);
  for (int i = 0; i <= n; ++i) grid[i] = double(i) / n;
  return integrate_profile(grid, std::vector<double>(n, rate),
                           std::vector<double>(n, rate), quat::one);
}

// Closed round circle of spherical radius rho, traversed once.
FramedCurve small_circle(double rho, int cells = 64) {
  std::vector<double> grid(cells + 1);
  for (int i = 0; i <= cells; ++i) grid[i] = double(i) / cells;
  const double v = 2.0 * M_PI * std::sin(rho), vh = 2.0 * M_PI * std::cos(rho);
  return integrate_profile(grid, std::vector<double>(cells, v),
                           std::vector<double>(cells, vh), quat::one);
}

Mat3 small_shear() {
  Mat3 A = Mat3::Identity();
  A(0, 2) = 0.12;
  A(0, 1) = -0.05;
  A(1, 2) = 0.07;
  return A;
}

// Locally convex with an asymmetric curvature profile and total curvature
// around six half-turns: too much to stay convex, no symmetry to close up,
// so steps exit through a wall.
FramedCurve wobble_curve() {
  const int n = 96;
  const double rate = 3.0 * M_PI * std::sqrt(2.0);
  std::vector<double> grid(n + 1), v(n), vhat(n);
  for (int i = 0; i <= n; ++i) grid[i] = double(i) / n;
  for (int i = 0; i < n; ++i) {
    const double tm = (i + 0.5) / n;
    v[i] = rate * (1.0 + 0.15 * std::sin(2.0 * M_PI * tm + 0.7));
    vhat[i] = rate * (1.0 + 0.15 * std::cos(2.0 * M_PI * tm));
  }
  return integrate_profile(grid, v, vhat, quat::one);
}

}  // namespace

TEST_SUITE("convexity") {
  TEST_CASE("steps of the once- and twice-wound circles close up") {
    const FramedCurve nu1 = winding_circle(1);
    const FramedCurve nu2 = winding_circle(2);

    const StepReport r1 = next_step(nu1, 0.0);
    CHECK(r1.kind == StepKind::Bad);
    CHECK(r1.t1 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r1.boundary_cell->name() == "e;0");
    CHECK(r1.dist_to_identity < 1e-6);

    const StepReport r2 = next_step(nu2, 0.0);
    CHECK(r2.kind == StepKind::Bad);
    CHECK(r2.t1 == doctest::Approx(0.5).epsilon(1e-8));

    const StepReport r3 = next_step(nu2, 0.25);
    CHECK(r3.kind == StepKind::Bad);
    CHECK(r3.t1 == doctest::Approx(0.75).epsilon(1e-8));

    // From any interior start the single circle never leaves the open coset.
    const StepReport r4 = next_step(nu1, 0.25);
    CHECK(r4.kind == StepKind::Unbounded);
    CHECK(std::isinf(r4.t1));
    CHECK(!r4.boundary_cell.has_value());
  }

  TEST_CASE("step preconditions") {
    const FramedCurve nu1 = winding_circle(1);
    CHECK_THROWS_AS(next_step(nu1, 1.0), Degenerate);
    CHECK_THROWS_AS(next_step(nu1, -0.5), Degenerate);

    std::vector<double> grid(9), v(8, 4.0), vhat(8, 4.0);
    for (int i = 0; i <= 8; ++i) grid[i] = double(i) / 8;
    vhat[1] = -1.0;
    const FramedCurve mixed = integrate_profile(grid, v, vhat, quat::one);
    CHECK_THROWS_AS(next_step(mixed, 0.0), NotLocallyConvex);
    CHECK_NOTHROW(next_step(mixed, 0.5));
  }

  TEST_CASE("the projective action preserves double-circle closing steps") {
    // Frames half a period apart are equal, and Gram-Schmidt of A F keeps
    // them equal: a transformed double circle still closes at the half turn.
    const FramedCurve c = transform(small_shear(), winding_circle(2), 1e-10);
    const StepReport r = next_step(c, 0.0);
    CHECK(r.kind == StepKind::Bad);
    CHECK(r.t1 == doctest::Approx(0.5).epsilon(1e-8));
    const MulticonvexReport rep = multiconvex_multiplicity(c);
    REQUIRE(rep.multiplicity.has_value());
    CHECK(*rep.multiplicity == 2);
    const MkResult m = mk_coordinates(rebase(c), 2);
    CHECK(std::abs(m.coords[0]) < 1e-8);
    CHECK(std::abs(m.coords[1]) < 1e-8);
  }

  TEST_CASE("an asymmetric profile takes a good step and is complicated") {
    const FramedCurve c = wobble_curve();
    const StepReport r = next_step(c, 0.0);
    REQUIRE(r.kind == StepKind::Good);
    const std::string cell = r.boundary_cell->name();
    const bool known = cell == "(123);6" || cell == "(132);0" ||
                       cell == "(23);2" || cell == "(12);4";
    CHECK(known);
    CHECK(r.dist_to_identity > 1e-3);

    const MulticonvexReport rep = multiconvex_multiplicity(c);
    CHECK(rep.complicated());
    CHECK(!rep.multiplicity.has_value());
  }

  TEST_CASE("exit times increase and invert on a complicated curve") {
    const FramedCurve c = wobble_curve();
    double prev = 0.0;
    for (double t0 : {0.0, 0.04, 0.08, 0.12, 0.16}) {
      const StepReport r = next_step(c, t0);
      REQUIRE(r.kind == StepKind::Good);
      if (t0 > 0.0) CHECK(r.t1 > prev);
      prev = r.t1;
      const double back = next_step_inverse(c, r.t1);
      CHECK(back == doctest::Approx(t0).epsilon(1e-8));
    }
    CHECK_THROWS_AS(next_step_inverse(c, 1e-6), Degenerate);
  }

  TEST_CASE("convex and stably convex arcs of the winding circles") {
    const FramedCurve nu1 = winding_circle(1);
    const FramedCurve nu2 = winding_circle(2);
    CHECK(is_convex_arc(nu1, 0.0, 1.0));
    CHECK(!is_stably_convex_arc(nu1, 0.0, 1.0));
    CHECK(is_convex_arc(nu1, 0.0, 0.75));
    CHECK(is_stably_convex_arc(nu1, 0.0, 0.75));
    CHECK(!is_convex_arc(nu2, 0.0, 0.75));
    CHECK(is_convex_arc(nu2, 0.0, 0.5));
    CHECK(!is_stably_convex_arc(nu2, 0.0, 0.5));
    CHECK_THROWS_AS(is_convex_arc(nu1, 0.5, 0.5), Degenerate);
  }

  TEST_CASE("arcs of total curvature below a half turn are convex") {
    const FramedCurve c = transform(small_shear(), winding_circle(2), 1e-10);
    auto g = testsupport::rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int it = 0; it < 12; ++it) {
      const double a = 0.9 * U(g);
      double b = std::min(a + 0.02 + 0.03 * U(g), 1.0);
      const FramedCurve piece = subcurve(c, a, b);
      if (total_curvature(piece) < M_PI - 1e-6) CHECK(is_convex_arc(c, a, b));
    }
  }

  TEST_CASE("winding circles are multiconvex with their winding multiplicity") {
    for (int k = 1; k <= 5; ++k) {
      const FramedCurve nuk = winding_circle(k);
      const MulticonvexReport rep = multiconvex_multiplicity(nuk);
      REQUIRE(rep.multiplicity.has_value());
      CHECK(*rep.multiplicity == k);
      REQUIRE(int(rep.breakpoints.size()) == k + 1);
      for (int j = 0; j <= k; ++j)
        CHECK(rep.breakpoints[j] ==
              doctest::Approx(double(j) / k).epsilon(1e-7));
      const double tot = total_curvature(nuk);
      CHECK(2.0 * (k - 1) * M_PI < tot);
      CHECK(tot < 4.0 * k * M_PI);
    }
  }

  TEST_CASE("round and distorted circles are multiconvex of multiplicity one") {
    const MulticonvexReport small =
        multiconvex_multiplicity(small_circle(M_PI / 6));
    REQUIRE(small.multiplicity.has_value());
    CHECK(*small.multiplicity == 1);

    auto g = testsupport::rng(21);
    for (int it = 0; it < 6; ++it) {
      const Mat3 A = testsupport::random_sl3_near_identity(g);
      const FramedCurve c = transform(A, winding_circle(1), 1e-10);
      const double tot = total_curvature(c);
      CHECK(tot >= 2.0 * M_PI - 1e-9);
      CHECK(tot < 4.0 * M_PI);
      const MulticonvexReport rep = multiconvex_multiplicity(c);
      REQUIRE(rep.multiplicity.has_value());
      CHECK(*rep.multiplicity == 1);
    }
  }

  TEST_CASE("crossing coordinates vanish on the winding circles") {
    const MkResult m2 = mk_coordinates(winding_circle(2), 2);
    REQUIRE(int(m2.coords.size()) == 2);
    CHECK(std::abs(m2.coords[0]) < 1e-8);
    CHECK(std::abs(m2.coords[1]) < 1e-8);
    REQUIRE(int(m2.times.size()) == 4);
    for (int j = 0; j < 4; ++j)
      CHECK(m2.times[j] == doctest::Approx(0.25 * j).epsilon(1e-9));

    const MkResult m3 = mk_coordinates(winding_circle(3), 3);
    REQUIRE(int(m3.coords.size()) == 4);
    for (double x : m3.coords) CHECK(std::abs(x) < 1e-8);

    // A single winding has no transverse coordinates but still validates.
    const MkResult m1 = mk_coordinates(winding_circle(1), 1);
    CHECK(m1.coords.empty());
    CHECK(int(m1.times.size()) == 2);
  }

  TEST_CASE("crossing coordinates read off a twist about the base point") {
    // Rotating the double circle about e1 keeps the crossing at the base
    // point but tilts the tangent there by the rotation angle.
    const FramedCurve c =
        left_translate(exp_im(Vec3(0.01, 0.0, 0.0)), winding_circle(2));
    const MkResult m = mk_coordinates(c, 2);
    CHECK(std::abs(m.coords[0]) < 1e-9);
    CHECK(m.coords[1] == doctest::Approx(0.02).epsilon(1e-9));
  }

  TEST_CASE("normal-position failures are reported with a reason") {
    CHECK_THROWS_AS(mk_coordinates(winding_circle(2), 3), NotInUk);
    CHECK_THROWS_AS(mk_coordinates(winding_circle(4), 2), NotInUk);
    try {
      mk_coordinates(winding_circle(2), 3);
    } catch (const NotInUk& e) {
      CHECK(e.reason == "count");
    }
    // Not based at e1: starts away from the reference geodesic.
    const FramedCurve moved =
        left_translate(exp_im(Vec3(0.0, 0.3, 0.0)), winding_circle(2));
    CHECK_THROWS_AS(mk_coordinates(moved, 2), NotInUk);
  }

  TEST_CASE("frame-change classes of arcs") {
    const FramedCurve nu1 = winding_circle(1);
    CHECK(good_arc_membership(nu1, 0.0, 0.75) == GoodArcClass::A2);
    CHECK(good_arc_membership(nu1, 0.0, 1.0) == GoodArcClass::Outside);
  }
}
