#include <doctest.h>

#include <cmath>

#include "convexa/curves.hpp"
#include "support.hpp"

using namespace convexa;

namespace {

// Circle through e1 and e3 with both speeds pi*sqrt(2): the model curve
// whose lifted frame is exp(pi t (i+k)/sqrt(2)).
FramedCurve base_circle(int cells = 16) {
  std::vector<double> grid, v, vhat;
  for (int i = 0; i <= cells; ++i) grid.push_back(double(i) / cells);
  v.assign(cells, M_PI * std::sqrt(2.0));
  vhat.assign(cells, M_PI * std::sqrt(2.0));
  return integrate_profile(grid, v, vhat, quat::one);
}

Vec3 circle_point(double t) {
  return 0.5 * Vec3(1 + std::cos(2 * M_PI * t),
                    std::sqrt(2.0) * std::sin(2 * M_PI * t),
                    1 - std::cos(2 * M_PI * t));
}

}  // namespace

TEST_SUITE("curves") {
  TEST_CASE("integrating the base circle reproduces its closed form") {
    const FramedCurve c = base_circle();
    CHECK(c.is_based());
    CHECK(c.is_locally_convex());
    CHECK(c.endpoint_lift().approx(-quat::one, 1e-12));
    for (double t : {0.0, 0.1, 0.35, 0.5, 0.62, 1.0}) {
      CHECK((c.point_at(t) - circle_point(t)).norm() < 1e-12);
      CHECK(c.lift_at(t).approx(exp_im(M_PI * t * quat::khat), 1e-12));
    }
    CHECK(total_curvature(c) == doctest::Approx(2 * M_PI).epsilon(1e-14));
  }

  TEST_CASE("one-cell profiles are split to keep lift steps short") {
    const FramedCurve c = integrate_profile(
        {0.0, 1.0}, {M_PI * std::sqrt(2.0)}, {M_PI * std::sqrt(2.0)},
        quat::one);
    CHECK(c.cells() >= 4);
    CHECK(c.endpoint_lift().approx(-quat::one, 1e-12));
    CHECK((c.point_at(0.3) - circle_point(0.3)).norm() < 1e-12);
  }

  TEST_CASE("construction validates its input") {
    const FramedCurve c = base_circle(4);
    CHECK_THROWS_AS(
        FramedCurve::from_parts({0, 1}, {quat::one}, {1.0}, {1.0}),
        FormatError);
    CHECK_THROWS_AS(FramedCurve::from_parts({0, 0.5, 0.25},
                                            {quat::one, quat::one, quat::one},
                                            {1, 1}, {1, 1}),
                    NotMonotone);
    CHECK_THROWS_AS(FramedCurve::from_parts({0, 0.5, 1},
                                            {quat::one, quat::one, quat::one},
                                            {1, -1}, {1, 1}),
                    Degenerate);
    CHECK_THROWS_AS(c.lift_at(1.5), Degenerate);
  }

  TEST_CASE("grid samples are returned bitwise") {
    const FramedCurve c = base_circle(8);
    for (size_t i = 0; i < c.grid().size(); ++i) {
      const UnitQuaternion a = c.lift_at(c.grid()[i]);
      const UnitQuaternion b = c.lifts()[i];
      CHECK(a.w == b.w);
      CHECK(a.x == b.x);
      CHECK(a.y == b.y);
      CHECK(a.z == b.z);
    }
  }

  TEST_CASE("chart round trip") {
    auto g = testsupport::rng(31);
    std::uniform_real_distribution<double> u(0.3, 2.0);
    std::vector<double> grid, v, vhat;
    for (int i = 0; i <= 16; ++i) grid.push_back(i / 16.0);
    for (int i = 0; i < 16; ++i) {
      v.push_back(u(g));
      vhat.push_back(u(g));
    }
    const FramedCurve c = integrate_profile(grid, v, vhat, quat::one);
    const LogCoords coords = extract_coords(c);
    const FramedCurve c2 = integrate_frame(coords, 1);
    REQUIRE(c2.cells() == c.cells());
    for (int i = 0; i <= c.cells(); ++i)
      CHECK(c2.lifts()[i].approx(c.lifts()[i], 1e-12));
    for (int i = 0; i < c.cells(); ++i) {
      CHECK(c2.v()[i] == doctest::Approx(c.v()[i]).epsilon(1e-12));
      CHECK(c2.vhat()[i] == doctest::Approx(c.vhat()[i]).epsilon(1e-12));
    }
    // A curve that dips out of local convexity has no chart point.
    std::vector<double> bad = vhat;
    bad[3] = -0.2;
    const FramedCurve nc = integrate_profile(grid, v, bad, quat::one);
    CHECK(!nc.is_locally_convex());
    CHECK_THROWS_AS(extract_coords(nc), NotLocallyConvex);
  }

  TEST_CASE("integrate_frame honors the minimum cell count") {
    LogCoords coords;
    coords.grid = {0.0, 1.0};
    coords.w = {0.0};
    coords.what = {0.0};
    const FramedCurve c = integrate_frame(coords, 64);
    CHECK(c.cells() >= 64);
    CHECK(c.is_based());
  }

  TEST_CASE("transform by the identity is the identity") {
    const FramedCurve c = base_circle();
    const FramedCurve d = transform(Mat3::Identity(), c);
    REQUIRE(d.cells() == c.cells());
    for (int i = 0; i <= c.cells(); ++i)
      CHECK(d.lifts()[i].approx(c.lifts()[i], 1e-12));
    for (int i = 0; i < c.cells(); ++i)
      CHECK(d.v()[i] == doctest::Approx(c.v()[i]).epsilon(1e-12));
  }

  TEST_CASE("transform maps frames through Gram-Schmidt of A F") {
    auto g = testsupport::rng(32);
    const FramedCurve c = base_circle();
    for (int it = 0; it < 10; ++it) {
      const Mat3 A = testsupport::random_sl3_near_identity(g);
      const FramedCurve d = transform(A, c, 1e-10);
      CHECK(d.is_locally_convex());
      for (double t : {0.0, 0.21, 0.5, 0.83, 1.0}) {
        const Mat3 want = gram_schmidt(A * c.frame_at(t));
        CHECK((d.frame_at(t) - want).cwiseAbs().maxCoeff() < 1e-6);
      }
      const Mat3 wend = gram_schmidt(A * c.frame_at(1.0));
      CHECK((d.frame_at(1.0) - wend).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("left translation rotates the whole configuration") {
    const FramedCurve c = base_circle(8);
    const UnitQuaternion q = exp_im(0.4 * Vec3(0, 1, 0));
    const FramedCurve d = left_translate(q, c);
    for (double t : {0.0, 0.3, 1.0})
      CHECK((d.point_at(t) - q.rotate(c.point_at(t))).norm() < 1e-13);
    CHECK(total_curvature(d) == total_curvature(c));
  }

  TEST_CASE("splitting and concatenating reproduces the curve") {
    const FramedCurve c = base_circle();
    const FramedCurve a = subcurve(c, 0.0, 0.5);
    const FramedCurve b = subcurve(c, 0.5, 1.0);
    const FramedCurve d = concat(a, b);
    REQUIRE(d.cells() == c.cells());
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      CHECK(d.lift_at(t).approx(c.lift_at(t), 1e-13));
    }
    CHECK(total_curvature(d) ==
          doctest::Approx(total_curvature(c)).epsilon(1e-14));
  }

  TEST_CASE("splice rescales pieces and preserves total curvature") {
    const FramedCurve c = base_circle();
    const FramedCurve a = subcurve(c, 0.0, 0.5);
    const FramedCurve b = subcurve(c, 0.5, 1.0);
    const FramedCurve s = splice({a, b}, {0.2, 0.8});
    CHECK(s.t_start() == 0.0);
    CHECK(s.t_end() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(total_curvature(s) ==
          doctest::Approx(total_curvature(c)).epsilon(1e-12));
    CHECK(s.endpoint_lift().approx(c.endpoint_lift(), 1e-12));
    // The first half now runs twice as fast over a window of width 0.2.
    CHECK(s.point_at(0.1) == c.point_at(0.25));
  }

  TEST_CASE("rebase produces the based representative") {
    const FramedCurve c = base_circle();
    const FramedCurve half = restrict_normalized(c, 0.0, 0.5);
    CHECK(half.is_based());
    CHECK(total_curvature(half) == doctest::Approx(M_PI).epsilon(1e-13));
    CHECK(half.endpoint_lift().approx(exp_im(M_PI / 2 * quat::khat), 1e-12));
    const FramedCurve mid = restrict_normalized(c, 0.25, 0.75);
    CHECK(mid.is_based());
    CHECK((mid.point_at(0.0) - Vec3(1, 0, 0)).norm() < 1e-12);
  }

  TEST_CASE("reparametrization composes with the time change") {
    const FramedCurve c = base_circle();
    const auto phi = [](double t) { return t * t; };
    const FramedCurve d = reparametrize(c, phi, 0.0, 1.0, {0.125});
    bool has_knot = false;
    for (double g : d.grid()) has_knot = has_knot || g == 0.125;
    CHECK(has_knot);
    for (double t : {0.2, 0.5, 0.9})
      CHECK((d.point_at(t) - c.point_at(t * t)).norm() < 1e-6);
    CHECK(total_curvature(d) ==
          doctest::Approx(total_curvature(c)).epsilon(1e-10));
    CHECK(d.endpoint_lift().approx(c.endpoint_lift(), 1e-12));
    const auto bad = [](double t) { return std::sin(4 * t); };
    CHECK_THROWS_AS(reparametrize(c, bad, 0.0, 1.0), Error);
  }
}
