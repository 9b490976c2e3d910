#include "convexa/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "convexa/errors.hpp"

namespace convexa {

namespace {

constexpr double kBadDist = 1e-6;   // Frobenius distance to I declaring a bad step
constexpr double kRootTol = 1e-10;  // bisection window for exit times
constexpr double kCellTol = 1e-7;   // coset classification tolerance at an exit
constexpr double kScanArc = 0.01;   // target lifted arc length between samples

// Relative frame G(t) = F(t0)^-1 F(t) evaluated through the lifts.
struct RelativeFrame {
  const FramedCurve* c;
  UnitQuaternion q0c;
  Mat3 at(double t) const { return project(q0c * c->lift_at(t)); }
};

double min_minor(const Mat3& G) {
  const auto [m1, m2] = open_cell_minors(G);
  return std::min(m1, m2);
}

double dist_to_identity(const Mat3& G) {
  return (G - Mat3::Identity()).norm();
}

template <class F>
double golden_min(const F& f, double a, double b, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// First root in (a, b] given f(a) > 0 >= f(b).
double bisect_root(const RelativeFrame& rel, double a, double b) {
  for (int it = 0; it < 200 && b - a > kRootTol; ++it) {
    const double m = 0.5 * (a + b);
    (min_minor(rel.at(m)) > 0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

StepReport finish(const RelativeFrame& rel, double t0, double t1) {
  const auto dfun = [&](double t) { return dist_to_identity(rel.at(t)); };
  double d = dfun(t1);
  if (d < kBadDist && d > 1e-12) {
    // Minor-based roots are biased by rounding noise near the identity (the
    // minors are quadratically small there); the distance itself is V-shaped
    // and pins the closing time to machine precision.
    const double a = std::max(t0 + 1e-12, t1 - 1e-5);
    const double b = std::min(rel.c->t_end(), t1 + 1e-5);
    const double tr = golden_min(dfun, a, b, 1e-13);
    if (dfun(tr) <= d) {
      t1 = tr;
      d = dfun(tr);
    }
  }
  StepReport r;
  r.t0 = t0;
  r.t1 = t1;
  const Mat3 G = rel.at(t1);
  r.dist_to_identity = d;
  if (r.dist_to_identity < kBadDist) {
    r.kind = StepKind::Bad;
    r.boundary_cell = SignedPerm{};  // identity cell
    return r;
  }
  r.kind = StepKind::Good;
  // The exit matrix sits on a cell boundary; one vanished minor is far below
  // the zero band while the surviving entries are order one. If an unrelated
  // entry happens to sit in the undecidable band, retry on a tolerance ladder.
  for (double tol : {kCellTol, 3e-7, 1e-6, 3e-8}) {
    try {
      r.boundary_cell = cell_id(G, tol);
      return r;
    } catch (const NearBoundary&) {
    }
  }
  r.boundary_cell = cell_id(G, kCellTol);  // rethrows with the diagnostic
  return r;
}

// Handles a sampled local minimum of the minor function on [a, b]: a bad exit
// if the frame returns to the identity, a hidden transversal crossing if the
// refined minimum is negative, otherwise no exit at all.
std::optional<StepReport> resolve_dip(const RelativeFrame& rel, double t0,
                                      double a, double b) {
  const auto dfun = [&](double t) { return dist_to_identity(rel.at(t)); };
  const auto ffun = [&](double t) { return min_minor(rel.at(t)); };
  const double td = golden_min(dfun, a, b, 1e-12);
  if (dfun(td) < kBadDist) return finish(rel, t0, td);
  const double tf = golden_min(ffun, a, b, 1e-12);
  if (ffun(tf) <= 0) return finish(rel, t0, bisect_root(rel, a, tf));
  return std::nullopt;
}

}  // namespace

StepReport next_step(const FramedCurve& c, double t0) {
  if (!std::isfinite(t0) || t0 < c.t_start() - 1e-12 || t0 >= c.t_end())
    throw Degenerate("next_step needs t0 inside the curve domain");
  t0 = std::max(t0, c.t_start());
  const std::vector<double>& grid = c.grid();
  for (int i = 0; i < c.cells(); ++i)
    if (grid[i + 1] > t0 && !(c.vhat()[i] > 0))
      throw NotLocallyConvex("curvature density must stay positive past t0");

  const RelativeFrame rel{&c, c.lift_at(t0).conjugate()};
  // Entry window: the relative frame starts at the identity and moves into
  // the open coset, so minors are only meaningfully signed one grid cell in.
  const int i0 = c.cell_of(t0);
  const double t_begin = std::min(t0 + (grid[i0 + 1] - grid[i0]), c.t_end());

  double prev_t = t_begin, prev_f = min_minor(rel.at(t_begin));
  if (prev_f <= 0) {
    // Exit inside the entry window: search backwards for a positive anchor.
    double w = 0.5 * (t_begin - t0);
    while (w > 1e-11) {
      const double tp = t0 + w;
      if (min_minor(rel.at(tp)) > 0)
        return finish(rel, t0, bisect_root(rel, tp, t_begin));
      w *= 0.5;
    }
    throw NoConvergence("no entry window into the open coset after t0");
  }
  double prev2_t = 0.0, prev2_f = 0.0, prev_th = 0.0;
  bool have_prev2 = false;
  double last_h = t_begin - t0, last_th = prev_th;

  for (int i = c.cell_of(t_begin); i < c.cells(); ++i) {
    const double a = std::max(grid[i], t_begin), b = grid[i + 1];
    if (!(b > a)) continue;
    const double rate = std::hypot(c.v()[i], c.vhat()[i]);
    const int m =
        std::clamp(int(std::ceil((b - a) * rate / kScanArc)), 4, 100000);
    const double hs = (b - a) / m;
    // Near a quadratic zero touch the sampled minimum can sit one half step
    // away from the touch; this bound keeps every touch above detection.
    const double th = 2.0 * hs * hs * rate * rate + 1e-9;
    last_h = hs;
    last_th = th;
    for (int s = 1; s <= m; ++s) {
      const double t = (s == m) ? b : a + s * hs;
      const double f = min_minor(rel.at(t));
      if (f <= 0) return finish(rel, t0, bisect_root(rel, prev_t, t));
      if (have_prev2 && prev_f <= prev2_f && prev_f <= f &&
          prev_f < std::max(th, prev_th)) {
        if (auto hit = resolve_dip(rel, t0, prev2_t, t)) return *hit;
      }
      prev2_t = prev_t;
      prev2_f = prev_f;
      have_prev2 = true;
      prev_t = t;
      prev_f = f;
      prev_th = th;
    }
  }

  const double T = c.t_end();
  const Mat3 GT = rel.at(T);
  const double dT = dist_to_identity(GT);
  if (dT < kBadDist) return finish(rel, t0, T);
  const double fT = min_minor(GT);
  if (fT <= 1e-9) return finish(rel, t0, T);  // boundary landing at the end
  if (fT < last_th) {
    // A touch may hide between the last interior sample and the endpoint.
    const double a = std::max(t_begin, T - 2.0 * last_h);
    if (auto hit = resolve_dip(rel, t0, a, T)) return *hit;
  }
  StepReport r;
  r.t0 = t0;
  r.t1 = std::numeric_limits<double>::infinity();
  r.kind = StepKind::Unbounded;
  r.dist_to_identity = dT;
  return r;
}

double next_step_inverse(const FramedCurve& c, double t1) {
  if (!std::isfinite(t1) || t1 <= c.t_start() || t1 > c.t_end() + 1e-12)
    throw Degenerate("inverse step time outside the curve domain");
  t1 = std::min(t1, c.t_end());
  const auto exit_time = [&](double t0) {
    const StepReport r = next_step(c, t0);
    return r.kind == StepKind::Unbounded
               ? std::numeric_limits<double>::infinity()
               : r.t1;
  };
  double lo = c.t_start();
  const double g0 = exit_time(lo);
  if (std::abs(g0 - t1) <= 1e-8) return lo;
  if (g0 > t1)
    throw Degenerate("no step ends at t1: the first step already passes it");
  double hi = t1;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (exit_time(mid) < t1 ? lo : hi) = mid;
  }
  const double t0 = 0.5 * (lo + hi);
  if (std::abs(exit_time(t0) - t1) > 1e-7 * (1.0 + std::abs(t1)))
    throw NoConvergence("exit time jumps across t1: no inverse there");
  return t0;
}

bool is_convex_arc(const FramedCurve& c, double t0, double t1) {
  if (!(t0 >= c.t_start() - 1e-12 && t1 <= c.t_end() + 1e-12 && t0 < t1))
    throw Degenerate("arc endpoints must be increasing inside the domain");
  const StepReport r = next_step(c, std::max(t0, c.t_start()));
  return r.kind == StepKind::Unbounded ||
         r.t1 >= std::min(t1, c.t_end()) - 1e-9;
}

bool is_stably_convex_arc(const FramedCurve& c, double t0, double t1) {
  if (!is_convex_arc(c, t0, t1)) return false;
  const Mat3 G = project(c.lift_at(t0).conjugate() * c.lift_at(t1));
  // Floor at rounding noise: an arc that closes up exactly projects to a
  // matrix whose minors are zero only up to machine precision.
  const auto [m1, m2] = open_cell_minors(G);
  return m1 > 1e-9 && m2 > 1e-9;
}

MulticonvexReport multiconvex_multiplicity(const FramedCurve& c) {
  MulticonvexReport rep;
  const double T = c.t_end();
  rep.breakpoints.push_back(c.t_start());
  double t = c.t_start();
  for (int guard = 0; guard < 100000; ++guard) {
    const StepReport r = next_step(c, t);
    const bool at_end =
        r.kind != StepKind::Unbounded && r.t1 >= T - 1e-9;
    if (r.kind == StepKind::Bad && !at_end) {
      rep.breakpoints.push_back(r.t1);
      t = r.t1;
      continue;
    }
    if (r.kind == StepKind::Unbounded ||
        (at_end && (r.kind == StepKind::Bad ||
                    is_convex_matrix(r.boundary_cell->matrix())))) {
      rep.breakpoints.push_back(T);
      rep.multiplicity = int(rep.breakpoints.size()) - 1;
      return rep;
    }
    return rep;  // good interior step: complicated
  }
  throw NoConvergence("step iteration did not terminate");
}

MkResult mk_coordinates(const FramedCurve& c, int k) {
  if (k < 1) throw Degenerate("crossing count parameter must be positive");
  const double T0 = c.t_start(), T1 = c.t_end();
  const Vec3 p0 = c.point_at(T0);
  if ((p0 - Vec3(1, 0, 0)).norm() > 1e-7)
    throw NotInUk("start", "curve must start at e1 on the reference geodesic");

  const auto ycoord = [&](double t) { return c.point_at(t).y(); };

  // Crossing times of {y = 0}: sign changes refined by bisection, with dips
  // of |y| checked for tangential contact.
  std::vector<double> times{T0};
  const std::vector<double>& grid = c.grid();
  double prev_t = T0, prev_y = 0.0;
  double prev2_t = 0.0, prev2_y = 0.0, prev_th = 0.0;
  bool have_prev2 = false, first_sample = true;
  for (int i = 0; i < c.cells(); ++i) {
    const double a = grid[i], b = grid[i + 1];
    const double v = c.v()[i];
    const double rate = std::hypot(v, c.vhat()[i]);
    const int m =
        std::clamp(int(std::ceil((b - a) * v / kScanArc)), 8, 100000);
    const double hs = (b - a) / m;
    const double th = 0.5 * v * rate * hs * hs + 1e-9;
    for (int s = 1; s <= m; ++s) {
      const double t = (s == m) ? b : a + s * hs;
      const double y = ycoord(t);
      if (first_sample) {
        if (!(y > 0))
          throw NotInUk("start", "curve must cross into y > 0 at the start");
        first_sample = false;
      } else if ((prev_y > 0) != (y > 0)) {
        double lo = prev_t, hi = t;
        const bool down = prev_y > 0;
        for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
          const double mid = 0.5 * (lo + hi);
          ((ycoord(mid) > 0) == down ? lo : hi) = mid;
        }
        const double root = 0.5 * (lo + hi);
        if (root < T1 - 1e-9) times.push_back(root);
      } else if (have_prev2 && std::abs(prev_y) <= std::abs(prev2_y) &&
                 std::abs(prev_y) <= std::abs(y) &&
                 std::abs(prev_y) < std::max(th, prev_th)) {
        const auto ay = [&](double u) { return std::abs(ycoord(u)); };
        const double tm = golden_min(ay, prev2_t, t, 1e-12);
        if (ay(tm) < 1e-9)
          throw NotInUk("tangency", "tangential contact with the reference geodesic");
      }
      prev2_t = prev_t;
      prev2_y = prev_y;
      have_prev2 = true;
      prev_t = t;
      prev_y = y;
      prev_th = th;
    }
  }

  if (int(times.size()) != 2 * k)
    throw NotInUk("count", "expected " + std::to_string(2 * k) +
                             " crossings, found " +
                             std::to_string(times.size()));

  // Transversality and the alternating tangent direction across the geodesic.
  std::vector<Vec3> points(times.size());
  for (size_t j = 0; j < times.size(); ++j) {
    points[j] = c.point_at(times[j]);
    const double s = c.tangent_at(times[j]).y();
    if (std::abs(s) < 1e-6)
      throw NotInUk("tangency",
                    "crossing " + std::to_string(j) + " is not transversal");
    if ((j % 2 == 0) != (s > 0))
      throw NotInUk("direction", "crossing " + std::to_string(j) +
                                     " has the wrong transversal direction");
  }
  for (size_t j = 0; j < times.size(); ++j) {
    const Vec3& q = points[(j + 1) % times.size()];
    if ((points[j] - q).norm() < 1e-9)
      throw NotInUk("repeated-point", "consecutive crossing points coincide");
  }

  // Convexity of the arcs between crossings (and of the final arc).
  for (size_t j = 0; j + 1 < times.size(); ++j)
    if (!is_convex_arc(c, times[j], times[j + 1]))
      throw NotInUk("arc-not-convex",
                    "arc between crossings " + std::to_string(j) + " and " +
                        std::to_string(j + 1) + " is not convex");
  if (!is_convex_arc(c, times.back(), T1))
    throw NotInUk("arc-not-convex", "final arc back to the endpoint is not convex");

  MkResult out;
  out.times = times;
  out.thetas.resize(times.size());
  out.thetas[0] = std::atan2(points[0].z(), points[0].x());
  for (size_t j = 1; j < times.size(); ++j) {
    const double raw = std::atan2(points[j].z(), points[j].x());
    // Ascending half-turn window into odd crossings, descending into even.
    const double lo =
        (j % 2 == 1) ? out.thetas[j - 1] : out.thetas[j - 1] - M_PI;
    double th = raw - 2.0 * M_PI * std::floor((raw - lo) / (2.0 * M_PI));
    if (!(th > lo + 1e-9 && th < lo + M_PI - 1e-9))
      throw NotInUk("window", "crossing argument leaves its half-turn window");
    out.thetas[j] = th;
  }
  out.etas.resize(k);
  for (int j = 0; j < k; ++j) {
    const double theta = out.thetas[2 * j];
    const Vec3 n(-std::sin(theta), 0.0, std::cos(theta));
    const Vec3 tan = c.tangent_at(times[2 * j]);
    out.etas[j] = std::atan2(tan.dot(n), tan.y());
  }
  for (int j = 1; j < k; ++j) {
    out.coords.push_back(out.thetas[2 * j]);
    out.coords.push_back(out.etas[j]);
  }
  return out;
}

GoodArcClass good_arc_membership(const FramedCurve& c, double ta, double tb) {
  if (!(ta >= c.t_start() - 1e-12 && tb <= c.t_end() + 1e-12 && ta < tb))
    throw Degenerate("arc endpoints must be increasing inside the domain");
  return good_arc_membership(
      project(c.lift_at(ta).conjugate() * c.lift_at(tb)));
}

}  // namespace convexa
