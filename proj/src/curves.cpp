#include "convexa/curves.hpp"

#include <algorithm>
#include <cmath>

namespace convexa {

namespace {

double logistic_root(double w) {  // v with v - 1/v = w, v > 0
  return 0.5 * (w + std::sqrt(w * w + 4.0));
}

// Chord distance computed from component differences; the dot-product form
// 2 - 2<a,b> loses all precision once the quaternions agree to rounding.
double chord(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double dw = a.w - b.w, dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dw * dw + dx * dx + dy * dy + dz * dz);
}

}  // namespace

FramedCurve FramedCurve::from_parts(std::vector<double> grid,
                                    std::vector<UnitQuaternion> lifts,
                                    std::vector<double> v,
                                    std::vector<double> vhat) {
  const size_t n = v.size();
  if (n == 0 || grid.size() != n + 1 || lifts.size() != n + 1 ||
      vhat.size() != n)
    throw FormatError("curve arrays have inconsistent sizes");
  for (double g : grid)
    if (!std::isfinite(g)) throw FormatError("non-finite grid value");
  for (size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw NotMonotone("grid must be strictly increasing");
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v[i]) || !std::isfinite(vhat[i]))
      throw FormatError("non-finite profile value");
    if (!(v[i] > 0)) throw Degenerate("curve speed must be positive");
  }
  FramedCurve c;
  c.grid_ = std::move(grid);
  c.lifts_ = std::move(lifts);
  c.v_ = std::move(v);
  c.vhat_ = std::move(vhat);
  return c;
}

int FramedCurve::cell_of(double t) const {
  const double eps =
      1e-12 * (1.0 + std::abs(grid_.front()) + std::abs(grid_.back()));
  if (t < grid_.front() - eps || t > grid_.back() + eps)
    throw Degenerate("parameter outside curve domain");
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  const int i = int(it - grid_.begin()) - 1;
  return std::clamp(i, 0, cells() - 1);
}

UnitQuaternion FramedCurve::lift_at(double t) const {
  const int i = cell_of(t);
  if (t == grid_[i]) return lifts_[i];
  if (t == grid_[i + 1]) return lifts_[i + 1];
  const double tau = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
  const ImQuaternion d = log_unit(lifts_[i].conjugate() * lifts_[i + 1]);
  return lifts_[i] * exp_im(tau * d);
}

bool FramedCurve::is_locally_convex() const {
  for (int i = 0; i < cells(); ++i)
    if (!(v_[i] > 0) || !(vhat_[i] > 0)) return false;
  return true;
}

bool FramedCurve::is_based(double tol) const {
  return std::abs(t_start()) <= 1e-12 && std::abs(t_end() - 1.0) <= 1e-12 &&
         lifts_.front().approx(quat::one, tol);
}

FramedCurve integrate_profile(const std::vector<double>& grid,
                              const std::vector<double>& v,
                              const std::vector<double>& vhat,
                              const UnitQuaternion& start) {
  const size_t n = v.size();
  if (n == 0 || grid.size() != n + 1 || vhat.size() != n)
    throw FormatError("profile arrays have inconsistent sizes");
  std::vector<double> g2{grid[0]};
  std::vector<double> v2, vh2;
  for (size_t i = 0; i < n; ++i) {
    const double h = grid[i + 1] - grid[i];
    if (!(h > 0)) throw NotMonotone("grid must be strictly increasing");
    const double angle = 0.5 * h * std::hypot(v[i], vhat[i]);
    const int parts = std::max(1, int(std::ceil(angle / (M_PI / 4))));
    for (int p = 1; p <= parts; ++p) {
      g2.push_back(grid[i] + h * p / parts);
      v2.push_back(v[i]);
      vh2.push_back(vhat[i]);
    }
    g2.back() = grid[i + 1];
  }
  std::vector<UnitQuaternion> lifts{start};
  for (size_t k = 0; k < v2.size(); ++k) {
    const double h = g2[k + 1] - g2[k];
    lifts.push_back(lifts.back() *
                    exp_im(0.5 * h * Vec3(vh2[k], 0.0, v2[k])));
  }
  return FramedCurve::from_parts(std::move(g2), std::move(lifts),
                                 std::move(v2), std::move(vh2));
}

FramedCurve integrate_frame(const LogCoords& coords, int min_cells) {
  const size_t n = coords.w.size();
  if (n == 0 || coords.grid.size() != n + 1 || coords.what.size() != n)
    throw FormatError("chart arrays have inconsistent sizes");
  const double span = coords.grid.back() - coords.grid.front();
  if (!(span > 0)) throw NotMonotone("grid must be strictly increasing");
  std::vector<double> grid{coords.grid.front()};
  std::vector<double> v, vhat;
  for (size_t i = 0; i < n; ++i) {
    const double h = coords.grid[i + 1] - coords.grid[i];
    if (!(h > 0)) throw NotMonotone("grid must be strictly increasing");
    const int parts = std::max(1, int(std::ceil(min_cells * h / span)));
    for (int p = 1; p <= parts; ++p) {
      grid.push_back(coords.grid[i] + h * p / parts);
      v.push_back(logistic_root(coords.w[i]));
      vhat.push_back(logistic_root(coords.what[i]));
    }
    grid.back() = coords.grid[i + 1];
  }
  return integrate_profile(grid, v, vhat, quat::one);
}

LogCoords extract_coords(const FramedCurve& curve) {
  LogCoords out;
  out.grid = curve.grid();
  for (int i = 0; i < curve.cells(); ++i) {
    const double v = curve.v()[i], vh = curve.vhat()[i];
    if (!(vh > 0))
      throw NotLocallyConvex("chart covers locally convex curves only");
    out.w.push_back(v - 1.0 / v);
    out.what.push_back(vh - 1.0 / vh);
  }
  return out;
}

double total_curvature(const FramedCurve& curve) {
  double tot = 0;
  for (int i = 0; i < curve.cells(); ++i)
    tot += (curve.grid()[i + 1] - curve.grid()[i]) *
           std::hypot(curve.v()[i], curve.vhat()[i]);
  return tot;
}

FramedCurve left_translate(const UnitQuaternion& q, const FramedCurve& curve) {
  std::vector<UnitQuaternion> lifts;
  lifts.reserve(curve.lifts().size());
  for (const auto& l : curve.lifts()) lifts.push_back(q * l);
  return FramedCurve::from_parts(curve.grid(), std::move(lifts), curve.v(),
                                 curve.vhat());
}

FramedCurve transform(const Mat3& A_in, const FramedCurve& c, double tol) {
  if (!A_in.allFinite() || !(A_in.determinant() > 0))
    throw Degenerate("projective transformation needs det > 0");
  const Mat3 A = A_in / std::cbrt(A_in.determinant());
  std::vector<double> ts = c.grid();
  for (int round = 0; round < 40; ++round) {
    const int n = int(ts.size()) - 1;
    std::vector<UnitQuaternion> lifts(n + 1);
    std::vector<double> v(n), vhat(n);
    std::vector<double> refine;
    bool ambiguous = false;
    for (int i = 0; i <= n; ++i) {
      UnitQuaternion q = canonical_lift(gram_schmidt(A * c.frame_at(ts[i])));
      if (i == 0) {
        if (q.dot(c.lifts().front()) < 0) q = -q;
      } else {
        const double d = q.dot(lifts[i - 1]);
        if (std::abs(d) < 0.1) {
          refine.push_back(0.5 * (ts[i - 1] + ts[i]));
          ambiguous = true;
        }
        if (d < 0) q = -q;
      }
      lifts[i] = q;
    }
    if (!ambiguous) {
      for (int i = 0; i < n; ++i) {
        const double tm = 0.5 * (ts[i] + ts[i + 1]);
        Mat3 R;
        const Mat3 Fm = gram_schmidt(A * c.frame_at(tm), &R);
        v[i] = R(1, 1) / R(0, 0) * c.v_at(tm);
        vhat[i] = R(2, 2) / R(1, 1) * c.vhat_at(tm);
        const double h = ts[i + 1] - ts[i];
        const ImQuaternion step = 0.5 * Vec3(vhat[i], 0.0, v[i]);
        const UnitQuaternion pred = lifts[i] * exp_im(h * step);
        double err = chord(pred, lifts[i + 1]);
        // Also pin the interior parametrization, not just the endpoint.
        UnitQuaternion mid = canonical_lift(Fm);
        if (mid.dot(lifts[i]) < 0) mid = -mid;
        const UnitQuaternion pred_mid = lifts[i] * exp_im(0.5 * h * step);
        err = std::max(err, chord(pred_mid, mid));
        // Cells at the width floor carry the source data's own accuracy;
        // further splitting cannot improve them.
        if (err > tol && h > 1e-11) refine.push_back(tm);
      }
      if (refine.empty())
        return FramedCurve::from_parts(std::move(ts), std::move(lifts),
                                       std::move(v), std::move(vhat));
    }
    if (ts.size() + refine.size() > 1500000)
      throw NoConvergence("transform subdivision grew without bound");
    ts.insert(ts.end(), refine.begin(), refine.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  }
  throw NoConvergence("transform did not reach the per-cell tolerance");
}

FramedCurve concat(const FramedCurve& a, const FramedCurve& b) {
  std::vector<double> grid = a.grid();
  const double shift = a.t_end() - b.t_start();
  for (size_t i = 1; i < b.grid().size(); ++i)
    grid.push_back(b.grid()[i] + shift);
  std::vector<UnitQuaternion> lifts = a.lifts();
  const UnitQuaternion glue =
      a.endpoint_lift() * b.lifts().front().conjugate();
  for (size_t i = 1; i < b.lifts().size(); ++i)
    lifts.push_back(glue * b.lifts()[i]);
  std::vector<double> v = a.v();
  v.insert(v.end(), b.v().begin(), b.v().end());
  std::vector<double> vhat = a.vhat();
  vhat.insert(vhat.end(), b.vhat().begin(), b.vhat().end());
  return FramedCurve::from_parts(std::move(grid), std::move(lifts),
                                 std::move(v), std::move(vhat));
}

namespace {

FramedCurve rescale_to(const FramedCurve& c, double start, double width) {
  const double span = c.t_end() - c.t_start();
  const double f = width / span;
  std::vector<double> grid;
  grid.reserve(c.grid().size());
  for (double g : c.grid()) grid.push_back(start + (g - c.t_start()) * f);
  grid.front() = start;
  grid.back() = start + width;
  std::vector<double> v, vhat;
  for (int i = 0; i < c.cells(); ++i) {
    v.push_back(c.v()[i] / f);
    vhat.push_back(c.vhat()[i] / f);
  }
  return FramedCurve::from_parts(std::move(grid), c.lifts(), std::move(v),
                                 std::move(vhat));
}

}  // namespace

FramedCurve splice(const std::vector<FramedCurve>& pieces,
                   const std::vector<double>& widths) {
  if (pieces.empty() || widths.size() != pieces.size())
    throw FormatError("splice needs one width per piece");
  for (double w : widths)
    if (!(w > 0)) throw Degenerate("splice widths must be positive");
  FramedCurve out = rescale_to(pieces[0], 0.0, widths[0]);
  for (size_t i = 1; i < pieces.size(); ++i)
    out = concat(out, rescale_to(pieces[i], 0.0, widths[i]));
  return out;
}

FramedCurve subcurve(const FramedCurve& c, double t0, double t1) {
  const double eps = 1e-12 * (1.0 + std::abs(c.t_start()) + std::abs(c.t_end()));
  if (t0 < c.t_start() - eps || t1 > c.t_end() + eps || !(t0 < t1))
    throw Degenerate("restriction interval outside curve domain");
  t0 = std::max(t0, c.t_start());
  t1 = std::min(t1, c.t_end());
  const double eps2 = 1e-12 * (1.0 + std::abs(t0) + std::abs(t1));
  std::vector<double> grid{t0};
  for (double g : c.grid())
    if (g > t0 + eps2 && g < t1 - eps2) grid.push_back(g);
  grid.push_back(t1);
  std::vector<UnitQuaternion> lifts;
  std::vector<double> v, vhat;
  for (double g : grid) lifts.push_back(c.lift_at(g));
  for (size_t i = 0; i + 1 < grid.size(); ++i) {
    const int cell = c.cell_of(0.5 * (grid[i] + grid[i + 1]));
    v.push_back(c.v()[cell]);
    vhat.push_back(c.vhat()[cell]);
  }
  return FramedCurve::from_parts(std::move(grid), std::move(lifts),
                                 std::move(v), std::move(vhat));
}

FramedCurve rebase(const FramedCurve& c) {
  const double t0 = c.t_start(), span = c.t_end() - c.t_start();
  std::vector<double> grid;
  grid.reserve(c.grid().size());
  for (double g : c.grid()) grid.push_back((g - t0) / span);
  grid.front() = 0.0;
  grid.back() = 1.0;
  const UnitQuaternion inv = c.lifts().front().conjugate();
  std::vector<UnitQuaternion> lifts;
  lifts.reserve(c.lifts().size());
  for (const auto& l : c.lifts()) lifts.push_back(inv * l);
  std::vector<double> v, vhat;
  for (int i = 0; i < c.cells(); ++i) {
    v.push_back(c.v()[i] * span);
    vhat.push_back(c.vhat()[i] * span);
  }
  return FramedCurve::from_parts(std::move(grid), std::move(lifts),
                                 std::move(v), std::move(vhat));
}

FramedCurve restrict_normalized(const FramedCurve& c, double t0, double t1) {
  return rebase(subcurve(c, t0, t1));
}

FramedCurve reparametrize(const FramedCurve& c,
                          const std::function<double(double)>& phi, double a,
                          double b, const std::vector<double>& knots,
                          double tol) {
  if (!(a < b)) throw NotMonotone("empty reparametrization domain");
  const double scale = 1.0 + std::abs(c.t_start()) + std::abs(c.t_end());
  if (std::abs(phi(a) - c.t_start()) > 1e-9 * scale ||
      std::abs(phi(b) - c.t_end()) > 1e-9 * scale)
    throw WrongEndpoint("phi must map [a,b] onto the curve domain");
  const auto inverse = [&](double target) {
    double lo = a, hi = b;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  std::vector<double> ts{a, b};
  for (double k : knots) {
    if (k < a || k > b)
      throw Degenerate("knot outside reparametrization domain");
    ts.push_back(k);
  }
  for (size_t i = 1; i + 1 < c.grid().size(); ++i)
    ts.push_back(inverse(c.grid()[i]));
  const auto dedupe = [&] {
    std::sort(ts.begin(), ts.end());
    std::vector<double> out{ts.front()};
    for (double t : ts)
      if (t - out.back() > 1e-13 * (b - a)) out.push_back(t);
    out.back() = b;
    ts = std::move(out);
  };
  dedupe();
  for (int round = 0; round < 40; ++round) {
    const int n = int(ts.size()) - 1;
    std::vector<UnitQuaternion> lifts(n + 1);
    std::vector<double> v(n), vhat(n);
    std::vector<double> refine;
    double u_prev = c.t_start();
    lifts[0] = c.lifts().front();
    for (int i = 0; i < n; ++i) {
      const double u = i + 1 == n ? c.t_end()
                                  : std::clamp(phi(ts[i + 1]), c.t_start(),
                                               c.t_end());
      if (!(u > u_prev))
        throw NotMonotone("phi must be strictly increasing");
      lifts[i + 1] = c.lift_at(u);
      const double du = u - u_prev, ds = ts[i + 1] - ts[i];
      const int cell = c.cell_of(0.5 * (u_prev + u));
      v[i] = c.v()[cell] * du / ds;
      vhat[i] = c.vhat()[cell] * du / ds;
      const ImQuaternion step = 0.5 * Vec3(vhat[i], 0.0, v[i]);
      const UnitQuaternion pred = lifts[i] * exp_im(ds * step);
      double err = chord(pred, lifts[i + 1]);
      // Also pin the interior parametrization, not just the endpoint.
      const double sm = 0.5 * (ts[i] + ts[i + 1]);
      const UnitQuaternion mid =
          c.lift_at(std::clamp(phi(sm), c.t_start(), c.t_end()));
      const UnitQuaternion pred_mid = lifts[i] * exp_im(0.5 * ds * step);
      err = std::max(err, chord(pred_mid, mid));
      if (err > tol && ds > 1e-11) refine.push_back(sm);
      u_prev = u;
    }
    if (refine.empty())
      return FramedCurve::from_parts(std::move(ts), std::move(lifts),
                                     std::move(v), std::move(vhat));
    if (ts.size() + refine.size() > 1500000)
      throw NoConvergence("reparametrization subdivision grew without bound");
    ts.insert(ts.end(), refine.begin(), refine.end());
    dedupe();
  }
  throw NoConvergence("reparametrization did not reach the cell tolerance");
}

}  // namespace convexa
