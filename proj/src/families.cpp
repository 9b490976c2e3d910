#include "convexa/families.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "convexa/bruhat.hpp"
#include "convexa/convexity.hpp"
#include "convexa/errors.hpp"

namespace convexa {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

UnitQuaternion exp_j(double th) { return exp_im(Vec3(0.0, th, 0.0)); }
UnitQuaternion exp_k(double th) { return exp_im(Vec3(0.0, 0.0, th)); }
UnitQuaternion exp_khat(double th) { return exp_im(th * quat::khat); }

Mat3 diag3(double a, double b, double c) {
  Mat3 D = Mat3::Zero();
  D(0, 0) = a;
  D(1, 1) = b;
  D(2, 2) = c;
  return D;
}

// The conjugation j q j^-1 (reflection symmetry of the frame equations) and
// its inverse-composed variant used when reversing curves.
UnitQuaternion sigma_j(const UnitQuaternion& q) {
  return UnitQuaternion::raw(q.w, -q.x, q.y, -q.z);
}
UnitQuaternion sigma_j_inv(const UnitQuaternion& q) {
  return UnitQuaternion::raw(q.w, q.x, -q.y, q.z);
}

double quat_gap(const UnitQuaternion& a, const UnitQuaternion& b) {
  return std::sqrt((a.w - b.w) * (a.w - b.w) + (a.x - b.x) * (a.x - b.x) +
                   (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

// Window index m in {0,...,5} of the hexagonal-arc parameter t: window m
// covers [m/6 - 1/12, m/6 + 1/12] modulo 1.
int hex_window(double t) {
  const double tm = t - std::floor(t + 1.0 / 12.0);
  const int m = int(std::floor(6.0 * tm + 0.5 + 1e-14));
  return std::clamp(m, 0, 5);
}

// Sign of the tilt rotation attached to window m.
int window_sign(int m) { return (m % 2 == 0) ? -1 : 1; }

// Shared 12-cell builder for the hexagonal-arc curve and its convex
// companion: grid -1/12 + j/12, lifts from the closed-form window product,
// constant logarithmic derivative on each half window.
FramedCurve hexarc_curve(double alpha, bool companion) {
  HexArcParams hp(alpha);
  const int n = 12;
  std::vector<double> grid(n + 1);
  std::vector<UnitQuaternion> lifts(n + 1);
  std::vector<double> v(n), vhat(n);
  for (int j = 0; j <= n; ++j) {
    grid[j] = -1.0 / 12.0 + j / 12.0;
    lifts[j] = companion ? hexarc_convex_lift(hp, grid[j])
                         : hexarc_lift(hp, grid[j]);
  }
  for (int j = 0; j < n; ++j) {
    const int m = hex_window(0.5 * (grid[j] + grid[j + 1]));
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    if (companion) {
      v[j] = 2.0 * hp.u * std::cos(kPi / 4.0 + sgn * hp.alpha_tilde);
      vhat[j] = 2.0 * hp.u * std::sin(kPi / 4.0 + sgn * hp.alpha_tilde);
    } else {
      v[j] = 2.0 * hp.u * std::cos(hp.alpha_tilde);
      vhat[j] = sgn * 2.0 * hp.u * std::sin(hp.alpha_tilde);
    }
  }
  return FramedCurve::from_parts(std::move(grid), std::move(lifts),
                                 std::move(v), std::move(vhat));
}

// Pole coordinates of a unit vector p: opening angle alpha in [0, pi]
// (alpha = 0 at the south pole) and phase shift t0 in (-1/6, 1/6].
void pole_coords(const Vec3& p, double* alpha, double* t0) {
  *alpha = std::atan2(std::hypot(p.x(), p.y()), -p.z());
  *t0 = std::atan2(p.y(), p.x()) / (6.0 * kPi);
}

UnitQuaternion g0_lift(const HexArcParams& hp, double t0, double t) {
  return hexarc_convex_lift(hp, t0).conjugate() *
         hexarc_convex_lift(hp, t + t0);
}

const FramedCurve& model_half() {
  static const FramedCurve m = restrict_normalized(nu(1.0), 0.0, 0.5);
  return m;
}

// Reverses the curve and applies the mirror symmetry q -> j q j^-1, which
// flips the sign of the time direction in the frame equations; v and vhat
// profiles are traversed backwards with their signs kept.
FramedCurve mirror_reverse(const FramedCurve& c) {
  const auto& g = c.grid();
  const auto& q = c.lifts();
  const auto& v = c.v();
  const auto& vh = c.vhat();
  const int n = c.cells();
  const double a = g.front(), b = g.back();
  std::vector<double> g2(n + 1);
  std::vector<UnitQuaternion> q2(n + 1);
  std::vector<double> v2(n), vh2(n);
  for (int i = 0; i <= n; ++i) {
    g2[i] = a + b - g[n - i];
    q2[i] = sigma_j(q[n - i]);
  }
  for (int i = 0; i < n; ++i) {
    v2[i] = v[n - 1 - i];
    vh2[i] = vh[n - 1 - i];
  }
  return FramedCurve::from_parts(std::move(g2), std::move(q2), std::move(v2),
                                 std::move(vh2));
}

// Core of the conic-arc constructions: transform of the model half circle by
// U0 * diag(1/c, c^2, 1/c) * diag(lambda, 1, 1/lambda) with c the conformal
// modulus read off the normal form of the endpoint.
EllipseArc ellipse_from_normal_form(const Mat3& U0, double c, double lambda,
                                    double tol = 1e-10) {
  EllipseArc out;
  out.c = c;
  out.lambda = lambda;
  out.map = U0 * diag3(1.0 / c, c * c, 1.0 / c) *
            diag3(lambda, 1.0, 1.0 / lambda);
  out.arc = transform(out.map, model_half(), tol);
  return out;
}

NormalForm stably_convex_normal_form(const Mat3& Q, const char* who) {
  NormalForm nf;
  try {
    nf = normal_form(Q);
  } catch (const NearBoundary& e) {
    throw NotStablyConvex(std::string(who) + ": " + e.what());
  }
  if (nf.perm.name() != "(13);2")
    throw NotStablyConvex(std::string(who) +
                          ": endpoint is not in the stably convex cell");
  return nf;
}

double conformal_modulus(const Mat3& U0) {
  const double a1 = U0(0, 0), a2 = U0(1, 1), a3 = U0(2, 2);
  return std::pow(a1 * a3 / (a2 * a2), 1.0 / 6.0);
}

// Reparametrizes a locally convex arc to constant spatial speed |gamma'| = v.
// The conic bridges below then vary continuously across the round
// configuration, where constant speed is exactly the parametrization of the
// circle segment they degenerate to.
FramedCurve uniform_speed(const FramedCurve& c, double tol) {
  const std::vector<double> g = c.grid();
  const std::vector<double> v = c.v();
  const int n = c.cells();
  std::vector<double> len(n + 1, 0.0);
  for (int i = 0; i < n; ++i)
    len[i + 1] = len[i] + std::abs(v[i]) * (g[i + 1] - g[i]);
  if (!(len[n] > 0.0)) throw Degenerate("uniform_speed: arc has zero length");
  auto phi = [g, len, n](double u) {
    const double target = std::clamp(u, 0.0, 1.0) * len[n];
    const auto it = std::upper_bound(len.begin() + 1, len.end() - 1, target);
    const int i = int(it - len.begin()) - 1;
    return g[i] + (target - len[i]) * (g[i + 1] - g[i]) / (len[i + 1] - len[i]);
  };
  return reparametrize(c, phi, 0.0, 1.0, {}, tol);
}

// Stably convex arc from the identity lift to the lift zq, parametrized at
// constant spatial speed. When zq lies on the model circle itself the arc is
// the exact constant-speed circle segment; the conic chart used off that
// locus degenerates there, and constant speed makes the two branches agree.
FramedCurve pinned_connect(const UnitQuaternion& zq) {
  if (dist_to_circle(zq, quat::khat) < 1e-12) {
    const double tau = std::atan2(zq.vec().dot(quat::khat), zq.w) / kPi;
    if (!(tau > 1e-9 && tau < 1.0 - 1e-9))
      throw NotStablyConvex("pinned_connect: circle endpoint is not stably convex");
    const int n = 4;
    std::vector<double> grid(n + 1);
    std::vector<UnitQuaternion> lifts(n + 1);
    for (int i = 0; i <= n; ++i) {
      grid[i] = double(i) / n;
      lifts[i] = exp_khat(kPi * tau * grid[i]);
    }
    std::vector<double> v(n, kSqrt2 * kPi * tau), vh(n, kSqrt2 * kPi * tau);
    return FramedCurve::from_parts(std::move(grid), std::move(lifts),
                                   std::move(v), std::move(vh));
  }
  const NormalForm nf = stably_convex_normal_form(project(zq), "pinned_connect");
  EllipseArc e =
      ellipse_from_normal_form(nf.U0, conformal_modulus(nf.U0), 1.0, 1e-10);
  if (quat_gap(e.arc.endpoint_lift(), zq) > 1e-7)
    throw NotStablyConvex("pinned_connect: endpoint is the non-convex lift");
  return uniform_speed(e.arc, 1e-10);
}

// Seam window sizes shared by every patched deformation: eps1 is the patch
// half width and eps2 = eps1/2 the offset of the inserted round pieces. They
// are found once by scanning a deterministic 32-point sphere grid and
// halving until the doubled seam window of every g0(p) is convex and the
// patch endpoints are stably convex, then shrinking by the margin factor 2.
// eps2 is kept as large as the seams allow because the final-window shear's
// sensitivity to its input grows like cot(4 pi eps2)^4.
struct PatchWindow {
  double eps1 = 0.0;
  double eps2 = 0.0;
};

std::vector<Vec3> patch_probe_points() {
  std::vector<Vec3> pts;
  const double ga = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < 32; ++i) {
    const double zc = 1.0 - 2.0 * (i + 0.5) / 32.0;
    const double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
    pts.push_back(Vec3(r * std::cos(ga * i), r * std::sin(ga * i), zc).normalized());
  }
  return pts;
}

bool patch_window_ok(double e1, double e2, const std::vector<Vec3>& pts) {
  const double eps = 2.0 * e1;
  for (const Vec3& p : pts) {
    const FramedCurve g = g0(p);
    const FramedCurve win =
        splice({subcurve(g, 1.0 - 2.0 * eps, 1.0), subcurve(g, 0.0, 2.0 * eps)},
               {2.0 * eps, 2.0 * eps});
    if (!is_convex_arc(win, win.t_start(), win.t_end())) return false;
    const UnitQuaternion zA = exp_khat(-2.0 * kPi * e2) * g.lift_at(e1);
    if (!is_stably_convex_quat(zA)) return false;
    const UnitQuaternion X =
        g.lift_at(1.0 - e1).conjugate() * exp_khat(2.0 * kPi * (1.0 - e2));
    if (!is_stably_convex_quat(X)) return false;
    if (!is_stably_convex_quat(sigma_j_inv(X))) return false;
  }
  return true;
}

const PatchWindow& patch_window() {
  static const PatchWindow w = [] {
    const std::vector<Vec3> pts = patch_probe_points();
    for (double eps = 0.05; eps > 1e-4; eps *= 0.5)
      for (double ratio : {0.5, 0.25, 0.125})
        if (patch_window_ok(eps / 2.0, ratio * eps / 2.0, pts))
          return PatchWindow{eps / 2.0, ratio * eps / 2.0};
    throw WindowTooSmall("gs: no admissible seam window size found");
  }();
  return w;
}

// ---- pieces of h_hat ------------------------------------------------------

double find_eps0(int k, const UnitQuaternion& z) {
  const UnitQuaternion zend = (k % 2 == 0) ? -z : z;
  for (double e = 0.2 / k; e > 1e-6; e *= 0.9) {
    bool ok = true;
    for (int i = 1; i <= 16 && ok; ++i) {
      const double tau = e * i / 16.0;
      try {
        ok = is_convex_quat(exp_khat(-kPi * k * tau) * z);
      } catch (const NearBoundary&) {
        ok = false;
      }
    }
    if (!ok) continue;
    UnitQuaternion z0pow = exp_khat(kPi * (k - 1) * e);
    if ((k - 1) % 2 == 1) z0pow = -z0pow;
    if (is_stably_convex_quat(z0pow.conjugate() * zend)) return e;
  }
  throw ConvexityWindowNotFound(
      "h_hat: no admissible window size for the given endpoint");
}

// Round model curve with the final window already in place: a reparametrized
// nu(8k) whose restriction to [1-s1, 1] is nu(2) on the nose.
FramedCurve nu_tilde(int k, double eps0, double s1) {
  return splice({nu(8.0 * k - 1.0 + eps0), subcurve(nu(2.0), 1.0 - s1, 1.0)},
                {1.0 - s1, s1});
}

// Family member at disk radius r <= pi/4: the patched curve through the cap
// point, which interpolates between the south pole (round curve) at r = 0
// and the north pole at r = pi/4.
Vec3 cap_point(double r, double th) {
  return Vec3(std::cos(th) * std::sin(4.0 * r), std::sin(th) * std::sin(4.0 * r),
              -std::cos(4.0 * r))
      .normalized();
}

// Loop-adding move number m at stage sg in [0, 1]: a fixed round prefix, the
// sphere-parametrized member g0(p_sg) sweeping from the south to the north
// pole, a round filler ending the head at the window lift, and the common
// round final window.
FramedCurve sigma_move(int m, double sg, double eps0, double s1) {
  const Vec3 p(std::sin(sg * kPi), 0.0, -std::cos(sg * kPi));
  std::vector<FramedCurve> pieces;
  std::vector<double> widths;
  const int heads = (m > 2) ? 3 : 2;
  const double hw = (1.0 - s1) / heads;
  if (m > 2) {
    pieces.push_back(nu(2.0 * (m - 2)));
    widths.push_back(hw);
  }
  pieces.push_back(g0(p.normalized()));
  widths.push_back(hw);
  pieces.push_back(nu(1.0 + eps0));
  widths.push_back(hw);
  pieces.push_back(subcurve(nu(2.0), 1.0 - s1, 1.0));
  widths.push_back(s1);
  return splice(pieces, widths);
}

// Cumulative phase of a curve whose lifts stay on the circle through khat;
// the per-cell phase increments of every caller are below pi, so nearest
// continuation unwraps correctly.
std::vector<double> extract_phase(const FramedCurve& c,
                                  const std::vector<double>& ts) {
  std::vector<double> phi(ts.size());
  double prev = 0.0;
  for (size_t i = 0; i < ts.size(); ++i) {
    const UnitQuaternion q = c.lift_at(ts[i]);
    const double a = std::atan2(q.vec().dot(quat::khat), q.w);
    phi[i] = (i == 0) ? a : a + 2.0 * kPi * std::round((prev - a) / (2.0 * kPi));
    prev = phi[i];
    if (quat_gap(q, exp_khat(phi[i])) > 1e-6)
      throw Degenerate("phase morph: lift left the reference circle");
  }
  return phi;
}

FramedCurve curve_from_phase(const std::vector<double>& ts,
                             const std::vector<double>& phi) {
  const int n = int(ts.size()) - 1;
  std::vector<UnitQuaternion> lifts(n + 1);
  std::vector<double> v(n), vh(n);
  for (int i = 0; i <= n; ++i) lifts[i] = exp_khat(phi[i]);
  for (int i = 0; i < n; ++i) {
    const double slope = (phi[i + 1] - phi[i]) / (ts[i + 1] - ts[i]);
    if (!(slope > 0.0))
      throw NotMonotone("phase morph: interpolated phase not increasing");
    v[i] = vh[i] = kSqrt2 * slope;
  }
  return FramedCurve::from_parts(std::vector<double>(ts), std::move(lifts),
                                 std::move(v), std::move(vh));
}

// Interpolates two curves with circle-valued lifts by blending their
// cumulative phases on the merged grid. Exact at lam = 0, 1 up to the
// projection of the inputs onto the circle.
FramedCurve morph_circle_curves(const FramedCurve& A, const FramedCurve& B,
                                double lam) {
  std::vector<double> ts = A.grid();
  ts.insert(ts.end(), B.grid().begin(), B.grid().end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-12; }),
           ts.end());
  const std::vector<double> pa = extract_phase(A, ts);
  const std::vector<double> pb = extract_phase(B, ts);
  std::vector<double> phi(ts.size());
  for (size_t i = 0; i < ts.size(); ++i)
    phi[i] = (1.0 - lam) * pa[i] + lam * pb[i];
  return curve_from_phase(ts, phi);
}

// Connecting path between the cap boundary member and the round model with
// 8k-3 affine stages: an initial morph onto the first loop-adding move, then
// alternating loop-adding moves and morphs between consecutive moves, ending
// with a morph onto nu_tilde.
FramedCurve gtilde(int k, double eps0, double s1, double r) {
  const int M = 8 * k - 3;
  const double lo = kPi / 4.0, hi = 0.875;
  const double x = std::clamp((r - lo) / (hi - lo), 0.0, 1.0);
  const int idx = std::min(int(std::floor(x * M)), M - 1);
  const double lam = x * M - idx;
  if (idx == 0)
    return morph_circle_curves(gs(s1, Vec3(0.0, 0.0, 1.0)),
                               sigma_move(2, 0.0, eps0, s1), lam);
  if (idx % 2 == 1) {
    const int m = 2 + (idx - 1) / 2;
    return sigma_move(m, lam, eps0, s1);
  }
  const int i = idx / 2;
  const FramedCurve A = sigma_move(i + 1, 1.0, eps0, s1);
  const FramedCurve B = (i < 4 * k - 2) ? sigma_move(i + 2, 0.0, eps0, s1)
                                        : nu_tilde(k, eps0, s1);
  return morph_circle_curves(A, B, lam);
}

// Shared by the public connector (tight tolerance) and the h_hat assembly
// (relaxed tolerance: only the spliced grid values enter its contracts).
FramedCurve connect_lifts(const UnitQuaternion& z_a, const UnitQuaternion& z_b,
                          double tol) {
  const UnitQuaternion rel = z_a.conjugate() * z_b;
  if (!is_stably_convex_quat(rel))
    throw NotStablyConvex("convex_connect: z_a^-1 z_b is not stably convex");
  const NormalForm nf = stably_convex_normal_form(project(rel), "convex_connect");
  EllipseArc e =
      ellipse_from_normal_form(nf.U0, conformal_modulus(nf.U0), 1.0, tol);
  if (quat_gap(e.arc.endpoint_lift(), rel) > 1e-7)
    throw NotStablyConvex("convex_connect: z_b is the non-convex lift");
  return left_translate(z_a, e.arc);
}

}  // namespace

HexArcParams::HexArcParams(double alpha_in) : alpha(alpha_in) {
  if (!(alpha_in >= -kPi - 1e-12 && alpha_in <= kPi + 1e-12))
    throw Degenerate("hexarc: alpha must lie in [-pi, pi]");
  alpha = std::clamp(alpha_in, -kPi, kPi);
  const double s = std::sin(alpha);
  alpha_tilde = std::asin(0.5 * s);
  u = 6.0 * std::acos(std::cos(alpha) / std::sqrt(4.0 - s * s));
  v = -0.5 * alpha_tilde;
}

UnitQuaternion hexarc_lift(const HexArcParams& params, double t) {
  const double tm = t - std::floor(t + 1.0 / 12.0);  // in [-1/12, 11/12)
  int m = int(std::floor(6.0 * tm + 0.5 + 1e-14));
  m = std::clamp(m, 0, 5);
  UnitQuaternion L = exp_j(params.alpha / 2.0);
  for (int i = 0; i < m; ++i)
    L = L * exp_k(params.u / 12.0) * exp_j(window_sign(i) * params.alpha_tilde) *
        exp_k(params.u / 12.0);
  return L * exp_k(params.u * (tm - m / 6.0)) *
         exp_j(window_sign(m) * params.alpha_tilde / 2.0);
}

UnitQuaternion hexarc_convex_lift(const HexArcParams& params, double t) {
  return hexarc_lift(params, t) * quat::h.conjugate();
}

FramedCurve nu(double s) {
  if (!(s > 0.0) || !std::isfinite(s))
    throw Degenerate("nu: s must be positive");
  const int n = std::max(8, int(std::ceil(8.0 * s)));
  std::vector<double> grid(n + 1);
  std::vector<UnitQuaternion> lifts(n + 1);
  for (int i = 0; i <= n; ++i) {
    grid[i] = double(i) / n;
    lifts[i] = exp_khat(kPi * s * grid[i]);
  }
  std::vector<double> v(n, kSqrt2 * kPi * s), vh(n, kSqrt2 * kPi * s);
  return FramedCurve::from_parts(std::move(grid), std::move(lifts),
                                 std::move(v), std::move(vh));
}

FramedCurve circle(const Mat3& basis, double rho) {
  if (!(rho > 0.0 && rho < kPi / 2.0))
    throw Degenerate("circle: rho must lie in (0, pi/2)");
  const UnitQuaternion qb = canonical_lift(basis);
  const UnitQuaternion tilt = exp_j((rho - kPi / 2.0) / 2.0);
  const int n = 16;
  std::vector<double> grid(n + 1);
  std::vector<UnitQuaternion> lifts(n + 1);
  for (int i = 0; i <= n; ++i) {
    grid[i] = double(i) / n;
    lifts[i] = qb * exp_k(kPi * grid[i]) * tilt;
  }
  std::vector<double> v(n, 2.0 * kPi * std::sin(rho));
  std::vector<double> vh(n, 2.0 * kPi * std::cos(rho));
  return FramedCurve::from_parts(std::move(grid), std::move(lifts),
                                 std::move(v), std::move(vh));
}

FramedCurve beta(double alpha) { return hexarc_curve(alpha, false); }

FramedCurve gamma_alpha(double alpha) { return hexarc_curve(alpha, true); }

FramedCurve g0(const Vec3& p) {
  if (std::abs(p.norm() - 1.0) > 1e-12)
    throw Degenerate("g0: p must be a unit vector");
  double alpha = 0.0, t0 = 0.0;
  pole_coords(p, &alpha, &t0);
  const HexArcParams hp(alpha);
  std::vector<double> grid{0.0, 1.0};
  for (int j = 0; j < 6; ++j) {
    double x = (2.0 * j + 1.0) / 12.0 - t0;
    x -= std::floor(x);
    if (x > 1e-12 && x < 1.0 - 1e-12) grid.push_back(x);
  }
  std::sort(grid.begin(), grid.end());
  const int n = int(grid.size()) - 1;
  std::vector<UnitQuaternion> lifts(n + 1);
  for (int i = 0; i <= n; ++i) lifts[i] = g0_lift(hp, t0, grid[i]);
  if (quat_gap(lifts[0], quat::one) > 1e-12 ||
      quat_gap(lifts[n], quat::one) > 1e-9)
    throw Degenerate("g0: based closure failed");
  lifts[0] = quat::one;
  lifts[n] = quat::one;
  std::vector<double> v(n), vh(n);
  for (int i = 0; i < n; ++i) {
    const int m = hex_window(0.5 * (grid[i] + grid[i + 1]) + t0);
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    v[i] = 2.0 * hp.u * std::cos(kPi / 4.0 + sgn * hp.alpha_tilde);
    vh[i] = 2.0 * hp.u * std::sin(kPi / 4.0 + sgn * hp.alpha_tilde);
  }
  return FramedCurve::from_parts(std::move(grid), std::move(lifts),
                                 std::move(v), std::move(vh));
}

FramedCurve gs(double s, const Vec3& p) {
  if (!(s >= 0.0 && s < 0.5))
    throw WindowTooSmall("gs: s must lie in [0, 1/2)");
  if (std::abs(p.norm() - 1.0) > 1e-12)
    throw Degenerate("gs: p must be a unit vector");
  const Vec3 pu = p.normalized();
  if (s == 0.0) return g0(pu);
  const PatchWindow& w = patch_window();
  const double e1 = w.eps1, e2 = w.eps2;

  const FramedCurve base = g0(pu);
  const UnitQuaternion zA = exp_khat(-2.0 * kPi * e2) * base.lift_at(e1);
  if (!is_stably_convex_quat(zA))
    throw WindowTooSmall("gs: head patch endpoint is not stably convex");
  const FramedCurve gamma_plus = pinned_connect(zA);
  const UnitQuaternion X =
      base.lift_at(1.0 - e1).conjugate() * exp_khat(2.0 * kPi * (1.0 - e2));
  if (!is_stably_convex_quat(X))
    throw WindowTooSmall("gs: tail patch endpoint is not stably convex");
  const FramedCurve delta = pinned_connect(sigma_j_inv(X));
  const FramedCurve gamma_minus =
      left_translate(exp_khat(2.0 * kPi * (1.0 - 2.0 * e2)), mirror_reverse(delta));
  const FramedCurve middle = left_translate(exp_khat(-2.0 * kPi * e2),
                                            subcurve(base, e1, 1.0 - e1));
  const FramedCurve tail = subcurve(nu(2.0), 1.0 - 2.0 * e2, 1.0);
  const FramedCurve g_b =
      splice({gamma_plus, middle, gamma_minus, tail},
             {e1 - e2, 1.0 - 2.0 * e1, e1 - e2, 2.0 * e2});
  if (s <= 2.0 * e2) return g_b;

  // When the assembled curve is exactly a doubly traversed round circle (the
  // south-pole fiber), the window shear acts as the identity on its data and
  // only the parametrization would churn; return the assembly directly.
  {
    bool on_circle = true;
    for (const UnitQuaternion& q : g_b.lifts())
      if (dist_to_circle(q, quat::khat) > 1e-12) {
        on_circle = false;
        break;
      }
    if (on_circle) {
      const std::vector<double> phase = extract_phase(g_b, g_b.grid());
      if (std::abs(phase.back() - 2.0 * kPi) < 1e-9) return g_b;
    }
  }

  // Stretch the final round window from [1 - 2 eps2, 1] to [1 - s, 1] by a
  // parabolic chart shear fixing the model circle, composed with the exact
  // inverse of its boundary reparametrization.
  const double c = kSqrt2 * (1.0 / std::tan(4.0 * kPi * e2) -
                             1.0 / std::tan(2.0 * kPi * s));
  Mat3 A = Mat3::Identity();
  A(0, 1) = c;
  A(0, 2) = 0.5 * c * c;
  A(1, 2) = c;
  const double ctil = c / kSqrt2;
  auto sigma_c = [ctil](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const int n = (2.0 * t >= 1.0) ? 1 : 0;
    const double th = kPi * (2.0 * t - n);
    const double cotv = (th <= 0.0) ? std::numeric_limits<double>::infinity()
                                    : std::cos(th) / std::sin(th);
    return (n * kPi + std::atan2(1.0, cotv - ctil)) / (2.0 * kPi);
  };
  // The shear acts pointwise in the parameter, so it commutes with the time
  // change; running the time change on the smaller pre-shear grid keeps the
  // expensive geometric refinement to a single pass.
  // The time change runs at a tighter tolerance than the shear so the shear's
  // refinement never chases the time change's own model error.
  const FramedCurve timed =
      reparametrize(g_b, sigma_c, 0.0, 1.0, {0.5, 1.0 - s}, 5e-9);
  return transform(A, timed, 2e-8);
}

FramedCurve path_nu(int n, double sigma) {
  if (n < 2) throw Degenerate("path_nu: n must be at least 2");
  if (!(sigma >= 0.0 && sigma <= 1.0))
    throw Degenerate("path_nu: sigma must lie in [0, 1]");
  const Vec3 p(std::sin(sigma * kPi), 0.0, -std::cos(sigma * kPi));
  FramedCurve tail = g0(p.normalized());
  if (n == 2) return tail;
  return splice({nu(double(n - 2)), tail}, {double(n - 2) / n, 2.0 / n});
}

EllipseArc osculating_ellipse(const Mat3& Q) {
  const NormalForm nf = stably_convex_normal_form(Q, "osculating_ellipse");
  EllipseArc out = ellipse_from_normal_form(nf.U0, conformal_modulus(nf.U0), 1.0);
  out.residual = (project(out.arc.endpoint_lift()) - Q).cwiseAbs().maxCoeff();
  return out;
}

EllipseArc fit_ellipse(const UnitQuaternion& z0, const Vec3& v_t, double t,
                       const UnitQuaternion& z1) {
  if (!(t > 0.0 && t < 1.0))
    throw PointOutsideRegion("fit_ellipse: pin parameter must lie in (0, 1)");
  if (v_t.norm() < 1e-12)
    throw Degenerate("fit_ellipse: pin point must be nonzero");
  const UnitQuaternion rel = z0.conjugate() * z1;
  if (!is_stably_convex_quat(rel))
    throw NotStablyConvex("fit_ellipse: z0^-1 z1 is not stably convex");
  const NormalForm nf = stably_convex_normal_form(project(rel), "fit_ellipse");
  const Vec3 vt = project(z0).transpose() * v_t.normalized();
  const Vec3 vtil = (nf.U0.inverse() * vt).normalized();
  if (!(vtil.x() > 1e-12 && vtil.y() > 1e-12 && vtil.z() > 1e-12))
    throw PointOutsideRegion(
        "fit_ellipse: pin point is outside the region swept by the arcs");
  const double c = std::pow(vtil.y() * vtil.y() / (2.0 * vtil.x() * vtil.z()),
                            1.0 / 6.0);
  const Vec3 wt = (diag3(c, 1.0 / (c * c), c) * vtil).normalized();
  double sstar = std::atan2(kSqrt2 * wt.y(), wt.x() - wt.z()) / (2.0 * kPi);
  if (sstar < 0.0) sstar += 1.0;
  if (!(sstar > 1e-12 && sstar < 0.5 - 1e-12))
    throw PointOutsideRegion("fit_ellipse: pin point maps outside the arc");
  const double mu = std::tan(kPi * sstar) / std::tan(kPi * t / 2.0);
  EllipseArc out = ellipse_from_normal_form(nf.U0, c, 1.0 / mu);
  // ellipse_from_normal_form applies diag(lambda, 1, 1/lambda) on the right;
  // the pinned dilation is diag(1/mu, 1, mu), i.e. lambda = 1/mu.
  out.lambda = mu;
  out.arc = left_translate(z0, out.arc);
  out.map = project(z0) * out.map;
  const double end_gap = quat_gap(out.arc.endpoint_lift(), z1);
  const double pin_gap = (out.arc.point_at(t) - v_t.normalized()).norm();
  out.residual = std::max(end_gap, pin_gap);
  return out;
}

FramedCurve convex_connect(const UnitQuaternion& z_a,
                           const UnitQuaternion& z_b) {
  return connect_lifts(z_a, z_b, 1e-10);
}

FramedCurve h_hat(int k, const UnitQuaternion& z,
                  const std::vector<Eigen::Vector2d>& p) {
  if (k < 2) throw Degenerate("h_hat: k must be at least 2");
  if (int(p.size()) != k - 1)
    throw Degenerate("h_hat: expected k-1 disk parameters");
  for (const auto& pi : p)
    if (pi.norm() > 1.0 + 1e-9)
      throw PointOutsideRegion("h_hat: parameters must lie in the unit disk");
  if (!is_convex_quat(z))
    throw NotStablyConvex("h_hat: z must be the lift of a convex endpoint");
  const double e0 = find_eps0(k, z);
  const double s1 = (1.0 - e0) / 2.0;
  const UnitQuaternion zend = (k % 2 == 0) ? -z : z;
  UnitQuaternion z0pow = exp_khat(kPi * (k - 1) * e0);
  if ((k - 1) % 2 == 1) z0pow = -z0pow;

  std::vector<FramedCurve> pieces;
  std::vector<double> widths(k, 1.0 / k);
  for (int i = 0; i < k - 1; ++i) {
    const double r = p[i].norm();
    const double th = std::atan2(p[i].y(), p[i].x());
    FramedCurve full = (r <= kPi / 4.0) ? gs(s1, cap_point(r, th))
                       : (r < 0.875)    ? gtilde(k, e0, s1, r)
                                        : nu_tilde(k, e0, s1);
    pieces.push_back(subcurve(full, 0.0, 1.0 - s1));
  }
  pieces.push_back(connect_lifts(z0pow, zend, 1e-8));
  return splice(pieces, widths);
}

}  // namespace convexa
