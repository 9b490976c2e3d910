#pragma once

#include <vector>

#include <Eigen/Dense>

#include "convexa/curves.hpp"
#include "convexa/rotations.hpp"

namespace convexa {

// Derived constants of the hexagonal-arc family at a given opening angle
// alpha in [-pi, pi]. `alpha_tilde` is the latitude of the arc planes, `u` the
// total quaternionic phase advanced over the six arcs, and `v` the holonomy
// correction angle; all three are smooth in alpha.
struct HexArcParams {
  double alpha = 0.0;
  double alpha_tilde = 0.0;
  double u = 0.0;
  double v = 0.0;

  explicit HexArcParams(double alpha_in);
};

// Lift of the closed hexagonal-arc curve of opening angle `params.alpha` at
// time t (1-periodic). The curve is a concatenation of six circle arcs
// meeting with C^1 joints; window m covers t in [m/6 - 1/12, m/6 + 1/12].
UnitQuaternion hexarc_lift(const HexArcParams& params, double t);

// Lift of the convex companion of the hexagonal-arc curve: the same path
// composed with a fixed right translation that renders every window locally
// convex. Satisfies hexarc_convex_lift(t + 1/2) = -(mirror at alpha -> -alpha).
UnitQuaternion hexarc_convex_lift(const HexArcParams& params, double t);

// Circle traversed s times at constant geodesic curvature 1: lift
// t -> exp(pi * s * t * khat), logarithmic speed v = vhat = sqrt(2) pi s.
// For integer s the curve is closed; total curvature is 2 pi s.
FramedCurve nu(double s);

// Circle of spherical radius rho in (0, pi/2), traversed once, with frame
// adapted to `basis` (a rotation whose columns give the starting position,
// tangent, and normal alignment). Logarithmic derivative has
// v = 2 pi sin(rho), vhat = 2 pi cos(rho).
FramedCurve circle(const Mat3& basis, double rho);

// The closed hexagonal-arc curve at opening angle alpha as a framed curve on
// [-1/12, 11/12]. Locally convex for no alpha in (0, pi): the sign of vhat
// alternates between consecutive windows.
FramedCurve beta(double alpha);

// The convex companion of beta(alpha): locally convex for every alpha in
// [0, pi], with total curvature strictly increasing from 4 pi to 8 pi.
FramedCurve gamma_alpha(double alpha);

// Based reparametrization of the convex companion selected by a unit vector
// p: the member of the family through the base frame whose "center"
// direction is p. g0((0,0,-1)) == nu(2) exactly; g0((0,0,1)) is the curve
// with lift exp(4 pi t khat - correction), the doubly traversed companion.
FramedCurve g0(const Vec3& p);

// Deformation of g0(p) that agrees with nu(2) on the final window [1-s, 1]
// while staying locally convex; s in [0, 1/2). gs(0, p) == g0(p), and
// gs(s, (0,0,-1)) == nu(2) for every s.
FramedCurve gs(double s, const Vec3& p);

// Path sigma -> path_nu(n, sigma) of closed locally convex curves starting
// at nu(n) (sigma = 0) and adding two extra loops' worth of total curvature
// by sigma = 1, keeping the endpoint lift (-1)^n throughout. Requires n >= 2.
FramedCurve path_nu(int n, double sigma);

// A stably convex arc of a projective ellipse together with the linear map
// that produces it from the model circle. `map` carries model points to arc
// points (projectively); `c` is the conformal modulus of the fitted conic,
// `lambda` the chart dilation fixing the remaining parametrization freedom,
// and `residual` the worst endpoint/pin mismatch of the returned arc.
struct EllipseArc {
  FramedCurve arc;
  Mat3 map = Mat3::Identity();
  double c = 1.0;
  double lambda = 1.0;
  double residual = 0.0;
};

// The unique (up to parametrization) stably convex conic arc from the
// identity frame to Q, osculating the unit-curvature circle at the start.
// Throws NotStablyConvex when Q is not in the open stably convex cell.
EllipseArc osculating_ellipse(const Mat3& Q);

// Conic arc from lift z0 to lift z1 passing through the point v_t at
// parameter t in (0, 1). Throws NotStablyConvex when z0^-1 z1 is not stably
// convex and PointOutsideRegion when v_t is not reachable by such an arc.
EllipseArc fit_ellipse(const UnitQuaternion& z0, const Vec3& v_t, double t,
                       const UnitQuaternion& z1);

// Stably convex arc with lift running from z_a to z_b (the left translate of
// an osculating ellipse arc). Throws NotStablyConvex when z_a^-1 z_b is not
// stably convex.
FramedCurve convex_connect(const UnitQuaternion& z_a,
                           const UnitQuaternion& z_b);

// Multiparameter family collapsing the space of convex-to-z curves: for
// p = (p_1, ..., p_{k-1}) in the closed unit disk each, returns a curve made
// of k windows whose lift visits z0^i at t = i/k and ends at (-1)^{k+1} z.
// At p = 0 the first k-1 windows reproduce the round curve nu(k(1 + eps0)).
// Requires k >= 2 and z convex; throws ConvexityWindowNotFound when no
// admissible window size eps0 exists.
FramedCurve h_hat(int k, const UnitQuaternion& z,
                  const std::vector<Eigen::Vector2d>& p);

}  // namespace convexa
