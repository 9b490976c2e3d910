#pragma once

#include <optional>
#include <vector>

#include "convexa/bruhat.hpp"
#include "convexa/curves.hpp"

namespace convexa {

// Result of marching the relative frame G(t) = F(t0)^-1 F(t) until it first
// leaves the open convex coset. A step is bad when the exit lands back at the
// identity (the relative frame closes up), good when it leaves through one of
// the codimension-one boundary cells, and unbounded when the frame stays in
// the open coset all the way to the end of the curve.
enum class StepKind { Good, Bad, Unbounded };

struct StepReport {
  double t0 = 0.0;
  double t1 = 0.0;  // +infinity when kind == Unbounded
  StepKind kind = StepKind::Unbounded;
  std::optional<SignedPerm> boundary_cell;  // cell of G(t1); empty if unbounded
  double dist_to_identity = 0.0;            // Frobenius distance of G(t1) to I
};

// First exit time after t0. The march skips an entry window of one grid cell
// (the relative frame starts at the identity and enters the open coset
// immediately), samples the two corner minors densely, locates transversal
// zero crossings by bisection and quadratic zero touches by local
// minimization, and classifies the exit. An exit exactly at the end of the
// curve is reported with t1 = t_end.
StepReport next_step(const FramedCurve& curve, double t0);

// Inverse of the exit-time map where it is defined: the t0 < t1 whose step
// ends at t1, found by bisection (the exit time is increasing in t0). Throws
// NoConvergence when the exit time jumps across t1 and Degenerate when even
// the step from the start of the curve ends past t1.
double next_step_inverse(const FramedCurve& curve, double t1);

// The arc [t0, t1] is convex when the relative frame stays in the open coset
// on the open interval; equivalently the first exit after t0 is at or past
// t1. Stably convex additionally requires the endpoint frame change itself to
// lie in the open coset.
bool is_convex_arc(const FramedCurve& curve, double t0, double t1);
bool is_stably_convex_arc(const FramedCurve& curve, double t0, double t1);

struct MulticonvexReport {
  // Number of convex arcs when the curve splits into bad steps; empty when
  // some step is good (the curve is complicated).
  std::optional<int> multiplicity;
  std::vector<double> breakpoints;  // t_0 = start, ..., t_k = end when split
  bool complicated() const { return !multiplicity.has_value(); }
};

// Iterates next_step from the start of the curve. Bad steps accumulate
// breakpoints; the first good interior step makes the curve complicated. A
// final unbounded step (or an exit exactly at the end through a convex-
// closure cell) closes the last arc.
MulticonvexReport multiconvex_multiplicity(const FramedCurve& curve);

struct MkResult {
  // (theta_1, eta_1, ..., theta_{k-1}, eta_{k-1}); the curve lies in the
  // codimension 2k-2 stratum exactly when this vanishes.
  std::vector<double> coords;
  std::vector<double> times;   // the 2k crossing times, starting at t_start
  std::vector<double> thetas;  // continued arguments of the crossing points
  std::vector<double> etas;    // tangent arguments at the k integer crossings
};

// Coordinates transverse to the multiplicity-k stratum, built from the
// crossings with the reference geodesic {y = 0} through the first and third
// coordinate axes. The curve must start at e1, cross the geodesic exactly 2k
// times, all transversally, with distinct consecutive crossing points and
// convex arcs in between; the crossing arguments are continued through
// half-turn windows (ascending into odd crossings, descending into even
// ones) and the tangent arguments are measured against (e2, normal). Throws
// NotInUk with a diagnostic when any condition fails.
MkResult mk_coordinates(const FramedCurve& curve, int k);

// Class of the frame change F(ta)^-1 F(tb) against the step-acceptance cell
// lists.
GoodArcClass good_arc_membership(const FramedCurve& curve, double ta,
                                 double tb);

}  // namespace convexa
