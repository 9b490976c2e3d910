#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "convexa/rotations.hpp"

namespace convexa {

// Logarithmic chart for curves: per-cell constants (w, what) with
// v = (w + sqrt(w^2+4))/2 and likewise vhat, so any pair of square-integrable
// functions yields a locally convex curve.
struct LogCoords {
  std::vector<double> grid;  // n+1 strictly increasing values
  std::vector<double> w;     // n per-cell values
  std::vector<double> what;  // n per-cell values
};

// Piecewise model of a framed curve on the sphere. The frame satisfies
// F' = F * Lambda with Lambda_21 = v, Lambda_32 = vhat (speed and curvature
// density); v and vhat are constant on each grid cell, so each cell is a
// circle arc and the lift moves along q(t) = q_i exp((t-t_i)/2 (vhat i + v k)).
// Stored lifts are the authoritative frame samples; lift_at interpolates
// geodesically, which reproduces the model exactly when the stored data is
// consistent. Columns of the projected frame are (point, tangent, normal).
class FramedCurve {
 public:
  FramedCurve() = default;

  // Validates sizes, a strictly increasing grid, finite entries and v > 0.
  static FramedCurve from_parts(std::vector<double> grid,
                                std::vector<UnitQuaternion> lifts,
                                std::vector<double> v,
                                std::vector<double> vhat);

  int cells() const { return int(v_.size()); }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<UnitQuaternion>& lifts() const { return lifts_; }
  const std::vector<double>& v() const { return v_; }
  const std::vector<double>& vhat() const { return vhat_; }
  double t_start() const { return grid_.front(); }
  double t_end() const { return grid_.back(); }

  // Index of the cell containing t (clamped to the last cell at t_end).
  int cell_of(double t) const;

  UnitQuaternion lift_at(double t) const;
  Mat3 frame_at(double t) const { return project(lift_at(t)); }
  Vec3 point_at(double t) const { return frame_at(t).col(0); }
  Vec3 tangent_at(double t) const { return frame_at(t).col(1); }
  Vec3 normal_at(double t) const { return frame_at(t).col(2); }
  double v_at(double t) const { return v_[cell_of(t)]; }
  double vhat_at(double t) const { return vhat_[cell_of(t)]; }
  double kappa_at(double t) const {
    const int i = cell_of(t);
    return vhat_[i] / v_[i];
  }
  UnitQuaternion endpoint_lift() const { return lifts_.back(); }

  bool is_locally_convex() const;
  // Based curves run over [0,1] and start at the identity frame with lift 1.
  bool is_based(double tol = 1e-9) const;

 private:
  std::vector<double> grid_;
  std::vector<UnitQuaternion> lifts_;
  std::vector<double> v_, vhat_;
};

// Integrates the frame ODE for per-cell constant (v, vhat) starting from the
// given lift. Cells are split as needed so every stored lift increment stays
// well inside the injectivity radius; this does not change the curve.
FramedCurve integrate_profile(const std::vector<double>& grid,
                              const std::vector<double>& v,
                              const std::vector<double>& vhat,
                              const UnitQuaternion& start);

// Curve of a logarithmic chart point, based at the identity frame. The grid
// is refined to at least min_cells cells (joints are preserved).
FramedCurve integrate_frame(const LogCoords& coords, int min_cells = 1024);

// Inverse chart: w = v - 1/v per cell. Throws NotLocallyConvex when some
// vhat <= 0 (the chart only covers locally convex curves).
LogCoords extract_coords(const FramedCurve& curve);

// Integral of sqrt(v^2 + vhat^2): the length of the lifted frame curve in
// S^3 times 2. Additive over cells and exact for the model.
double total_curvature(const FramedCurve& curve);

// Rotates the whole configuration: lifts become q * lift.
FramedCurve left_translate(const UnitQuaternion& q, const FramedCurve& curve);

// Projective transformation of the curve: frames map to the special
// orthogonal factor of A * F. Speeds and curvature densities pick up the
// ratios of consecutive diagonal entries of the triangular factor. The grid
// is subdivided until the piecewise model reproduces the transformed frames
// within tol per cell. The start lift keeps the sign of the input lift.
FramedCurve transform(const Mat3& A, const FramedCurve& curve,
                      double tol = 1e-9);

// Appends b after a: b's grid is shifted to start at a.t_end and b's lifts
// are rebased so the joint frame continues a exactly.
FramedCurve concat(const FramedCurve& a, const FramedCurve& b);

// Concatenation of several pieces with prescribed parameter widths; piece i
// is affinely rescaled to width widths[i] (v, vhat scale inversely).
FramedCurve splice(const std::vector<FramedCurve>& pieces,
                   const std::vector<double>& widths);

// Restriction to [t0, t1] in the original parameter (grid values are kept;
// t0, t1 are inserted exactly).
FramedCurve subcurve(const FramedCurve& curve, double t0, double t1);

// Affine move of the domain to [0,1] plus left translation making the start
// lift 1: the based representative of the arc.
FramedCurve rebase(const FramedCurve& curve);
FramedCurve restrict_normalized(const FramedCurve& curve, double t0,
                                double t1);

// Precomposition with the increasing map phi: result(t) = curve(phi(t)) for
// t in [a, b]; phi must map [a, b] onto the curve's domain. Knots are extra
// grid points to keep (in the new parameter). Total curvature is preserved.
// The grid is refined until the piecewise model matches the composite within
// tol per cell.
FramedCurve reparametrize(const FramedCurve& curve,
                          const std::function<double(double)>& phi, double a,
                          double b, const std::vector<double>& knots = {},
                          double tol = 1e-9);

}  // namespace convexa
