#pragma once

#include <string>
#include <vector>

#include "fcft/surfaces.hpp"

namespace fcft {

struct Circle {
  Complex center;
  double radius = 1.0;
  bool outgoing = true;  // outer circle; inner circles are incoming
};

/// Multiply connected domain bounded by circles: circles[0] is the outer
/// boundary, the rest are removed disks. Parametrizations are
/// z -> center + radius * z on the unit circle.
struct PlanarDomain {
  std::vector<Circle> circles;

  static PlanarDomain disk();
  static PlanarDomain annulus(double q);
  static PlanarDomain pants(Complex w, double r1, double r2);

  int n_circles() const { return static_cast<int>(circles.size()); }
  void validate() const;
  /// Minimal gap between circle i and the rest of the boundary.
  double clearance(int i) const;
};

/// Equispaced trapezoid samples, N per circle.
struct BoundaryGrid {
  int N = 0;
  std::vector<Vector> unit;    // e^{2 pi i k / N}, shared layout per circle
  std::vector<Vector> points;  // center + radius * unit

  BoundaryGrid(const PlanarDomain& dom, int N);
  int total() const { return N * static_cast<int>(points.size()); }
};

/// Per-circle boundary function data; samples and Fourier coefficients are
/// interchangeable for band-limited data.
struct BoundaryData {
  std::vector<Vector> samples;

  Vector flat() const;
  static BoundaryData unflat(const Vector& v, const BoundaryGrid& g);
  /// DFT coefficients per circle; entry j holds frequency j for j < N/2 and
  /// j - N otherwise.
  std::vector<Vector> fourier() const;
  static BoundaryData from_fourier(const std::vector<Vector>& coeffs);
  /// Fraction of L2 mass above frequency N/4; > threshold triggers the
  /// aliasing warning.
  double high_frequency_fraction() const;
  /// Samples of a Laurent polynomial per circle.
  static BoundaryData sample(const std::vector<CircleFunction>& per_circle, const BoundaryGrid& g);
};

inline constexpr double kAliasingThreshold = 1e-8;

/// Discrete Cauchy transform: exact Fourier projections on the self-blocks
/// (the circle kernel is its own singular model), trapezoid quadrature on
/// the smooth cross-circle blocks.
Matrix cauchy_matrix(const PlanarDomain& dom, const BoundaryGrid& g);

/// Hilbert transform H = C - 1/2 (Plemelj split).
Matrix hilbert_matrix(const PlanarDomain& dom, const BoundaryGrid& g);

struct CauchyApplyResult {
  BoundaryData values;
  bool aliasing_warning = false;  // input had significant mass above N/4
};

/// Boundary values of the Cauchy transform of u, with the aliasing check.
CauchyApplyResult cauchy_apply(const PlanarDomain& dom, const BoundaryGrid& g,
                               const BoundaryData& u);

/// Formal adjoint C* v = v - conj(+-z r C(M_{+-zbar} r^{-1} conj(v))).
Matrix formal_adjoint(const PlanarDomain& dom, const BoundaryGrid& g, const Matrix& C);

/// Kerzman-Stein operator A = C - C*. Self-blocks vanish identically for
/// circular boundaries; cross-blocks have the smooth kernel
/// (1/N)[eps_src w r_src/(s-t) + eps_tgt conj(w_tgt r_tgt/(s-t))].
Matrix kerzman_stein(const PlanarDomain& dom, const BoundaryGrid& g);
Matrix ks_cross_block(const PlanarDomain& dom, const BoundaryGrid& g, int i, int j);

struct ProjectionResult {
  Matrix q;
  double ks_norm = 0;        // ||A||
  double condition_bound = 0;  // sqrt(1 + ||A||^2) bound for (1+A)
};

/// Orthogonal Hardy projection q = C (1 + A)^{-1}.
ProjectionResult hardy_projection_numeric(const PlanarDomain& dom, const BoundaryGrid& g);

/// Block-diagonal reference projection: n >= 0 modes on the outer circle,
/// n < 0 on the inner ones.
Matrix classical_projection(const PlanarDomain& dom, const BoundaryGrid& g);

/// Boundary values of the Cauchy integral by an independent route:
/// plain quadrature on an interior ring with upsampled data, then exact
/// Laurent continuation back to the boundary (reconstructed bandwidth N/4).
BoundaryData boundary_values_direct(const PlanarDomain& dom, const BoundaryGrid& g,
                                    const BoundaryData& u, int upsample = 8);

struct DecayReport {
  Eigen::VectorXd singular_values;  // descending
  Eigen::VectorXd partial_sums;
  double fitted_log10_slope = 0;  // least-squares slope of log10 s_k per index
  double asymmetry = 0;           // max |M - M*| entry before symmetrizing
};

/// Singular values of q_Sigma - p_Gamma with decay diagnostics.
DecayReport trace_class_diagnostic(const PlanarDomain& dom, const BoundaryGrid& g);
/// Singular values of the Kerzman-Stein operator.
DecayReport ks_decay(const PlanarDomain& dom, const BoundaryGrid& g);

/// Orthogonality residual of the complement formula on analytic spans:
/// max normalized |<h, perp_transform(h')>| over pairs, inner products on
/// the grid.
double perp_residual_spans(const BoundaryGrid& g, const SurfaceShape& shape,
                           const std::vector<HardyElement>& hardy);

/// Same residual with the numeric Hardy basis (range of the computed
/// projection) and the spin weights of the standard geometries.
double perp_residual_numeric(const PlanarDomain& dom, const BoundaryGrid& g,
                             const std::vector<Sector>& sectors);

std::string decay_report_json(const std::string& domain_name, int N, const DecayReport& rep);
std::string singular_values_csv(const DecayReport& rep);

}  // namespace fcft
