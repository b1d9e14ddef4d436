#pragma once

#include <string>
#include <vector>

#include "fcft/car.hpp"
#include "fcft/vertex.hpp"

namespace fcft {

/// Moduli of the standard NS pair of pants: unit disk minus the disk of
/// radius |q1| at w and the disk of radius |q2| at 0, with chosen square
/// roots carried explicitly.
struct ModuliPoint {
  Complex w, q1, q1_sqrt, q2, q2_sqrt;

  bool valid() const;
  void validate() const;  // throws std::invalid_argument on violation
  ModuliPoint conjugated() const;
};

struct AnnulusPoint {
  Complex q;
  Complex q_sqrt;  // used only in the NS sector
  Sector sector = Sector::NS;

  void validate(bool allow_unit_modulus = false) const;
  AnnulusPoint conjugated() const;
};

/// q^e for half-integer e, always as an integer power of the chosen square
/// root (never via a log branch).
Complex q_power(Complex q_sqrt, HalfInt e);

/// Boundary factor layout of an operator assigned to a surface:
/// outgoing tensor factors, then incoming ones.
struct SurfaceShape {
  std::vector<Sector> out_sectors, in_sectors;
  int n_out() const { return static_cast<int>(out_sectors.size()); }
  int n_in() const { return static_cast<int>(in_sectors.size()); }
};

/// An operator together with its boundary factor structure.
struct SurfaceOp {
  GradedOperator op;
  SurfaceShape shape;
  TruncationPtr trunc;
};

Vector disk_vacuum(const FockTruncation& trunc);
SurfaceOp disk_op(const TruncationPtr& trunc);

/// Diagonal q^{L0^sector} on the truncation.
GradedOperator annulus_operator(const AnnulusPoint& a, const TruncationPtr& trunc);
SurfaceOp annulus_op(const AnnulusPoint& a, const TruncationPtr& trunc);

struct PantsResult {
  SurfaceOp surface;                 // F(at w) ⊗ F(at 0) -> F(outer)
  std::map<int, double> term_norms;  // n -> operator norm of the n-th band term
};

/// Partial sum over n in [band_lo, band_hi] of the pants operator
/// (xi ⊗ eta) -> (q1^{L0} xi)_n q2^{L0} eta w^{-n-1}, first input = circle
/// at w. Normalized so that the n = -1 term alone sends Omega ⊗ eta to
/// q2^{L0} eta.
PantsResult pants_operator(const ModuliPoint& x, const TruncationPtr& trunc, int band_lo, int band_hi,
                           VertexEngine& engine);

/// Per-boundary-circle function data, ordered as in SurfaceShape.
struct HardyElement {
  std::vector<CircleFunction> parts;
  double norm() const;
};

std::vector<HardyElement> disk_hardy_basis(int n_max);
std::vector<HardyElement> disk_perp_basis(int n_max);
std::vector<HardyElement> annulus_hardy_basis(const AnnulusPoint& a, int n_min, int n_max);
std::vector<HardyElement> annulus_perp_basis(const AnnulusPoint& a, int n_min, int n_max);
/// Fourier expansions of ((z-w)^n, q1^{n+1/2} z^n, q2^{1/2}(q2 z - w)^n);
/// negative-n expansions truncated at `fourier_order` terms (geometric tail).
std::vector<HardyElement> pants_hardy_basis(const ModuliPoint& x, int n_min, int n_max,
                                            int fourier_order);
std::vector<HardyElement> pants_perp_basis(const ModuliPoint& x, int n_min, int n_max,
                                           int fourier_order);

/// Richer constraint family from the holomorphic functions z^m (z-w)^n:
/// boundary data (z^m (z-w)^n, q1^{n+1/2} (q1 z + w)^m z^n,
/// q2^{m+1/2} z^m (q2 z - w)^n). Used to overdetermine the nullspace solve,
/// where the safe-window restriction thins out the one-parameter family.
std::vector<HardyElement> pants_hardy_products(const ModuliPoint& x, int mn_radius,
                                               int fourier_order);
std::vector<HardyElement> pants_perp_products(const ModuliPoint& x, int mn_radius, int fourier_order);

/// The orthogonal-complement transform h -> M_pm conj(M_z^{NS} h), applied
/// componentwise with the shape's sector and orientation data.
HardyElement perp_transform(const HardyElement& h, const SurfaceShape& shape);

struct CommutationReport {
  double max_residual = 0;
  std::vector<double> residuals;  // per supplied element
  int skipped = 0;                // elements whose safe window is empty
};

/// Residuals of a(f^1) T = (-1)^{p(T)} T a(f^0) over `elements` and
/// a(g^1)* T = -(-1)^{p(T)} T a(g^0)* over `perp_elements`, evaluated on
/// the safe energy window: domain columns whose image under the incoming
/// operators stays below the cutoff, codomain rows likewise under the
/// adjoints of the outgoing ones. Elements are normalized internally.
CommutationReport verify_commutation(const SurfaceOp& T, const std::vector<HardyElement>& elements,
                                     const std::vector<HardyElement>& perp_elements);

struct IntertwinerResult {
  GradedOperator op;               // least-singular-vector, reshaped
  Eigen::VectorXd singular_values;  // descending
  double sigma_min = 0, sigma_second = 0;
  double gap_ratio = 0;  // sigma_second / sigma_min (inf -> 1e300 cap)
  bool well_conditioned = true;
  std::string note;
};

/// Nullspace of the stacked commutation constraints; one-dimensionality is
/// certified by the gap between the two smallest singular values.
IntertwinerResult solve_intertwiner(const SurfaceShape& shape, const TruncationPtr& trunc,
                                    const std::vector<HardyElement>& elements,
                                    const std::vector<HardyElement>& perp_elements,
                                    int parity_sign = +1);

/// Sews inner's outgoing circle `out_slot` into outer's incoming circle
/// `in_slot` through the partial supertrace. Throws on sector mismatch or
/// when the sewn surface would be closed.
SurfaceOp sew(const SurfaceOp& outer, int in_slot, const SurfaceOp& inner, int out_slot);

/// Frobenius distance between a and b after normalizing and aligning phase.
double phase_aligned_distance(const Matrix& a, const Matrix& b);

/// Commutation data of the conjugate surface: the adjoint of an E(X)
/// element must satisfy these.
struct ConjugateSystem {
  SurfaceShape shape;
  std::vector<HardyElement> elements, perp_elements;
};
ConjugateSystem conjugate_system(const SurfaceShape& shape, const std::vector<HardyElement>& elements,
                                 const std::vector<HardyElement>& perp_elements);

std::string surface_report_json(const std::string& geometry, const std::string& moduli, HalfInt cutoff,
                                int band, const std::vector<double>& residuals,
                                const Eigen::VectorXd& singular_values, double runtime_sec);

}  // namespace fcft
