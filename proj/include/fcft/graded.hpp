#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "fcft/halfint.hpp"

namespace fcft {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Parity : std::uint8_t { even = 0, odd = 1, mixed = 2 };

inline Parity parity_sum(Parity a, Parity b) {
  if (a == Parity::mixed || b == Parity::mixed) return Parity::mixed;
  return static_cast<Parity>((static_cast<int>(a) + static_cast<int>(b)) % 2);
}

/// A finite-dimensional Z/2-graded space with a distinguished basis.
/// twice_energy carries the NS L0 spectrum when the space comes from a
/// Fock truncation; it is empty for generic graded spaces.
struct GradedSpace {
  std::vector<std::uint8_t> parity;
  std::vector<std::int64_t> twice_energy;  // empty when not energy-graded

  int dim() const { return static_cast<int>(parity.size()); }
  int dim_even() const;
  int dim_odd() const;
  bool has_energies() const { return !twice_energy.empty(); }

  /// Diagonal of the grading involution d: (-1)^{parity}.
  Vector involution_diag() const;
};

using SpacePtr = std::shared_ptr<const GradedSpace>;

SpacePtr make_space(std::vector<std::uint8_t> parity, std::vector<std::int64_t> twice_energy = {});
SpacePtr trivial_space();
/// Row-major composite: index (i,j) -> i*dim(b)+j, parities add mod 2.
SpacePtr tensor(const SpacePtr& a, const SpacePtr& b);
SpacePtr tensor(const std::vector<SpacePtr>& factors);

/// A matrix between graded spaces, tagged with parity and (when defined)
/// the NS-energy shift of every nonzero entry.
struct GradedOperator {
  Matrix mat;
  SpacePtr dom, cod;
  Parity parity = Parity::even;
  std::optional<HalfInt> weight_shift;  // nullopt = mixed

  int rows() const { return static_cast<int>(mat.rows()); }
  int cols() const { return static_cast<int>(mat.cols()); }

  GradedOperator adjoint() const;
  /// Parity/weight metadata consistency against the actual sparsity pattern.
  bool metadata_consistent(double tol = 1e-12) const;
};

GradedOperator identity_on(const SpacePtr& s);
GradedOperator grading_involution(const SpacePtr& s);
GradedOperator operator*(const GradedOperator& a, const GradedOperator& b);
GradedOperator operator+(const GradedOperator& a, const GradedOperator& b);
GradedOperator operator*(Complex c, const GradedOperator& a);

/// Graded tensor product x1 ⊗̂ x2 = x1 d^{p(x2)} ⊗ x2, extended linearly
/// to mixed-parity x2 by splitting into homogeneous parts.
GradedOperator graded_tensor(const GradedOperator& x1, const GradedOperator& x2);

/// Embeds a one-factor operator into slot `slot` of an n-factor space:
/// 1 ⊗̂ ... ⊗̂ x ⊗̂ ... ⊗̂ 1 (grading twists on the factors left of x).
GradedOperator embed_factor(const GradedOperator& x, const std::vector<SpacePtr>& factors, int slot);

/// Braiding unitary on ⊗ factors: target position t receives source factor
/// perm[t]; the sign counts inversions of odd-odd pairs.
Matrix braiding(const std::vector<SpacePtr>& factors, const std::vector<int>& perm);

/// Partial supertrace over the last tensor factor: x: H⊗L -> K⊗L maps to
/// tr_L(x (1 ⊗̂ d_L)): H -> K.
GradedOperator partial_supertrace(const GradedOperator& x, const SpacePtr& H, const SpacePtr& L,
                                  const SpacePtr& K);

/// Supertrace of an endomorphism: tr(x d).
Complex supertrace(const GradedOperator& x);

/// Composition through a shared factor L: x2: L⊗M -> N, x1: H -> K⊗L,
/// giving (x2 ⊗̂ 1_K)(1_M ⊗̂ x1) braided appropriately: M⊗H -> N⊗K.
/// Computes tr^s_L(x2 ⊗̂ x1) as well and checks the two routes agree.
GradedOperator compose_via_supertrace(const GradedOperator& x2, const SpacePtr& L, const SpacePtr& M,
                                      const SpacePtr& N, const GradedOperator& x1, const SpacePtr& H,
                                      const SpacePtr& K, double check_tol = 1e-12);

double operator_norm(const Matrix& m);

}  // namespace fcft
