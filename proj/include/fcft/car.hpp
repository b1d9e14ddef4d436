#pragma once

#include <complex>
#include <map>

#include "fcft/fock.hpp"
#include "fcft/graded.hpp"

namespace fcft {

/// Trigonometric polynomial on the circle: finitely supported map n -> c_n
/// for f = sum c_n z^n.
struct CircleFunction {
  std::map<int, Complex> coeffs;

  static CircleFunction monomial(int n, Complex c = 1.0);
  double norm() const;  // L2(S^1) norm
  CircleFunction conj() const;
  CircleFunction& operator*=(Complex c);
  /// Multiplication by z^k.
  CircleFunction shifted(int k) const;
};

inline Complex inner(const CircleFunction& f, const CircleFunction& g) {
  Complex s = 0;
  for (const auto& [n, c] : f.coeffs) {
    auto it = g.coeffs.find(n);
    if (it != g.coeffs.end()) s += c * std::conj(it->second);
  }
  return s;
}

/// Result of one CAR generator applied to a basis state: zero or a signed
/// basis state.
struct ModeResult {
  bool zero = true;
  int sign = 1;
  BasisState state;
};

/// Action of a(z^k) (starred=false) or a(z^k)* (starred=true) in the
/// representation pi_p on the canonical basis. The sign is (-1)^(number of
/// canonical-order generators preceding the insertion/removal slot).
ModeResult apply_mode(int k, bool starred, const BasisState& s);

/// NS weight shift of the mode: -(k+1/2) unstarred, +(k+1/2) starred.
inline HalfInt mode_weight_shift(int k, bool starred) {
  return HalfInt::from_twice(starred ? (2 * k + 1) : -(2 * k + 1));
}

/// Compression of the mode to the truncation. Odd parity.
GradedOperator mode_matrix(int k, bool starred, const TruncationPtr& trunc);

/// Smeared operator: a(f) = sum c_k a(z^k); for starred the coefficients are
/// conjugated so that smeared(f, starred) == smeared(f).adjoint().
GradedOperator smeared(const CircleFunction& f, bool starred, const TruncationPtr& trunc);

}  // namespace fcft
