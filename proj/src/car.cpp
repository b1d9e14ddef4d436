#include "fcft/car.hpp"

#include <algorithm>
#include <cmath>

namespace fcft {

CircleFunction CircleFunction::monomial(int n, Complex c) {
  CircleFunction f;
  f.coeffs[n] = c;
  return f;
}

double CircleFunction::norm() const {
  double s = 0;
  for (const auto& [n, c] : coeffs) s += std::norm(c);
  return std::sqrt(s);
}

CircleFunction CircleFunction::conj() const {
  CircleFunction f;
  for (const auto& [n, c] : coeffs) f.coeffs[n] = std::conj(c);
  return f;
}

CircleFunction& CircleFunction::operator*=(Complex c) {
  for (auto& [n, v] : coeffs) v *= c;
  return *this;
}

CircleFunction CircleFunction::shifted(int k) const {
  CircleFunction f;
  for (const auto& [n, c] : coeffs) f.coeffs[n + k] = c;
  return f;
}

ModeResult apply_mode(int k, bool starred, const BasisState& s) {
  ModeResult r;
  const int p = static_cast<int>(s.neg.size());
  if (!starred && k < 0) {
    // wedge z^k in front: insert into neg (stored descending)
    auto it = std::find_if(s.neg.begin(), s.neg.end(), [&](int n) { return n <= k; });
    if (it != s.neg.end() && *it == k) return r;  // already occupied
    const int slot = static_cast<int>(it - s.neg.begin());
    r.zero = false;
    r.sign = (slot % 2) ? -1 : 1;
    r.state = s;
    r.state.neg.insert(r.state.neg.begin() + slot, k);
  } else if (!starred && k >= 0) {
    // interior product: remove star mode k
    auto it = std::find(s.star.begin(), s.star.end(), k);
    if (it == s.star.end()) return r;
    const int slot = p + static_cast<int>(it - s.star.begin());
    r.zero = false;
    r.sign = (slot % 2) ? -1 : 1;
    r.state = s;
    r.state.star.erase(r.state.star.begin() + (it - s.star.begin()));
  } else if (starred && k >= 0) {
    // wedge (z^k)*: insert into star (stored ascending)
    auto it = std::lower_bound(s.star.begin(), s.star.end(), k);
    if (it != s.star.end() && *it == k) return r;
    const int slot = p + static_cast<int>(it - s.star.begin());
    r.zero = false;
    r.sign = (slot % 2) ? -1 : 1;
    r.state = s;
    r.state.star.insert(r.state.star.begin() + (it - s.star.begin()), k);
  } else {
    // starred, k < 0: remove neg mode k
    auto it = std::find(s.neg.begin(), s.neg.end(), k);
    if (it == s.neg.end()) return r;
    const int slot = static_cast<int>(it - s.neg.begin());
    r.zero = false;
    r.sign = (slot % 2) ? -1 : 1;
    r.state = s;
    r.state.neg.erase(r.state.neg.begin() + slot);
  }
  return r;
}

GradedOperator mode_matrix(int k, bool starred, const TruncationPtr& trunc) {
  GradedOperator op{Matrix::Zero(trunc->dim(), trunc->dim()), trunc->space, trunc->space, Parity::odd,
                    mode_weight_shift(k, starred)};
  for (int c = 0; c < trunc->dim(); ++c) {
    const ModeResult r = apply_mode(k, starred, trunc->basis[c]);
    if (r.zero) continue;
    const int row = trunc->index_of(r.state);
    if (row >= 0) op.mat(row, c) = static_cast<double>(r.sign);
  }
  return op;
}

GradedOperator smeared(const CircleFunction& f, bool starred, const TruncationPtr& trunc) {
  GradedOperator op{Matrix::Zero(trunc->dim(), trunc->dim()), trunc->space, trunc->space, Parity::odd,
                    std::nullopt};
  bool first = true;
  std::optional<HalfInt> shift;
  for (const auto& [k, c] : f.coeffs) {
    if (c == Complex(0.0)) continue;
    const Complex amp = starred ? std::conj(c) : c;
    GradedOperator m = mode_matrix(k, starred, trunc);
    op.mat += amp * m.mat;
    if (first) {
      shift = m.weight_shift;
      first = false;
    } else if (shift != m.weight_shift) {
      shift.reset();
    }
  }
  op.weight_shift = shift;
  return op;
}

}  // namespace fcft
