#pragma once

#include <map>
#include <shared_mutex>
#include <vector>

#include "fcft/car.hpp"
#include "fcft/fock.hpp"

namespace fcft {

/// One generator application a(z^k) (starred=false) or a(z^k)* (starred=true).
struct GeneratorApp {
  int k = 0;
  bool starred = false;
  auto operator<=>(const GeneratorApp&) const = default;
};

/// A word of generator applications; the state it builds is word * Omega,
/// applied right to left.
struct StateWord {
  std::vector<GeneratorApp> word;

  static StateWord from_basis(const BasisState& s);  // canonical creation word
  int parity() const { return static_cast<int>(word.size() % 2); }
  /// NS energy of the built state (sum of generator weight shifts).
  HalfInt weight() const;
  bool creation_only() const;  // every entry raises energy

  auto operator<=>(const StateWord&) const = default;
};

/// Exact integer n(n-1)...(n-j+1)/j! for arbitrary integer n, j >= 0.
long long generalized_binomial(long long n, long long j);

/// Coordinates of word * Omega in the truncation (components above the
/// cutoff are dropped).
Vector state_vector(const StateWord& w, const FockTruncation& trunc);

struct FieldSeriesResult {
  GradedOperator op;                       // partial sum over the band
  std::map<int, double> band_norms;        // n -> |z|^{-n-1} * ||mode_n||
  double last_band_norm = 0;               // convergence diagnostic
};

/// Modes of vertex-operator fields on the fermionic Fock space, built from
/// the product recursion seeded by the two generating fields. Actions are
/// evaluated exactly at the level of basis states (no intermediate
/// compression), so a returned matrix is the true compression of the mode
/// to the truncation. Results are memoized per (word, m, state).
class VertexEngine {
 public:
  using SparseVec = std::map<BasisState, double>;

  /// Exact action of the m-th mode of `w` on a basis state.
  const SparseVec& action(const StateWord& w, int m, const BasisState& v);

  /// Compression of the mode to the truncation; parity = parity(w),
  /// weight shift = weight(w) - m - 1.
  GradedOperator mode(const StateWord& w, int m, const TruncationPtr& trunc);

  /// Partial sum of Y(w, z) = sum_n mode(w, n) z^{-n-1} over n in
  /// [n_lo, n_hi], with per-band norm diagnostics.
  FieldSeriesResult field_series(const StateWord& w, Complex z, const TruncationPtr& trunc, int n_lo,
                                 int n_hi);

  std::size_t memo_size() const;

 private:
  struct Key {
    std::vector<GeneratorApp> word;
    int m;
    BasisState v;
    auto operator<=>(const Key&) const = default;
  };

  SparseVec compute(const StateWord& w, int m, const BasisState& v);

  std::map<Key, SparseVec> memo_;
  mutable std::shared_mutex mu_;
};

}  // namespace fcft
