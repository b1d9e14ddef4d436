#include "fcft/vertex.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace fcft {

StateWord StateWord::from_basis(const BasisState& s) {
  StateWord w;
  for (int n : s.neg) w.word.push_back({n, false});
  for (int m : s.star) w.word.push_back({m, true});
  return w;
}

HalfInt StateWord::weight() const {
  HalfInt h{};
  for (const auto& g : word) h = h + mode_weight_shift(g.k, g.starred);
  return h;
}

bool StateWord::creation_only() const {
  for (const auto& g : word)
    if (mode_weight_shift(g.k, g.starred).twice <= 0) return false;
  return true;
}

long long generalized_binomial(long long n, long long j) {
  if (j < 0) throw std::invalid_argument("generalized_binomial: j must be >= 0");
  if (j == 0) return 1;
  // negative upper index: C(n,j) = (-1)^j C(j-n-1, j)
  if (n < 0) {
    const long long c = generalized_binomial(j - n - 1, j);
    return (j % 2) ? -c : c;
  }
  if (j > n) return 0;
  long long acc = 1;
  for (long long i = 1; i <= j; ++i) acc = acc * (n - j + i) / i;
  return acc;
}

Vector state_vector(const StateWord& w, const FockTruncation& trunc) {
  // apply generators right to left, exactly
  std::map<BasisState, double> vec{{BasisState{}, 1.0}};
  for (auto it = w.word.rbegin(); it != w.word.rend(); ++it) {
    std::map<BasisState, double> next;
    for (const auto& [s, c] : vec) {
      const ModeResult r = apply_mode(it->k, it->starred, s);
      if (!r.zero) next[r.state] += c * r.sign;
    }
    vec.swap(next);
  }
  Vector out = Vector::Zero(trunc.dim());
  for (const auto& [s, c] : vec) {
    const int i = trunc.index_of(s);
    if (i >= 0) out(i) = c;
  }
  return out;
}

namespace {

// The mode eta_i of the generating field attached to `head`:
// unstarred head -> a(z^i); starred head -> a(z^{-i-1})*.
ModeResult apply_eta(const GeneratorApp& head, int i, const BasisState& v) {
  return head.starred ? apply_mode(-i - 1, true, v) : apply_mode(i, false, v);
}

Complex ipow(Complex z, int k) {
  Complex acc = 1.0;
  Complex base = (k >= 0) ? z : 1.0 / z;
  for (int i = 0; i < std::abs(k); ++i) acc *= base;
  return acc;
}

}  // namespace

const VertexEngine::SparseVec& VertexEngine::action(const StateWord& w, int m, const BasisState& v) {
  Key key{w.word, m, v};
  {
    std::shared_lock lk(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  SparseVec computed = compute(w, m, v);
  std::unique_lock lk(mu_);
  auto [it, inserted] = memo_.emplace(std::move(key), std::move(computed));
  return it->second;
}

VertexEngine::SparseVec VertexEngine::compute(const StateWord& w, int m, const BasisState& v) {
  SparseVec out;
  if (w.word.empty()) {
    if (m == -1) out[v] = 1.0;
    return out;
  }
  const GeneratorApp head = w.word.front();
  StateWord tail;
  tail.word.assign(w.word.begin() + 1, w.word.end());
  const int n = head.starred ? (-head.k - 1) : head.k;
  const int p_tail = tail.parity();
  // (-1)^{p(eta) p(tail) + n} with p(eta) = 1
  const double sign2 = (((p_tail + n) % 2 + 2) % 2) ? -1.0 : 1.0;
  const std::int64_t ev = energy(v, Sector::NS).twice;
  const std::int64_t ht = tail.weight().twice;

  // First sum: eta_{n-j} (tail)_{m+j}. The tail mode output sits at energy
  // ev + ht - 2(m+j) - 2 (twice), so larger j act as zero.
  std::int64_t jcap = (ev + ht - 2 * static_cast<std::int64_t>(m) - 2) / 2;
  if (n >= 0) jcap = std::min<std::int64_t>(jcap, n);
  for (std::int64_t j = 0; j <= jcap; ++j) {
    const long long cnj = generalized_binomial(n, j);
    if (cnj == 0) continue;
    const double coeff = (j % 2 ? -1.0 : 1.0) * static_cast<double>(cnj);
    const SparseVec& t = action(tail, m + static_cast<int>(j), v);
    for (const auto& [u, cu] : t) {
      const ModeResult r = apply_eta(head, n - static_cast<int>(j), u);
      if (!r.zero) out[r.state] += coeff * cu * r.sign;
    }
  }

  // Second sum: -(+-) (tail)_{m+n-j} eta_j. For j >= 0 the generator mode
  // eta_j only removes an occupied mode of v, so j runs over the occupation.
  std::vector<int> js;
  if (!head.starred) {
    js.assign(v.star.begin(), v.star.end());  // a(z^j) removes star j
  } else {
    for (int nn : v.neg) js.push_back(-nn - 1);  // a(z^{-j-1})* removes neg -j-1
  }
  for (int j : js) {
    if (n >= 0 && j > n) continue;
    const long long cnj = generalized_binomial(n, j);
    if (cnj == 0) continue;
    const ModeResult r = apply_eta(head, j, v);
    if (r.zero) continue;
    const double coeff = -sign2 * (j % 2 ? -1.0 : 1.0) * static_cast<double>(cnj) * r.sign;
    const SparseVec& t = action(tail, m + n - j, r.state);
    for (const auto& [u, cu] : t) out[u] += coeff * cu;
  }

  for (auto it = out.begin(); it != out.end();)
    it = (it->second == 0.0) ? out.erase(it) : std::next(it);
  return out;
}

GradedOperator VertexEngine::mode(const StateWord& w, int m, const TruncationPtr& trunc) {
  GradedOperator op{Matrix::Zero(trunc->dim(), trunc->dim()), trunc->space, trunc->space,
                    w.parity() ? Parity::odd : Parity::even,
                    w.weight() - HalfInt::whole(m) - HalfInt::whole(1)};
  // skip assembly when the weight shift cannot connect two truncated states
  if (std::abs(op.weight_shift->twice) > 2 * trunc->cutoff.twice) return op;
  for (int c = 0; c < trunc->dim(); ++c) {
    const SparseVec& act = action(w, m, trunc->basis[c]);
    for (const auto& [s, coef] : act) {
      const int r = trunc->index_of(s);
      if (r >= 0) op.mat(r, c) = coef;
    }
  }
  return op;
}

FieldSeriesResult VertexEngine::field_series(const StateWord& w, Complex z, const TruncationPtr& trunc,
                                             int n_lo, int n_hi) {
  if (n_lo > n_hi) throw std::invalid_argument("field_series: empty band");
  const double az = std::abs(z);
  if (!(az > 0.0) || az >= 1.0)
    throw std::invalid_argument("field_series: the point must satisfy 0 < |z| < 1");
  FieldSeriesResult res;
  res.op = GradedOperator{Matrix::Zero(trunc->dim(), trunc->dim()), trunc->space, trunc->space,
                          w.parity() ? Parity::odd : Parity::even, std::nullopt};
  for (int n = n_lo; n <= n_hi; ++n) {
    const GradedOperator mn = mode(w, n, trunc);
    const Complex zpow = ipow(z, -n - 1);
    res.op.mat += zpow * mn.mat;
    res.band_norms[n] = std::abs(zpow) * operator_norm(mn.mat);
  }
  res.last_band_norm = std::max(res.band_norms[n_lo], res.band_norms[n_hi]);
  return res;
}

std::size_t VertexEngine::memo_size() const {
  std::shared_lock lk(mu_);
  return memo_.size();
}

}  // namespace fcft
