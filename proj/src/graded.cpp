#include "fcft/graded.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace fcft {

int GradedSpace::dim_even() const {
  return static_cast<int>(std::count(parity.begin(), parity.end(), 0));
}

int GradedSpace::dim_odd() const {
  return static_cast<int>(std::count(parity.begin(), parity.end(), 1));
}

Vector GradedSpace::involution_diag() const {
  Vector d(dim());
  for (int i = 0; i < dim(); ++i) d(i) = parity[i] ? -1.0 : 1.0;
  return d;
}

SpacePtr make_space(std::vector<std::uint8_t> parity, std::vector<std::int64_t> twice_energy) {
  auto s = std::make_shared<GradedSpace>();
  s->parity = std::move(parity);
  s->twice_energy = std::move(twice_energy);
  if (s->has_energies() && s->twice_energy.size() != s->parity.size())
    throw std::invalid_argument("energy vector length mismatch");
  return s;
}

SpacePtr trivial_space() { return make_space({0}, {0}); }

SpacePtr tensor(const SpacePtr& a, const SpacePtr& b) {
  auto s = std::make_shared<GradedSpace>();
  const int da = a->dim(), db = b->dim();
  s->parity.resize(static_cast<size_t>(da) * db);
  const bool en = a->has_energies() && b->has_energies();
  if (en) s->twice_energy.resize(s->parity.size());
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) {
      const size_t ij = static_cast<size_t>(i) * db + j;
      s->parity[ij] = static_cast<std::uint8_t>((a->parity[i] + b->parity[j]) % 2);
      if (en) s->twice_energy[ij] = a->twice_energy[i] + b->twice_energy[j];
    }
  return s;
}

SpacePtr tensor(const std::vector<SpacePtr>& factors) {
  if (factors.empty()) return trivial_space();
  SpacePtr acc = factors[0];
  for (size_t i = 1; i < factors.size(); ++i) acc = tensor(acc, factors[i]);
  return acc;
}

GradedOperator identity_on(const SpacePtr& s) {
  return {Matrix::Identity(s->dim(), s->dim()), s, s, Parity::even, HalfInt{}};
}

GradedOperator grading_involution(const SpacePtr& s) {
  GradedOperator d{Matrix::Zero(s->dim(), s->dim()), s, s, Parity::even, HalfInt{}};
  d.mat.diagonal() = s->involution_diag();
  return d;
}

GradedOperator GradedOperator::adjoint() const {
  std::optional<HalfInt> ws;
  if (weight_shift) ws = -*weight_shift;
  return {mat.adjoint(), cod, dom, parity, ws};
}

bool GradedOperator::metadata_consistent(double tol) const {
  for (int r = 0; r < rows(); ++r)
    for (int c = 0; c < cols(); ++c) {
      if (std::abs(mat(r, c)) <= tol) continue;
      if (parity != Parity::mixed) {
        const int pc = (cod->parity[r] + dom->parity[c]) % 2;
        if (pc != static_cast<int>(parity)) return false;
      }
      if (weight_shift && cod->has_energies() && dom->has_energies()) {
        if (cod->twice_energy[r] - dom->twice_energy[c] != weight_shift->twice) return false;
      }
    }
  return true;
}

GradedOperator operator*(const GradedOperator& a, const GradedOperator& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("operator product dimension mismatch");
  std::optional<HalfInt> ws;
  if (a.weight_shift && b.weight_shift) ws = *a.weight_shift + *b.weight_shift;
  return {a.mat * b.mat, b.dom, a.cod, parity_sum(a.parity, b.parity), ws};
}

GradedOperator operator+(const GradedOperator& a, const GradedOperator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("operator sum dimension mismatch");
  Parity p = (a.parity == b.parity) ? a.parity : Parity::mixed;
  std::optional<HalfInt> ws;
  if (a.weight_shift && b.weight_shift && *a.weight_shift == *b.weight_shift) ws = a.weight_shift;
  return {a.mat + b.mat, a.dom, a.cod, p, ws};
}

GradedOperator operator*(Complex c, const GradedOperator& a) {
  return {c * a.mat, a.dom, a.cod, a.parity, a.weight_shift};
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Homogeneous component of x of parity p (entries connecting equal/opposite
// parities), zero elsewhere.
Matrix parity_part(const GradedOperator& x, int p) {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (int r = 0; r < x.rows(); ++r)
    for (int c = 0; c < x.cols(); ++c)
      if ((x.cod->parity[r] + x.dom->parity[c]) % 2 == p) out(r, c) = x.mat(r, c);
  return out;
}

}  // namespace

GradedOperator graded_tensor(const GradedOperator& x1, const GradedOperator& x2) {
  const Vector d1 = x1.dom->involution_diag();
  Matrix result;
  auto twisted = [&](const Matrix& m2, int p2) {
    Matrix m1 = x1.mat;
    if (p2 == 1)
      for (Eigen::Index c = 0; c < m1.cols(); ++c) m1.col(c) *= d1(c);
    return kron(m1, m2);
  };
  if (x2.parity != Parity::mixed) {
    result = twisted(x2.mat, static_cast<int>(x2.parity));
  } else {
    result = twisted(parity_part(x2, 0), 0) + twisted(parity_part(x2, 1), 1);
  }
  GradedOperator out;
  out.mat = std::move(result);
  out.dom = tensor(x1.dom, x2.dom);
  out.cod = tensor(x1.cod, x2.cod);
  out.parity = parity_sum(x1.parity, x2.parity);
  if (x1.weight_shift && x2.weight_shift) out.weight_shift = *x1.weight_shift + *x2.weight_shift;
  return out;
}

GradedOperator embed_factor(const GradedOperator& x, const std::vector<SpacePtr>& factors, int slot) {
  GradedOperator acc = (slot == 0) ? x : identity_on(factors[0]);
  if (slot == 0) {
    for (size_t i = 1; i < factors.size(); ++i) acc = graded_tensor(acc, identity_on(factors[i]));
    return acc;
  }
  for (size_t i = 1; i < factors.size(); ++i)
    acc = graded_tensor(acc, static_cast<int>(i) == slot ? x : identity_on(factors[i]));
  return acc;
}

Matrix braiding(const std::vector<SpacePtr>& factors, const std::vector<int>& perm) {
  const int n = static_cast<int>(factors.size());
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("braiding: bad permutation");
  std::vector<int> dims(n), pos_in_target(n);
  for (int i = 0; i < n; ++i) dims[i] = factors[i]->dim();
  for (int t = 0; t < n; ++t) pos_in_target[perm[t]] = t;

  int total = 1;
  for (int d : dims) total *= d;
  std::vector<int> tdims(n);
  for (int t = 0; t < n; ++t) tdims[t] = dims[perm[t]];

  Matrix out = Matrix::Zero(total, total);
  std::vector<int> idx(n, 0);
  for (int flat = 0; flat < total; ++flat) {
    // decode source multi-index (row-major)
    int rem = flat;
    for (int i = n - 1; i >= 0; --i) {
      idx[i] = rem % dims[i];
      rem /= dims[i];
    }
    // sign: inversions among odd-parity factors
    int sign = 1;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (pos_in_target[a] > pos_in_target[b] && factors[a]->parity[idx[a]] &&
            factors[b]->parity[idx[b]])
          sign = -sign;
    // encode target multi-index
    int tflat = 0;
    for (int t = 0; t < n; ++t) tflat = tflat * tdims[t] + idx[perm[t]];
    out(tflat, flat) = sign;
  }
  return out;
}

GradedOperator partial_supertrace(const GradedOperator& x, const SpacePtr& H, const SpacePtr& L,
                                  const SpacePtr& K) {
  const int dh = H->dim(), dl = L->dim(), dk = K->dim();
  if (x.cols() != dh * dl || x.rows() != dk * dl)
    throw std::invalid_argument("partial_supertrace: factor mismatch");
  Matrix out = Matrix::Zero(dk, dh);
  for (int l = 0; l < dl; ++l) {
    const double sgn = L->parity[l] ? -1.0 : 1.0;
    for (int k = 0; k < dk; ++k)
      for (int h = 0; h < dh; ++h) out(k, h) += sgn * x.mat(k * dl + l, h * dl + l);
  }
  GradedOperator res;
  res.mat = std::move(out);
  res.dom = H;
  res.cod = K;
  res.parity = x.parity;
  res.weight_shift = x.weight_shift;
  return res;
}

Complex supertrace(const GradedOperator& x) {
  if (x.rows() != x.cols()) throw std::invalid_argument("supertrace: not an endomorphism");
  Complex t = 0;
  for (int i = 0; i < x.rows(); ++i) t += x.mat(i, i) * (x.dom->parity[i] ? -1.0 : 1.0);
  return t;
}

GradedOperator compose_via_supertrace(const GradedOperator& x2, const SpacePtr& L, const SpacePtr& M,
                                      const SpacePtr& N, const GradedOperator& x1, const SpacePtr& H,
                                      const SpacePtr& K, double check_tol) {
  if (x2.cols() != L->dim() * M->dim() || x2.rows() != N->dim())
    throw std::invalid_argument("compose_via_supertrace: x2 factor mismatch");
  if (x1.cols() != H->dim() || x1.rows() != K->dim() * L->dim())
    throw std::invalid_argument("compose_via_supertrace: x1 factor mismatch");

  // Right-hand route: (x2 ⊗̂ 1_K) ∘ β' ∘ (1_M ⊗̂ x1), with β': M⊗K⊗L -> L⊗M⊗K.
  GradedOperator lhs_lift = graded_tensor(identity_on(M), x1);  // M⊗H -> M⊗K⊗L
  Matrix beta = braiding({M, K, L}, {2, 0, 1});                 // target gets (L, M, K)
  GradedOperator x2_ext = graded_tensor(x2, identity_on(K));    // L⊗M⊗K -> N⊗K
  Matrix rhs = x2_ext.mat * beta * lhs_lift.mat;

  // Left-hand route: tr^s over L of x2 ⊗̂ x1: L⊗M⊗H -> N⊗K⊗L, braiding the
  // domain factor L to the last position first.
  GradedOperator big = graded_tensor(x2, x1);
  Matrix beta_dom = braiding({M, H, L}, {2, 0, 1});  // M⊗H⊗L -> L⊗M⊗H
  GradedOperator braided{big.mat * beta_dom, tensor({M, H, L}), big.cod, big.parity, big.weight_shift};
  GradedOperator traced = partial_supertrace(braided, tensor(M, H), L, tensor(N, K));

  const double diff = (traced.mat - rhs).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  if (diff > check_tol * scale)
    throw std::runtime_error("compose_via_supertrace: routes disagree, diff=" + std::to_string(diff));

  GradedOperator out;
  out.mat = std::move(rhs);
  out.dom = tensor(M, H);
  out.cod = tensor(N, K);
  out.parity = parity_sum(x2.parity, x1.parity);
  if (x2.weight_shift && x1.weight_shift) out.weight_shift = *x2.weight_shift + *x1.weight_shift;
  return out;
}

double operator_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (m.rows() * m.cols() <= 64 * 64)
    return m.jacobiSvd().singularValues()(0);
  // power iteration on m†m, deterministic start
  Vector v = Vector::Ones(m.cols());
  v.normalize();
  double lam = 0;
  for (int it = 0; it < 200; ++it) {
    Vector w = m.adjoint() * (m * v);
    double nl = w.norm();
    if (nl == 0) return 0.0;
    w /= nl;
    if (std::abs(nl - lam) <= 1e-13 * std::max(1.0, nl) && it > 4) {
      lam = nl;
      break;
    }
    lam = nl;
    v = w;
  }
  return std::sqrt(lam);
}

}  // namespace fcft
