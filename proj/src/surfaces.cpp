#include "fcft/surfaces.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fcft {

namespace {

Complex ipow(Complex z, int k) {
  Complex acc = 1.0;
  Complex base = (k >= 0) ? z : 1.0 / z;
  for (int i = 0; i < std::abs(k); ++i) acc *= base;
  return acc;
}

void check_sqrt(Complex s, Complex q, const char* what) {
  if (std::abs(s * s - q) > 1e-12 * std::max(1.0, std::abs(q)))
    throw std::invalid_argument(std::string(what) + ": square root does not square to the modulus");
}

}  // namespace

bool ModuliPoint::valid() const {
  const double aw = std::abs(w), a1 = std::abs(q1), a2 = std::abs(q2);
  return a1 + a2 > 0 && a1 + a2 < aw && aw < 1.0 - a1 && a1 > 0 && a2 > 0;
}

void ModuliPoint::validate() const {
  if (!valid())
    throw std::invalid_argument("moduli violation: need 0 < |q1|+|q2| < |w| < 1-|q1|");
  check_sqrt(q1_sqrt, q1, "q1");
  check_sqrt(q2_sqrt, q2, "q2");
}

ModuliPoint ModuliPoint::conjugated() const {
  return {std::conj(w), std::conj(q1), std::conj(q1_sqrt), std::conj(q2), std::conj(q2_sqrt)};
}

void AnnulusPoint::validate(bool allow_unit_modulus) const {
  const double aq = std::abs(q);
  if (!(aq > 0) || aq > 1.0 || (!allow_unit_modulus && aq >= 1.0))
    throw std::invalid_argument("annulus modulus must satisfy 0 < |q| < 1");
  if (sector == Sector::NS) check_sqrt(q_sqrt, q, "q");
}

AnnulusPoint AnnulusPoint::conjugated() const {
  return {std::conj(q), std::conj(q_sqrt), sector};
}

Complex q_power(Complex q_sqrt, HalfInt e) {
  return ipow(q_sqrt, static_cast<int>(e.twice));
}

Vector disk_vacuum(const FockTruncation& trunc) {
  Vector v = Vector::Zero(trunc.dim());
  v(0) = 1.0;
  return v;
}

SurfaceOp disk_op(const TruncationPtr& trunc) {
  GradedOperator op;
  op.mat = disk_vacuum(*trunc);
  op.dom = trivial_space();
  op.cod = trunc->space;
  op.parity = Parity::even;
  op.weight_shift = HalfInt{};
  return {op, {{Sector::NS}, {}}, trunc};
}

GradedOperator annulus_operator(const AnnulusPoint& a, const TruncationPtr& trunc) {
  a.validate(true);
  GradedOperator op{Matrix::Zero(trunc->dim(), trunc->dim()), trunc->space, trunc->space, Parity::even,
                    HalfInt{}};
  for (int i = 0; i < trunc->dim(); ++i) {
    const HalfInt e = energy(trunc->basis[i], a.sector);
    op.mat(i, i) = (a.sector == Sector::NS) ? q_power(a.q_sqrt, e) : ipow(a.q, static_cast<int>(e.twice / 2));
  }
  return op;
}

SurfaceOp annulus_op(const AnnulusPoint& a, const TruncationPtr& trunc) {
  return {annulus_operator(a, trunc), {{a.sector}, {a.sector}}, trunc};
}

PantsResult pants_operator(const ModuliPoint& x, const TruncationPtr& trunc, int band_lo, int band_hi,
                           VertexEngine& engine) {
  x.validate();
  if (band_lo > band_hi) throw std::invalid_argument("pants_operator: empty band");
  const int D = trunc->dim();
  const SpacePtr dom = tensor(trunc->space, trunc->space);

  Vector q2diag(D);
  for (int i = 0; i < D; ++i) q2diag(i) = q_power(x.q2_sqrt, energy(trunc->basis[i], Sector::NS));

  PantsResult res;
  res.surface.op = GradedOperator{Matrix::Zero(D, D * D), dom, trunc->space, Parity::even, std::nullopt};
  res.surface.shape = {{Sector::NS}, {Sector::NS, Sector::NS}};
  res.surface.trunc = trunc;

  Matrix term(D, D * D);
  for (int n = band_lo; n <= band_hi; ++n) {
    term.setZero();
    const Complex wpow = ipow(x.w, -n - 1);
    bool nonzero = false;
    for (int ix = 0; ix < D; ++ix) {
      const BasisState& xi = trunc->basis[ix];
      const HalfInt h = energy(xi, Sector::NS);
      // mode weight shift h - n - 1 must connect truncated energies
      if (std::abs(h.twice - 2 * n - 2) > 2 * trunc->cutoff.twice) continue;
      const GradedOperator mn = engine.mode(StateWord::from_basis(xi), n, trunc);
      if (mn.mat.isZero(0)) continue;
      nonzero = true;
      const Complex scale = q_power(x.q1_sqrt, h) * wpow;
      term.block(0, ix * D, D, D) = scale * (mn.mat * q2diag.asDiagonal());
    }
    res.term_norms[n] = nonzero ? operator_norm(term) : 0.0;
    res.surface.op.mat += term;
  }
  return res;
}

double HardyElement::norm() const {
  double s = 0;
  for (const auto& p : parts) s += p.norm() * p.norm();
  return std::sqrt(s);
}

std::vector<HardyElement> disk_hardy_basis(int n_max) {
  std::vector<HardyElement> out;
  for (int n = 0; n <= n_max; ++n) out.push_back({{CircleFunction::monomial(n)}});
  return out;
}

std::vector<HardyElement> disk_perp_basis(int n_max) {
  std::vector<HardyElement> out;
  for (int n = -1; n >= -n_max; --n) out.push_back({{CircleFunction::monomial(n)}});
  return out;
}

std::vector<HardyElement> annulus_hardy_basis(const AnnulusPoint& a, int n_min, int n_max) {
  // boundary values of z^n: (z^n, q^{n+1/2} z^n) in NS, (z^n, q^n z^n) in R,
  // outgoing circle first
  std::vector<HardyElement> out;
  for (int n = n_min; n <= n_max; ++n) {
    HardyElement e;
    e.parts.push_back(CircleFunction::monomial(n));
    e.parts.push_back(CircleFunction::monomial(
        n, a.sector == Sector::NS ? ipow(a.q_sqrt, 2 * n + 1) : ipow(a.q, n)));
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<HardyElement> annulus_perp_basis(const AnnulusPoint& a, int n_min, int n_max) {
  std::vector<HardyElement> out;
  for (int n = n_min; n <= n_max; ++n) {
    HardyElement e;
    e.parts.push_back(CircleFunction::monomial(n));
    e.parts.push_back(CircleFunction::monomial(
        n, a.sector == Sector::NS ? -ipow(std::conj(a.q_sqrt), -(2 * n + 1))
                                  : -ipow(std::conj(a.q), -n)));
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

// (a z - b)^n as a truncated Laurent polynomial on |z| = 1, by the binomial
// series with small part a z. For n >= 0 exact; for n < 0 valid when
// |a| < |b|, truncated at `order` terms.
CircleFunction binomial_expansion(Complex a, Complex b, int n, int order) {
  CircleFunction f;
  const int top = (n >= 0) ? n : order;
  for (int j = 0; j <= top; ++j)
    f.coeffs[j] = static_cast<double>(generalized_binomial(n, j)) * ipow(a, j) * ipow(-b, n - j);
  return f;
}

// (z - w)^n on |z| = 1; for n < 0 expanded in w/z.
CircleFunction outer_expansion(Complex w, int n, int order) {
  CircleFunction f;
  if (n >= 0) {
    for (int k = 0; k <= n; ++k)
      f.coeffs[k] = static_cast<double>(generalized_binomial(n, k)) * ipow(-w, n - k);
  } else {
    for (int j = 0; j <= order; ++j)
      f.coeffs[n - j] = static_cast<double>(generalized_binomial(n, j)) * ipow(-w, j);
  }
  return f;
}

}  // namespace

std::vector<HardyElement> pants_hardy_basis(const ModuliPoint& x, int n_min, int n_max,
                                            int fourier_order) {
  std::vector<HardyElement> out;
  for (int n = n_min; n <= n_max; ++n) {
    HardyElement e;
    e.parts.push_back(outer_expansion(x.w, n, fourier_order));
    e.parts.push_back(CircleFunction::monomial(n, ipow(x.q1_sqrt, 2 * n + 1)));
    CircleFunction inner = binomial_expansion(x.q2, x.w, n, fourier_order);
    inner *= x.q2_sqrt;
    e.parts.push_back(std::move(inner));
    out.push_back(std::move(e));
  }
  return out;
}

HardyElement perp_transform(const HardyElement& h, const SurfaceShape& shape) {
  HardyElement out;
  const int n_out = shape.n_out();
  for (size_t j = 0; j < h.parts.size(); ++j) {
    const Sector sec = j < static_cast<size_t>(n_out) ? shape.out_sectors[j]
                                                      : shape.in_sectors[j - n_out];
    CircleFunction f = (sec == Sector::NS) ? h.parts[j].shifted(1) : h.parts[j];
    // conjugate as a function on the circle: sum conj(c_k) z^{-k}
    CircleFunction g;
    for (const auto& [k, c] : f.coeffs) g.coeffs[-k] = std::conj(c);
    if (j >= static_cast<size_t>(n_out)) g *= -1.0;
    out.parts.push_back(std::move(g));
  }
  return out;
}

std::vector<HardyElement> pants_perp_basis(const ModuliPoint& x, int n_min, int n_max,
                                           int fourier_order) {
  const SurfaceShape shape{{Sector::NS}, {Sector::NS, Sector::NS}};
  std::vector<HardyElement> out;
  for (const auto& h : pants_hardy_basis(x, n_min, n_max, fourier_order))
    out.push_back(perp_transform(h, shape));
  return out;
}

std::vector<HardyElement> pants_hardy_products(const ModuliPoint& x, int mn_radius,
                                               int fourier_order) {
  std::vector<HardyElement> out;
  for (int m = -mn_radius; m <= mn_radius; ++m)
    for (int n = -mn_radius; n <= mn_radius; ++n) {
      HardyElement e;
      e.parts.push_back(outer_expansion(x.w, n, fourier_order).shifted(m));
      CircleFunction at_w = binomial_expansion(x.q1, -x.w, m, fourier_order).shifted(n);
      at_w *= ipow(x.q1_sqrt, 2 * n + 1);
      e.parts.push_back(std::move(at_w));
      CircleFunction at_0 = binomial_expansion(x.q2, x.w, n, fourier_order).shifted(m);
      at_0 *= ipow(x.q2_sqrt, 2 * m + 1);
      e.parts.push_back(std::move(at_0));
      out.push_back(std::move(e));
    }
  return out;
}

std::vector<HardyElement> pants_perp_products(const ModuliPoint& x, int mn_radius,
                                              int fourier_order) {
  const SurfaceShape shape{{Sector::NS}, {Sector::NS, Sector::NS}};
  std::vector<HardyElement> out;
  for (const auto& h : pants_hardy_products(x, mn_radius, fourier_order))
    out.push_back(perp_transform(h, shape));
  return out;
}

namespace {

// Largest positive NS weight shift over the support of the smeared operator;
// the safe window keeps domain states whose image stays under the cutoff.
std::int64_t max_raise_twice(const CircleFunction& f, bool starred) {
  std::int64_t r = 0;
  for (const auto& [k, c] : f.coeffs) {
    if (c == Complex(0.0)) continue;
    r = std::max(r, mode_weight_shift(k, starred).twice);
  }
  return r;
}

struct ElementOps {
  Matrix lhs;                           // sum over outgoing factors of embedded a(f)
  Matrix rhs;                           // sum over incoming factors
  std::vector<std::int64_t> raise_in;   // per incoming factor
  std::vector<std::int64_t> raise_out;  // per outgoing factor (adjoint raise)
};

ElementOps element_operators(const SurfaceOp& T, const HardyElement& e, bool starred) {
  const int n_out = T.shape.n_out(), n_in = T.shape.n_in();
  if (static_cast<int>(e.parts.size()) != n_out + n_in)
    throw std::invalid_argument("hardy element does not match surface shape");
  std::vector<SpacePtr> out_factors(n_out, T.trunc->space), in_factors(n_in, T.trunc->space);
  ElementOps ops;
  ops.lhs = Matrix::Zero(T.op.rows(), T.op.rows());
  ops.rhs = Matrix::Zero(T.op.cols(), T.op.cols());
  for (int j = 0; j < n_out; ++j) {
    const GradedOperator a = smeared(e.parts[j], starred, T.trunc);
    ops.lhs += embed_factor(a, out_factors, j).mat;
    // the adjoint of the codomain operator must not leave the truncation
    ops.raise_out.push_back(max_raise_twice(e.parts[j], !starred));
  }
  for (int j = 0; j < n_in; ++j) {
    const GradedOperator a = smeared(e.parts[n_out + j], starred, T.trunc);
    ops.rhs += embed_factor(a, in_factors, j).mat;
    ops.raise_in.push_back(max_raise_twice(e.parts[n_out + j], starred));
  }
  return ops;
}

// Multi-indices (row-major over `n_factors` truncation factors) whose
// per-factor energy plus the matching raise stays under the cutoff.
std::vector<int> safe_indices(const TruncationPtr& trunc, int n_factors, int total,
                              const std::vector<std::int64_t>& raises) {
  const int D = trunc->dim();
  std::vector<int> keep;
  for (int c = 0; c < total; ++c) {
    int rem = c;
    bool ok = true;
    for (int j = n_factors - 1; j >= 0; --j) {
      const int ij = rem % D;
      rem /= D;
      if (trunc->space->twice_energy[ij] + raises[j] > trunc->cutoff.twice) {
        ok = false;
        break;
      }
    }
    if (ok) keep.push_back(c);
  }
  return keep;
}

double parity_sign_of(const GradedOperator& op) {
  if (op.parity == Parity::odd) return -1.0;
  return 1.0;
}

}  // namespace

CommutationReport verify_commutation(const SurfaceOp& T, const std::vector<HardyElement>& elements,
                                     const std::vector<HardyElement>& perp_elements) {
  CommutationReport rep;
  const double pt = parity_sign_of(T.op);
  auto run = [&](const HardyElement& el, bool starred) {
    const double nrm = el.norm();
    if (nrm == 0) return;
    const ElementOps ops = element_operators(T, el, starred);
    const double eps = starred ? -pt : pt;
    Matrix diff = ops.lhs * T.op.mat - eps * (T.op.mat * ops.rhs);
    diff /= nrm;
    const std::vector<int> cols = safe_indices(T.trunc, T.shape.n_in(), T.op.cols(), ops.raise_in);
    const std::vector<int> rows = safe_indices(T.trunc, T.shape.n_out(), T.op.rows(), ops.raise_out);
    if (cols.empty() || rows.empty()) {
      ++rep.skipped;
      return;
    }
    Matrix restricted(rows.size(), cols.size());
    for (size_t r = 0; r < rows.size(); ++r)
      for (size_t c = 0; c < cols.size(); ++c) restricted(r, c) = diff(rows[r], cols[c]);
    const double r = operator_norm(restricted);
    rep.residuals.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
  };
  for (const auto& el : elements) run(el, false);
  for (const auto& el : perp_elements) run(el, true);
  return rep;
}

IntertwinerResult solve_intertwiner(const SurfaceShape& shape, const TruncationPtr& trunc,
                                    const std::vector<HardyElement>& elements,
                                    const std::vector<HardyElement>& perp_elements, int parity_sign) {
  const int D = trunc->dim();
  int Dc = 1, Dd = 1;
  for (int j = 0; j < shape.n_out(); ++j) Dc *= D;
  for (int j = 0; j < shape.n_in(); ++j) Dd *= D;
  const int unknowns = Dc * Dd;

  SurfaceOp probe{GradedOperator{Matrix::Zero(Dc, Dd),
                                 shape.n_in() ? tensor(std::vector<SpacePtr>(shape.n_in(), trunc->space))
                                              : trivial_space(),
                                 shape.n_out() ? tensor(std::vector<SpacePtr>(shape.n_out(), trunc->space))
                                               : trivial_space(),
                                 Parity::even, std::nullopt},
                  shape, trunc};

  std::vector<Matrix> blocks;
  auto add_constraints = [&](const HardyElement& el, bool starred) {
    const double nrm = el.norm();
    if (nrm == 0) return;
    const ElementOps ops = element_operators(probe, el, starred);
    const double eps = starred ? -parity_sign : parity_sign;
    const std::vector<int> cols = safe_indices(trunc, shape.n_in(), Dd, ops.raise_in);
    const std::vector<int> safe_rows = safe_indices(trunc, shape.n_out(), Dc, ops.raise_out);
    if (cols.empty() || safe_rows.empty()) return;
    Matrix rows = Matrix::Zero(static_cast<Eigen::Index>(cols.size()) * safe_rows.size(), unknowns);
    Eigen::Index rr = 0;
    for (int c : cols) {
      for (int r : safe_rows) {
        // sum_i L[r,i] X(i,c) - eps sum_i X(r,i) R[i,c] = 0, vec column-major
        for (int i = 0; i < Dc; ++i) {
          const Complex v = ops.lhs(r, i);
          if (v != Complex(0.0)) rows(rr, c * Dc + i) += v / nrm;
        }
        for (int i = 0; i < Dd; ++i) {
          const Complex v = ops.rhs(i, c);
          if (v != Complex(0.0)) rows(rr, i * Dc + r) -= eps * v / nrm;
        }
        ++rr;
      }
    }
    blocks.push_back(std::move(rows));
  };
  for (const auto& el : elements) add_constraints(el, false);
  for (const auto& el : perp_elements) add_constraints(el, true);

  Eigen::Index total_rows = 0;
  for (const auto& b : blocks) total_rows += b.rows();
  Matrix system(total_rows, unknowns);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    system.middleRows(at, b.rows()) = b;
    at += b.rows();
  }

  IntertwinerResult res;
  if (total_rows < unknowns) {
    res.well_conditioned = false;
    res.note = "underdetermined: " + std::to_string(total_rows) + " rows for " +
               std::to_string(unknowns) + " unknowns";
  }
  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeThinV);
  res.singular_values = svd.singularValues();
  const Eigen::Index k = res.singular_values.size();
  res.sigma_min = res.singular_values(k - 1);
  res.sigma_second = k >= 2 ? res.singular_values(k - 2) : 0.0;
  res.gap_ratio = res.sigma_min > 0 ? res.sigma_second / res.sigma_min : 1e300;
  if (res.gap_ratio < 1e3 && res.well_conditioned) {
    res.well_conditioned = false;
    res.note = "nullspace gap ratio below 1e3: " + std::to_string(res.gap_ratio);
  }

  Vector null_vec = svd.matrixV().col(k - 1);
  res.op = probe.op;
  res.op.mat = Eigen::Map<const Matrix>(null_vec.data(), Dc, Dd);
  return res;
}

SurfaceOp sew(const SurfaceOp& outer, int in_slot, const SurfaceOp& inner, int out_slot) {
  if (in_slot < 0 || in_slot >= outer.shape.n_in() || out_slot < 0 ||
      out_slot >= inner.shape.n_out())
    throw std::invalid_argument("sew: slot out of range");
  if (outer.shape.in_sectors[in_slot] != inner.shape.out_sectors[out_slot])
    throw std::invalid_argument("sew: sector mismatch on the sewn circles");
  const int n_boundary = outer.shape.n_out() + (inner.shape.n_out() - 1) +
                         (outer.shape.n_in() - 1) + inner.shape.n_in();
  if (n_boundary == 0) throw std::invalid_argument("sew: result would be a closed surface");

  const SpacePtr F = outer.trunc->space;
  const int n_in_outer = outer.shape.n_in(), n_out_inner = inner.shape.n_out();

  // braid outer's domain so the sewn factor comes first
  std::vector<SpacePtr> dom_factors(n_in_outer, F);
  std::vector<int> perm_dom;
  perm_dom.push_back(in_slot);
  for (int i = 0; i < n_in_outer; ++i)
    if (i != in_slot) perm_dom.push_back(i);
  Matrix bdom = braiding(dom_factors, perm_dom);
  Matrix outer_mat = outer.op.mat * bdom.transpose();

  // braid inner's codomain so the sewn factor comes last
  std::vector<SpacePtr> cod_factors(n_out_inner, F);
  std::vector<int> perm_cod;
  for (int i = 0; i < n_out_inner; ++i)
    if (i != out_slot) perm_cod.push_back(i);
  perm_cod.push_back(out_slot);
  Matrix bcod = braiding(cod_factors, perm_cod);
  Matrix inner_mat = bcod * inner.op.mat;

  std::vector<SpacePtr> m_list(n_in_outer - 1, F);
  std::vector<SpacePtr> k_list(n_out_inner - 1, F);
  std::vector<SpacePtr> h_list(inner.shape.n_in(), F);

  const SpacePtr M = m_list.empty() ? trivial_space() : tensor(m_list);
  const SpacePtr K = k_list.empty() ? trivial_space() : tensor(k_list);
  const SpacePtr H = h_list.empty() ? trivial_space() : tensor(h_list);
  const SpacePtr N = outer.shape.n_out() ? tensor(std::vector<SpacePtr>(outer.shape.n_out(), F))
                                         : trivial_space();

  GradedOperator x2{outer_mat, tensor(F, M), N, outer.op.parity, outer.op.weight_shift};
  GradedOperator x1{inner_mat, H, tensor(K, F), inner.op.parity, inner.op.weight_shift};
  GradedOperator composed = compose_via_supertrace(x2, F, M, N, x1, H, K);

  SurfaceOp res;
  res.op = composed;
  res.trunc = outer.trunc;
  res.shape.out_sectors = outer.shape.out_sectors;
  for (int i = 0; i < n_out_inner; ++i)
    if (i != out_slot) res.shape.out_sectors.push_back(inner.shape.out_sectors[i]);
  for (int i = 0; i < n_in_outer; ++i)
    if (i != in_slot) res.shape.in_sectors.push_back(outer.shape.in_sectors[i]);
  for (auto s : inner.shape.in_sectors) res.shape.in_sectors.push_back(s);
  return res;
}

double phase_aligned_distance(const Matrix& a, const Matrix& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0 || nb == 0) return std::max(na, nb);
  const Matrix an = a / na, bn = b / nb;
  const Complex ip = (bn.adjoint() * an).trace();
  const Complex phase = (std::abs(ip) == 0) ? Complex(1.0) : ip / std::abs(ip);
  return (an - phase * bn).norm();
}

ConjugateSystem conjugate_system(const SurfaceShape& shape, const std::vector<HardyElement>& elements,
                                 const std::vector<HardyElement>& perp_elements) {
  ConjugateSystem sys;
  sys.shape.out_sectors = shape.in_sectors;
  sys.shape.in_sectors = shape.out_sectors;
  const int n_out = shape.n_out();
  auto flip = [&](const HardyElement& e) {
    HardyElement f;
    for (size_t j = n_out; j < e.parts.size(); ++j) f.parts.push_back(e.parts[j]);
    for (int j = 0; j < n_out; ++j) {
      CircleFunction neg = e.parts[j];
      neg *= -1.0;
      f.parts.push_back(std::move(neg));
    }
    return f;
  };
  // adjoints satisfy the relations built from the swapped spaces: Hardy
  // elements of the conjugate come from the perps and vice versa
  for (const auto& e : perp_elements) sys.elements.push_back(flip(e));
  for (const auto& e : elements) sys.perp_elements.push_back(flip(e));
  return sys;
}

std::string surface_report_json(const std::string& geometry, const std::string& moduli, HalfInt cutoff,
                                int band, const std::vector<double>& residuals,
                                const Eigen::VectorXd& singular_values, double runtime_sec) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"geometry\":\"" << geometry << "\",\"moduli\":\"" << moduli << "\",\"cutoff\":\""
     << cutoff.str() << "\",\"band\":" << band << ",\"residuals\":[";
  for (size_t i = 0; i < residuals.size(); ++i) os << (i ? "," : "") << residuals[i];
  os << "],\"singular_values\":[";
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) os << (i ? "," : "") << singular_values(i);
  os << "],\"runtime\":" << runtime_sec << "}";
  return os.str();
}

}  // namespace fcft
