#include "fcft/checks.hpp"

#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "fcft/car.hpp"
#include "fcft/cauchy.hpp"
#include "fcft/surfaces.hpp"
#include "fcft/vertex.hpp"

namespace fcft {

void RunConfig::validate() const {
  if (cutoff.twice < 0 || cutoff.twice > 20)
    throw std::invalid_argument("cutoff must lie in [0, 10]");
  if (band < 0 || band > 64) throw std::invalid_argument("band radius must lie in [0, 64]");
  if (fourier < 4 || fourier > 4096) throw std::invalid_argument("fourier order must lie in [4, 4096]");
  if (grid < 8 || grid > 2048 || grid % 2)
    throw std::invalid_argument("grid size must be even and in [8, 2048]");
  if (has_moduli) ModuliPoint{w, q1, q1s, q2, q2s}.validate();
  if (has_annulus) AnnulusPoint{q, qs, sector}.validate();
  if (tolerance < 0) throw std::invalid_argument("tolerance must be nonnegative");
}

Complex parse_complex(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty complex literal");
  std::string body = s;
  bool has_i = false;
  if (body.back() == 'i') {
    body.pop_back();
    has_i = true;
  }
  size_t split = std::string::npos;
  for (size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  try {
    if (!has_i) return {std::stod(body), 0.0};
    if (split == std::string::npos) {
      if (body.empty() || body == "+") return {0.0, 1.0};
      if (body == "-") return {0.0, -1.0};
      return {0.0, std::stod(body)};
    }
    const std::string re = body.substr(0, split);
    std::string im = body.substr(split);
    if (im == "+") im = "1";
    if (im == "-") im = "-1";
    return {std::stod(re), std::stod(im)};
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("bad complex literal: " + s);
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

void parse_moduli(const std::string& s, RunConfig& cfg) {
  const auto parts = split_csv(s);
  if (parts.size() != 5) throw std::invalid_argument("--moduli expects w,q1,q1s,q2,q2s");
  cfg.w = parse_complex(parts[0]);
  cfg.q1 = parse_complex(parts[1]);
  cfg.q1s = parse_complex(parts[2]);
  cfg.q2 = parse_complex(parts[3]);
  cfg.q2s = parse_complex(parts[4]);
  cfg.has_moduli = true;
  ModuliPoint{cfg.w, cfg.q1, cfg.q1s, cfg.q2, cfg.q2s}.validate();
}

void parse_annulus(const std::string& s, RunConfig& cfg) {
  const auto parts = split_csv(s);
  if (parts.empty() || parts.size() > 2) throw std::invalid_argument("--annulus expects q[,qs]");
  cfg.q = parse_complex(parts[0]);
  cfg.qs = parts.size() == 2 ? parse_complex(parts[1]) : std::sqrt(cfg.q);
  cfg.has_annulus = true;
}

namespace {

struct Suite {
  std::vector<CheckResult> results;
  double tol_override = 0;

  void add(const std::string& name, double measured, double tol) {
    if (tol_override > 0) tol = tol_override;
    results.push_back({name, measured, tol, measured <= tol});
  }
};

ModuliPoint config_moduli(const RunConfig& cfg) {
  if (cfg.has_moduli) return {cfg.w, cfg.q1, cfg.q1s, cfg.q2, cfg.q2s};
  const double s = std::sqrt(0.1);
  return {0.5, 0.1, s, 0.1, s};
}

AnnulusPoint config_annulus(const RunConfig& cfg) {
  if (cfg.has_annulus) return {cfg.q, cfg.qs, cfg.sector};
  return {0.5, std::sqrt(0.5), cfg.sector};
}

Complex rand_unit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double re = u(rng), im = u(rng);
  return {re, im};
}

GradedOperator random_graded(const SpacePtr& cod, const SpacePtr& dom, Parity p,
                             std::mt19937_64& rng) {
  GradedOperator op{Matrix::Zero(cod->dim(), dom->dim()), dom, cod, p, std::nullopt};
  for (int r = 0; r < cod->dim(); ++r)
    for (int c = 0; c < dom->dim(); ++c)
      if ((cod->parity[r] + dom->parity[c]) % 2 == static_cast<int>(p)) op.mat(r, c) = rand_unit(rng);
  return op;
}

std::int64_t character_dim(std::int64_t cutoff_twice) {
  std::vector<std::int64_t> counts(cutoff_twice + 1, 0);
  counts[0] = 1;
  for (std::int64_t w = 1; w <= cutoff_twice; w += 2)
    for (int rep = 0; rep < 2; ++rep)
      for (std::int64_t t = cutoff_twice; t >= w; --t) counts[t] += counts[t - w];
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

}  // namespace

std::vector<CheckResult> run_fock_checks(const RunConfig& cfg) {
  Suite s;
  s.tol_override = cfg.tolerance;
  auto t = enumerate_basis(cfg.cutoff);

  double dim_err = 0;
  for (std::int64_t c2 = 0; c2 <= cfg.cutoff.twice; ++c2)
    dim_err = std::max(dim_err,
                       std::abs(static_cast<double>(
                           enumerate_basis(HalfInt::from_twice(c2))->dim() - character_dim(c2))));
  s.add("dimension matches the character series", dim_err, 0.0);

  double stab = 0;
  auto prev = enumerate_basis(HalfInt::from_twice(std::max<std::int64_t>(0, cfg.cutoff.twice - 1)));
  for (int i = 0; i < prev->dim(); ++i)
    if (!(prev->basis[i] == t->basis[i])) stab = 1;
  s.add("enumeration stable under cutoff growth", stab, 0.0);

  double par = 0;
  for (const auto& b : t->basis) {
    const int se = (energy(b, Sector::NS).twice % 2 == 0) ? 1 : -1;
    const int sp = b.parity() ? -1 : 1;
    if (se != sp) par = 1;
  }
  s.add("(-1)^{2E} equals the parity sign", par, 0.0);

  const int D = t->dim();
  s.add("rotation by 0 is the identity",
        (rotation_operator(0.0, Sector::NS, *t).mat - Matrix::Identity(D, D)).cwiseAbs().maxCoeff(),
        1e-12);
  s.add("full R turn is the identity",
        (rotation_operator(1.0, Sector::R, *t).mat - Matrix::Identity(D, D)).cwiseAbs().maxCoeff(),
        1e-12);
  s.add("full NS turn is the grading involution",
        (rotation_operator(1.0, Sector::NS, *t).mat - grading_involution(t->space).mat)
            .cwiseAbs()
            .maxCoeff(),
        1e-12);
  return s.results;
}

std::vector<CheckResult> run_car_checks(const RunConfig& cfg) {
  Suite s;
  s.tol_override = cfg.tolerance;
  auto t = enumerate_basis(cfg.cutoff);
  const int D = t->dim();
  const int kmax = static_cast<int>(cfg.cutoff.twice);

  double adj = 0, meta = 0;
  for (int k = -kmax; k <= kmax; ++k) {
    auto a = mode_matrix(k, false, t);
    auto as = mode_matrix(k, true, t);
    adj = std::max(adj, (a.mat.adjoint() - as.mat).cwiseAbs().maxCoeff());
    if (!a.metadata_consistent() || !as.metadata_consistent()) meta = 1;
  }
  s.add("mode adjoint pairing", adj, 0.0);
  s.add("weight-shift metadata matches sparsity", meta, 0.0);

  double car = 0;
  int tested = 0;
  const int pair_k = std::min(3, std::max(1, kmax / 2));
  for (int k = -pair_k; k <= pair_k; ++k)
    for (int l = -pair_k; l <= pair_k; ++l) {
      const std::int64_t raise = std::max<std::int64_t>(
          {0, mode_weight_shift(k, false).twice, mode_weight_shift(l, true).twice});
      Matrix ac = mode_matrix(k, false, t).mat * mode_matrix(l, true, t).mat +
                  mode_matrix(l, true, t).mat * mode_matrix(k, false, t).mat;
      if (k == l) ac -= Matrix::Identity(D, D);
      bool any = false;
      for (int c = 0; c < D; ++c)
        if (t->space->twice_energy[c] + raise <= cfg.cutoff.twice) {
          car = std::max(car, ac.col(c).cwiseAbs().maxCoeff());
          any = true;
        }
      if (any) ++tested;
    }
  s.add("anticommutators on the safe window (pairs tested: " + std::to_string(tested) + ")", car,
        1e-12);

  std::mt19937_64 rng(cfg.seed);
  double aa = 0;
  for (int trial = 0; trial < 10; ++trial) {
    CircleFunction f, g;
    for (int i = 0; i < 3; ++i) {
      f.coeffs[static_cast<int>(rng() % 5)] += rand_unit(rng);
      g.coeffs[static_cast<int>(rng() % 5)] += rand_unit(rng);
    }
    Matrix x = smeared(f, false, t).mat, y = smeared(g, false, t).mat;
    aa = std::max(aa, (x * y + y * x).cwiseAbs().maxCoeff());
  }
  s.add("{a(f), a(g)} = 0 on non-raising modes", aa, 1e-12);

  auto d = grading_involution(t->space);
  double conj = 0;
  for (int k = -2; k <= 2; ++k) {
    const Matrix a = mode_matrix(k, false, t).mat;
    conj = std::max(conj, (d.mat * a * d.mat + a).cwiseAbs().maxCoeff());
  }
  s.add("parity conjugation d a d = -a", conj, 0.0);
  return s.results;
}

std::vector<CheckResult> run_supertrace_checks(const RunConfig& cfg) {
  Suite s;
  s.tol_override = cfg.tolerance;
  std::mt19937_64 rng(cfg.seed);
  auto sp = make_space({0, 1});

  double sign_law = 0, supertracial = 0, compose = 0, iterated = 0;
  auto draw_parity = [&rng]() { return (rng() % 2) ? Parity::odd : Parity::even; };
  for (int trial = 0; trial < 100; ++trial) {
    const Parity px = draw_parity();
    const Parity pz = draw_parity();

    // (y1 (x) y2)(x1 (x) x2) = (-1)^{p(y2) p(x1)} (y1 x1 (x) y2 x2)
    const Parity py1 = draw_parity(), py2 = draw_parity(), px1 = draw_parity(),
                 px2 = draw_parity();
    auto y1 = random_graded(sp, sp, py1, rng), y2 = random_graded(sp, sp, py2, rng);
    auto x1 = random_graded(sp, sp, px1, rng), x2 = random_graded(sp, sp, px2, rng);
    const double law_sgn = (py2 == Parity::odd && px1 == Parity::odd) ? -1.0 : 1.0;
    Matrix lhs = graded_tensor(y1, y2).mat * graded_tensor(x1, x2).mat;
    Matrix rhs = law_sgn * graded_tensor(y1 * x1, y2 * x2).mat;
    sign_law = std::max(sign_law, (lhs - rhs).cwiseAbs().maxCoeff());
    const double sgn = (pz == Parity::odd && px == Parity::odd) ? -1.0 : 1.0;

    auto x = random_graded(tensor(sp, sp), tensor(sp, sp), px, rng);
    auto z = random_graded(sp, sp, pz, rng);
    auto oz = graded_tensor(identity_on(sp), z);
    GradedOperator zx{oz.mat * x.mat, tensor(sp, sp), tensor(sp, sp), parity_sum(px, pz),
                      std::nullopt};
    GradedOperator xz{x.mat * oz.mat, tensor(sp, sp), tensor(sp, sp), parity_sum(px, pz),
                      std::nullopt};
    supertracial = std::max(
        supertracial, (partial_supertrace(zx, sp, sp, sp).mat -
                       sgn * partial_supertrace(xz, sp, sp, sp).mat)
                          .cwiseAbs()
                          .maxCoeff());

    auto c2 = random_graded(sp, tensor(sp, sp), px, rng);
    auto c1 = random_graded(tensor(sp, sp), sp, pz, rng);
    try {
      compose_via_supertrace(c2, sp, sp, sp, c1, sp, sp);
    } catch (const std::runtime_error&) {
      compose = 1.0;
    }

    auto big = tensor(sp, tensor(sp, sp));
    auto xb = random_graded(big, big, px, rng);
    auto once = partial_supertrace(xb, sp, tensor(sp, sp), sp);
    GradedOperator xr{xb.mat, tensor(tensor(sp, sp), sp), tensor(tensor(sp, sp), sp), px,
                      std::nullopt};
    auto inner = partial_supertrace(xr, tensor(sp, sp), sp, tensor(sp, sp));
    auto outer = partial_supertrace(inner, sp, sp, sp);
    iterated = std::max(iterated, (once.mat - outer.mat).cwiseAbs().maxCoeff());
  }
  s.add("graded composition sign law", sign_law, 1e-12);
  s.add("supertracial property", supertracial, 1e-12);
  s.add("composition through the partial supertrace", compose, 1e-12);
  s.add("iterated partial supertrace", iterated, 1e-12);
  return s.results;
}

std::vector<CheckResult> run_vertex_checks(const RunConfig& cfg) {
  Suite s;
  s.tol_override = cfg.tolerance;
  auto t = enumerate_basis(cfg.cutoff);
  VertexEngine eng;
  const int D = t->dim();

  StateWord omega;
  s.add("vacuum mode -1 is the identity",
        (eng.mode(omega, -1, t).mat - Matrix::Identity(D, D)).cwiseAbs().maxCoeff(), 0.0);
  s.add("vacuum mode 0 vanishes", eng.mode(omega, 0, t).mat.cwiseAbs().maxCoeff(), 0.0);

  double seeds = 0;
  for (int n = -3; n <= 3; ++n) {
    seeds = std::max(
        seeds,
        (eng.mode(StateWord{{{-1, false}}}, n, t).mat - mode_matrix(n, false, t).mat)
            .cwiseAbs()
            .maxCoeff());
    seeds = std::max(
        seeds,
        (eng.mode(StateWord{{{0, true}}}, n, t).mat - mode_matrix(-n - 1, true, t).mat)
            .cwiseAbs()
            .maxCoeff());
  }
  s.add("generating-field modes equal CAR modes", seeds, 0.0);

  double meta = 0;
  for (int i = 0; i < std::min(D, 8); ++i) {
    const StateWord w = StateWord::from_basis(t->basis[i]);
    for (int m = -2; m <= 2; ++m) {
      auto op = eng.mode(w, m, t);
      if (!op.metadata_consistent() || op.weight_shift->twice != w.weight().twice - 2 * m - 2)
        meta = 1;
    }
  }
  s.add("mode weight bookkeeping", meta, 0.0);

  auto work = enumerate_basis(HalfInt::from_twice(cfg.cutoff.twice + 8));
  StateWord xi{{{-1, false}, {0, true}}};
  double banded = 0;
  for (int n : {-1, 1})
    for (int m : {-1, 0}) {
      Matrix sum = Matrix::Zero(work->dim(), work->dim());
      for (int j = 0; j <= 20; ++j) {
        const double c = static_cast<double>(generalized_binomial(n, j));
        if (c == 0.0) continue;
        const Matrix t1 = mode_matrix(n - j, false, work).mat * eng.mode(xi, m + j, work).mat;
        const Matrix t2 = eng.mode(xi, m + n - j, work).mat * mode_matrix(j, false, work).mat;
        const double s2 = ((xi.parity() + n) % 2 + 2) % 2 ? -1.0 : 1.0;
        sum += (j % 2 ? -1.0 : 1.0) * c * (t1 - s2 * t2);
      }
      StateWord grown = xi;
      grown.word.insert(grown.word.begin(), {n, false});
      const Matrix direct = eng.mode(grown, m, work).mat;
      banded = std::max(
          banded, (sum.topLeftCorner(D, D) - direct.topLeftCorner(D, D)).cwiseAbs().maxCoeff());
    }
  s.add("product-formula recursion self-consistency", banded, 1e-10);

  auto fs = eng.field_series(StateWord{{{-1, false}}}, Complex(0.5, 0.0), t, -6, 2);
  double mono = 0;
  double prev = 1e300;
  for (int n = -2; n >= -6; --n) {
    if (fs.band_norms[n] > prev + 1e-13) mono = 1;
    prev = fs.band_norms[n];
  }
  s.add("field-series creation bands decay", mono, 0.0);
  return s.results;
}

std::vector<CheckResult> run_surfaces_checks(const RunConfig& cfg) {
  Suite s;
  s.tol_override = cfg.tolerance;
  auto t = enumerate_basis(cfg.cutoff);
  const int D = t->dim();
  VertexEngine eng;
  std::mt19937_64 rng(cfg.seed);

  double vac = 0;
  const Vector omega = disk_vacuum(*t);
  for (int m = 0; m <= static_cast<int>(cfg.cutoff.twice); ++m)
    vac = std::max(vac, (mode_matrix(m, false, t).mat * omega).cwiseAbs().maxCoeff());
  for (int n = -1; n >= -static_cast<int>(cfg.cutoff.twice); --n)
    vac = std::max(vac, (mode_matrix(n, true, t).mat * omega).cwiseAbs().maxCoeff());
  s.add("disk vacuum equations", vac, 0.0);

  const AnnulusPoint ann = config_annulus(cfg);
  double comm = 0;
  {
    AnnulusPoint a{ann.q, ann.q_sqrt == Complex(0.0) ? std::sqrt(ann.q) : ann.q_sqrt, Sector::NS};
    const int nr = static_cast<int>(cfg.cutoff.twice);
    comm = verify_commutation(annulus_op(a, t), annulus_hardy_basis(a, -nr, nr),
                              annulus_perp_basis(a, -nr, nr))
               .max_residual;
    AnnulusPoint r{a.q, 0.0, Sector::R};
    comm = std::max(comm, verify_commutation(annulus_op(r, t), annulus_hardy_basis(r, -nr, nr),
                                             annulus_perp_basis(r, -nr, nr))
                              .max_residual);
  }
  s.add("annulus commutation relations (NS and R)", comm, 1e-12);

  double group = 0;
  for (int trial = 0; trial < 5; ++trial) {
    std::uniform_real_distribution<double> mag(0.1, 0.9), ph(0.0, 6.283185307179586);
    AnnulusPoint a1{std::polar(mag(rng), ph(rng)), 0.0, Sector::NS};
    a1.q_sqrt = std::sqrt(a1.q);
    AnnulusPoint a2{std::polar(mag(rng), ph(rng)), 0.0, Sector::NS};
    a2.q_sqrt = std::sqrt(a2.q);
    AnnulusPoint prod{a1.q * a2.q, a1.q_sqrt * a2.q_sqrt, Sector::NS};
    group = std::max(group, (annulus_operator(a1, t).mat * annulus_operator(a2, t).mat -
                             annulus_operator(prod, t).mat)
                                .cwiseAbs()
                                .maxCoeff());
  }
  s.add("annulus group law", group, 1e-13);

  const ModuliPoint x = config_moduli(cfg);
  {
    auto narrow = pants_operator(x, t, -1, -1, eng);
    const Matrix q2m = annulus_operator({x.q2, x.q2_sqrt, Sector::NS}, t).mat;
    double norm_err = 0;
    for (int ie = 0; ie < D; ++ie)
      norm_err =
          std::max(norm_err, (narrow.surface.op.mat.col(ie) - q2m.col(ie)).cwiseAbs().maxCoeff());
    s.add("pants vacuum reduction T(Omega x eta) = q2^{L0} eta", norm_err, 0.0);

    auto pr = pants_operator(x, t, -cfg.band - 1, cfg.band, eng);
    const int ix = t->index_of(BasisState{{-1}, {}});
    const Complex val = pr.surface.op.mat(ix, ix * D);
    s.add("pants matrix element <xi, T(xi x Omega)> = q1_sqrt", std::abs(val - x.q1_sqrt), 1e-12);

    const int nh = std::min<int>(4, static_cast<int>(cfg.cutoff.twice) + 1);
    auto rep = verify_commutation(pr.surface, pants_hardy_basis(x, -nh, nh, cfg.fourier),
                                  pants_perp_basis(x, -nh, nh, cfg.fourier));
    s.add("pants commutation residual at the configured band", rep.max_residual, 1e-6);
  }

  {
    auto t1 = enumerate_basis(HalfInt::whole(1));
    auto disk = solve_intertwiner({{Sector::NS}, {}}, t1, disk_hardy_basis(3), disk_perp_basis(3));
    s.add("disk nullspace gap (1/gap)", 1.0 / std::max(1.0, disk.gap_ratio), 1e-3);

    auto t32 = enumerate_basis(HalfInt::from_twice(3));
    AnnulusPoint a{0.3, std::sqrt(0.3), Sector::NS};
    auto asol = solve_intertwiner({{Sector::NS}, {Sector::NS}}, t32, annulus_hardy_basis(a, -4, 4),
                                  annulus_perp_basis(a, -4, 4));
    s.add("annulus nullspace gap (1/gap)", 1.0 / std::max(1.0, asol.gap_ratio), 1e-3);
    s.add("annulus nullspace operator matches q^{L0}",
          phase_aligned_distance(asol.op.mat, annulus_operator(a, t32).mat), 1e-6);

    auto psol = solve_intertwiner({{Sector::NS}, {Sector::NS, Sector::NS}}, t1,
                                  pants_hardy_products(x, 3, cfg.fourier),
                                  pants_perp_products(x, 3, cfg.fourier));
    s.add("pants nullspace gap (1/gap)", 1.0 / std::max(1.0, psol.gap_ratio), 1e-3);
    auto pr1 = pants_operator(x, t1, -6, 6, eng);
    s.add("pants nullspace operator matches the band sum",
          phase_aligned_distance(psol.op.mat, pr1.surface.op.mat), 1e-6);
  }

  {
    AnnulusPoint a1{Complex(0.5, 0.1), std::sqrt(Complex(0.5, 0.1)), Sector::NS};
    AnnulusPoint a2{Complex(0.4, -0.2), std::sqrt(Complex(0.4, -0.2)), Sector::NS};
    auto sewn = sew(annulus_op(a1, t), 0, annulus_op(a2, t), 0);
    AnnulusPoint prod{a1.q * a2.q, a1.q_sqrt * a2.q_sqrt, Sector::NS};
    s.add("annulus-into-annulus sewing",
          (sewn.op.mat - annulus_operator(prod, t).mat).cwiseAbs().maxCoeff(), 1e-13);

    auto pr = pants_operator(x, t, -static_cast<int>(cfg.cutoff.twice) - 2,
                             static_cast<int>(cfg.cutoff.twice) + 1, eng);
    auto glued = sew(pr.surface, 0, disk_op(t), 0);
    const Matrix q2m = annulus_operator({x.q2, x.q2_sqrt, Sector::NS}, t).mat;
    s.add("disk-into-pants sewing", (glued.op.mat - q2m).cwiseAbs().maxCoeff(), 1e-14);
  }

  {
    AnnulusPoint a{Complex(0.0, 0.2), std::sqrt(Complex(0.0, 0.2)), Sector::NS};
    s.add("annulus adjoint equals the conjugate operator",
          (annulus_operator(a, t).mat.adjoint() - annulus_operator(a.conjugated(), t).mat)
              .cwiseAbs()
              .maxCoeff(),
          0.0);

    auto t1 = enumerate_basis(HalfInt::whole(1));
    auto pr = pants_operator(x, t1, -6, 6, eng);
    auto sys = conjugate_system({{Sector::NS}, {Sector::NS, Sector::NS}},
                                pants_hardy_products(x, 3, cfg.fourier),
                                pants_perp_products(x, 3, cfg.fourier));
    auto solved = solve_intertwiner(sys.shape, t1, sys.elements, sys.perp_elements);
    s.add("pants adjoint proportional to the conjugate intertwiner",
          phase_aligned_distance(pr.surface.op.mat.adjoint(), solved.op.mat), 1e-5);
  }
  return s.results;
}

std::vector<CheckResult> run_cauchy_checks(const RunConfig& cfg) {
  Suite s;
  s.tol_override = cfg.tolerance;
  const double q = cfg.has_annulus ? std::abs(cfg.q) : 0.5;
  const ModuliPoint x = config_moduli(cfg);
  const auto annulus = PlanarDomain::annulus(q);
  const auto pants = PlanarDomain::pants(x.w, std::abs(x.q1), std::abs(x.q2));
  const int N = cfg.grid;
  std::mt19937_64 rng(cfg.seed);

  auto bandlimited = [&](const BoundaryGrid& g) {
    std::vector<CircleFunction> fs;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (size_t j = 0; j < g.points.size(); ++j) {
      CircleFunction f;
      for (int n = -g.N / 8; n <= g.N / 8; ++n) f.coeffs[n] = Complex(u(rng), u(rng));
      fs.push_back(std::move(f));
    }
    return BoundaryData::sample(fs, g);
  };

  double plemelj = 0, idem = 0, adjid = 0;
  for (const auto& dom : {PlanarDomain::disk(), annulus, pants}) {
    BoundaryGrid g(dom, N);
    const Matrix C = cauchy_matrix(dom, g);
    const BoundaryData u = bandlimited(g);
    const Vector direct = boundary_values_direct(dom, g, u).flat();
    plemelj = std::max(plemelj, (C * u.flat() - direct).cwiseAbs().maxCoeff() /
                                    u.flat().cwiseAbs().maxCoeff());
    idem = std::max(idem, operator_norm(C * C - C));
    const Vector v = bandlimited(g).flat();
    const Complex lhs = (C * u.flat()).dot(v), rhs = u.flat().dot(formal_adjoint(dom, g, C) * v);
    adjid = std::max(adjid, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
  }
  s.add("Plemelj split agreement", plemelj, 1e-8);
  s.add("Cauchy idempotence", idem, 1e-10);
  s.add("adjoint identity", adjid, 1e-9);

  {
    BoundaryGrid g(PlanarDomain::disk(), N);
    s.add("disk Kerzman-Stein vanishes", kerzman_stein(PlanarDomain::disk(), g).cwiseAbs().maxCoeff(),
          1e-10);
  }
  {
    BoundaryGrid g(annulus, N);
    const Matrix A = kerzman_stein(annulus, g);
    s.add("Kerzman-Stein skew-adjointness", (A + A.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
    const auto pr = hardy_projection_numeric(annulus, g);
    const Matrix C = cauchy_matrix(annulus, g);
    Matrix one_plus_a = A;
    one_plus_a.diagonal().array() += 1.0;
    s.add("Kerzman-Stein identity q(1+A) = C", operator_norm(pr.q * one_plus_a - C), 1e-8);
    s.add("projection idempotence", operator_norm(pr.q * pr.q - pr.q), 1e-8);
    s.add("projection self-adjointness", operator_norm(pr.q - pr.q.adjoint()), 1e-8);

    AnnulusPoint ns{q, std::sqrt(q), Sector::NS};
    s.add("perp formula on the NS annulus span",
          perp_residual_spans(g, {{Sector::NS}, {Sector::NS}}, annulus_hardy_basis(ns, -8, 8)),
          1e-8);
    const auto decay = trace_class_diagnostic(annulus, g);
    s.add("trace-class symmetry defect", decay.asymmetry, 1e-8);
    s.add("trace-class decay slope (must be negative)", decay.fitted_log10_slope, -0.02);
  }
  {
    BoundaryGrid g(pants, N);
    s.add("perp formula on the pants span (truncation-limited)",
          perp_residual_spans(g, {{Sector::NS}, {Sector::NS, Sector::NS}},
                              pants_hardy_basis(x, -4, 4, 40)),
          1e-6);
  }
  return s.results;
}

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string complex_str(Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

}  // namespace

std::string checks_report_json(const std::string& suite, const RunConfig& cfg,
                               const std::vector<CheckResult>& checks) {
  std::ostringstream os;
  os.precision(17);
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  os << "{\"schema\":1,\"suite\":\"" << json_escape(suite) << "\",\"config\":{"
     << "\"cutoff\":\"" << cfg.cutoff.str() << "\",\"band\":" << cfg.band
     << ",\"fourier\":" << cfg.fourier << ",\"grid\":" << cfg.grid << ",\"sector\":\""
     << sector_name(cfg.sector) << "\",\"seed\":" << cfg.seed << ",\"tolerance\":" << cfg.tolerance
     << ",\"moduli\":\"" << complex_str(cfg.w) << "," << complex_str(cfg.q1) << ","
     << complex_str(cfg.q1s) << "," << complex_str(cfg.q2) << "," << complex_str(cfg.q2s)
     << "\",\"annulus\":\"" << complex_str(cfg.q) << "," << complex_str(cfg.qs) << "\"},"
     << "\"checks\":[";
  for (size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    os << (i ? "," : "") << "{\"name\":\"" << json_escape(c.name) << "\",\"measured\":" << c.measured
       << ",\"tolerance\":" << c.tolerance << ",\"pass\":" << (c.pass ? "true" : "false") << "}";
  }
  os << "],\"pass\":" << (all ? "true" : "false") << "}";
  return os.str();
}

std::string sweep_pants_convergence_csv(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "w,q1,q2,band,term_norm,tail_norm,residual,valid\r\n";
  auto t = enumerate_basis(cfg.cutoff);
  const int band_max = std::max(4, cfg.band);
  const double ws[3] = {0.4, 0.5, 0.6};
  const double qs[3] = {0.05, 0.1, 0.25};

  // one future per moduli point; rows are assembled in grid order afterwards
  std::vector<std::pair<ModuliPoint, bool>> points;
  for (double wv : ws)
    for (double qv : qs) {
      ModuliPoint x{wv, qv, std::sqrt(qv), qv, std::sqrt(qv)};
      points.emplace_back(x, x.valid());
    }
  auto run_point = [&](const ModuliPoint& x) {
    std::ostringstream row;
    row.precision(17);
    VertexEngine eng;
    auto pr = pants_operator(x, t, -band_max - 1, band_max, eng);
    const int nh = std::min<int>(4, static_cast<int>(cfg.cutoff.twice) + 1);
    auto hardy = pants_hardy_basis(x, -nh, nh, cfg.fourier);
    auto perp = pants_perp_basis(x, -nh, nh, cfg.fourier);
    for (int band = 4; band <= band_max; ++band) {
      double term = 0, tail = 0;
      for (const auto& [n, norm] : pr.term_norms) {
        if (n == band || n == -band - 1) term = std::max(term, norm);
        if (n > band || n < -band - 1) tail += norm;
      }
      auto partial = pants_operator(x, t, -band - 1, band, eng);
      const double res = verify_commutation(partial.surface, hardy, perp).max_residual;
      row << x.w.real() << "," << x.q1.real() << "," << x.q2.real() << "," << band << "," << term
          << "," << tail << "," << res << ",1\r\n";
    }
    return row.str();
  };
  std::vector<std::future<std::string>> futures(points.size());
  for (size_t i = 0; i < points.size(); ++i)
    if (points[i].second)
      futures[i] = std::async(std::launch::async, run_point, points[i].first);
  for (size_t i = 0; i < points.size(); ++i) {
    if (!points[i].second) {
      const auto& x = points[i].first;
      os << x.w.real() << "," << x.q1.real() << "," << x.q2.real() << ",,,,0\r\n";
    } else {
      os << futures[i].get();
    }
  }
  return os.str();
}

std::string sweep_ks_decay_csv(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "grid,k,singular_value,partial_sum\r\n";
  const double q = cfg.has_annulus ? std::abs(cfg.q) : 0.5;
  const auto dom = PlanarDomain::annulus(q);
  for (int N = 64; N <= std::max(64, cfg.grid); N *= 2) {
    BoundaryGrid g(dom, N);
    const auto rep = ks_decay(dom, g);
    const Eigen::Index count = std::min<Eigen::Index>(rep.singular_values.size(), 40);
    for (Eigen::Index k = 0; k < count; ++k)
      os << N << "," << k + 1 << "," << rep.singular_values(k) << "," << rep.partial_sums(k)
         << "\r\n";
  }
  return os.str();
}

std::string sweep_nullspace_gap_csv(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "geometry,cutoff,sigma_min,sigma_second,gap_ratio\r\n";
  const ModuliPoint x = config_moduli(cfg);
  for (std::int64_t c2 : {2, 3, 4}) {
    auto t = enumerate_basis(HalfInt::from_twice(c2));
    const std::string cut = HalfInt::from_twice(c2).str();
    {
      auto r = solve_intertwiner({{Sector::NS}, {}}, t, disk_hardy_basis(4), disk_perp_basis(4));
      os << "disk," << cut << "," << r.sigma_min << "," << r.sigma_second << "," << r.gap_ratio
         << "\r\n";
    }
    {
      AnnulusPoint a{0.3, std::sqrt(0.3), Sector::NS};
      auto r = solve_intertwiner({{Sector::NS}, {Sector::NS}}, t, annulus_hardy_basis(a, -4, 4),
                                 annulus_perp_basis(a, -4, 4));
      os << "annulus," << cut << "," << r.sigma_min << "," << r.sigma_second << "," << r.gap_ratio
         << "\r\n";
    }
    if (c2 <= 3) {
      auto r = solve_intertwiner({{Sector::NS}, {Sector::NS, Sector::NS}}, t,
                                 pants_hardy_products(x, 3, cfg.fourier),
                                 pants_perp_products(x, 3, cfg.fourier));
      os << "pants," << cut << "," << r.sigma_min << "," << r.sigma_second << "," << r.gap_ratio
         << "\r\n";
    }
  }
  return os.str();
}

}  // namespace fcft
