#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fcft/cauchy.hpp"

using namespace fcft;

namespace {

std::mt19937_64 rng(4242);

// random band-limited data, bandwidth N/8
BoundaryData random_bandlimited(const BoundaryGrid& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<CircleFunction> fs;
  for (size_t j = 0; j < g.points.size(); ++j) {
    CircleFunction f;
    for (int n = -g.N / 8; n <= g.N / 8; ++n) f.coeffs[n] = Complex(u(rng), u(rng));
    fs.push_back(std::move(f));
  }
  return BoundaryData::sample(fs, g);
}

double dot_error(const PlanarDomain& dom, int N) {
  BoundaryGrid g(dom, N);
  const Matrix C = cauchy_matrix(dom, g);
  const Matrix Cs = formal_adjoint(dom, g, C);
  const Vector u = random_bandlimited(g).flat(), v = random_bandlimited(g).flat();
  const Complex lhs = (C * u).dot(v), rhs = u.dot(Cs * v);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

double plemelj_error(const PlanarDomain& dom, int N) {
  BoundaryGrid g(dom, N);
  const BoundaryData u = random_bandlimited(g);
  const Vector via_matrix = cauchy_matrix(dom, g) * u.flat();
  const Vector via_ring = boundary_values_direct(dom, g, u).flat();
  return (via_matrix - via_ring).cwiseAbs().maxCoeff() / u.flat().cwiseAbs().maxCoeff();
}

// smooth data with full (geometrically decaying) spectrum: boundary values
// of 1/(z - a) with the pole outside the closed domain
BoundaryData pole_data(const PlanarDomain& dom, const BoundaryGrid& g, Complex pole) {
  BoundaryData d;
  for (size_t j = 0; j < g.points.size(); ++j) {
    Vector s(g.N);
    for (int k = 0; k < g.N; ++k) s(k) = 1.0 / (g.points[j](k) - pole);
    d.samples.push_back(std::move(s));
  }
  return d;
}

double plemelj_error_smooth(const PlanarDomain& dom, int N) {
  BoundaryGrid g(dom, N);
  const BoundaryData u = pole_data(dom, g, Complex(1.85, 0.4));
  const Vector via_matrix = cauchy_matrix(dom, g) * u.flat();
  const Vector via_ring = boundary_values_direct(dom, g, u).flat();
  return (via_matrix - via_ring).cwiseAbs().maxCoeff() / u.flat().cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("domain validation") {
  CHECK_NOTHROW(PlanarDomain::annulus(0.5));
  CHECK_THROWS_AS(PlanarDomain::annulus(1.2), std::invalid_argument);
  CHECK_THROWS_AS(PlanarDomain::pants(0.9, 0.2, 0.2), std::invalid_argument);
  CHECK_NOTHROW(PlanarDomain::pants(0.5, 0.15, 0.2));
}

TEST_CASE("boundary data roundtrips and aliasing detection") {
  const auto dom = PlanarDomain::annulus(0.4);
  BoundaryGrid g(dom, 64);
  const BoundaryData u = random_bandlimited(g);
  const BoundaryData back = BoundaryData::from_fourier(u.fourier());
  CHECK((u.flat() - back.flat()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(u.high_frequency_fraction() < kAliasingThreshold);

  std::vector<CircleFunction> sharp(2);
  sharp[0].coeffs[20] = 1.0;  // above 64/4
  sharp[1].coeffs[0] = 1.0;
  CHECK(BoundaryData::sample(sharp, g).high_frequency_fraction() > kAliasingThreshold);
}

TEST_CASE("disk: monomials reproduce the Hardy projection") {
  const auto dom = PlanarDomain::disk();
  BoundaryGrid g(dom, 64);
  const Matrix C = cauchy_matrix(dom, g);
  for (int n : {0, 1, 5}) {
    const Vector u = BoundaryData::sample({CircleFunction::monomial(n)}, g).flat();
    CHECK((C * u - u).cwiseAbs().maxCoeff() < 1e-12);
  }
  for (int n : {-1, -3}) {
    const Vector u = BoundaryData::sample({CircleFunction::monomial(n)}, g).flat();
    CHECK((C * u).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("annulus: boundary values of holomorphic monomials are fixed points") {
  const double q = 0.5;
  const auto dom = PlanarDomain::annulus(q);
  BoundaryGrid g(dom, 128);
  const Matrix C = cauchy_matrix(dom, g);
  for (int n : {-4, -1, 0, 1, 4}) {
    std::vector<CircleFunction> parts(2);
    parts[0] = CircleFunction::monomial(n);
    Complex qn = 1.0;
    for (int i = 0; i < std::abs(n); ++i) qn *= (n >= 0 ? q : 1.0 / q);
    parts[1] = CircleFunction::monomial(n, qn);
    const Vector u = BoundaryData::sample(parts, g).flat();
    CHECK((C * u - u).cwiseAbs().maxCoeff() < 1e-11 * u.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("constants: full value on the enclosing circle, zero on inner ones") {
  const auto dom = PlanarDomain::annulus(0.3);
  BoundaryGrid g(dom, 64);
  const Matrix C = cauchy_matrix(dom, g);
  std::vector<CircleFunction> outer_const(2), inner_const(2);
  outer_const[0] = CircleFunction::monomial(0);
  inner_const[1] = CircleFunction::monomial(0);
  const Vector a = C * BoundaryData::sample(outer_const, g).flat();
  const Vector b = C * BoundaryData::sample(inner_const, g).flat();
  // constant on the outer circle extends as the constant function
  CHECK((a.head(64).array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK((a.tail(64).array() - 1.0).abs().maxCoeff() < 1e-12);
  // constant on the inner circle only: zero from the domain side
  CHECK(b.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("discrete Cauchy transform is idempotent") {
  for (auto dom : {PlanarDomain::annulus(0.5), PlanarDomain::pants(0.5, 0.15, 0.2)}) {
    BoundaryGrid g(dom, 128);
    const Matrix C = cauchy_matrix(dom, g);
    CHECK(operator_norm(C * C - C) < 1e-10);
  }
}

TEST_CASE("adjoint identity <Cu, v> = <u, C*v>") {
  CHECK(dot_error(PlanarDomain::disk(), 64) < 1e-10);
  CHECK(dot_error(PlanarDomain::annulus(0.5), 128) < 1e-10);
  CHECK(dot_error(PlanarDomain::pants(0.5, 0.15, 0.2), 128) < 1e-10);
}

TEST_CASE("Plemelj: multiplier route equals the interior-ring route") {
  CHECK(plemelj_error(PlanarDomain::disk(), 256) < 1e-8);
  CHECK(plemelj_error(PlanarDomain::annulus(0.5), 256) < 1e-8);
  CHECK(plemelj_error(PlanarDomain::pants(0.5, 0.15, 0.2), 256) < 1e-8);
}

TEST_CASE("grid convergence on smooth non-band-limited data") {
  const auto dom = PlanarDomain::annulus(0.5);
  const double e32 = plemelj_error_smooth(dom, 32);
  const double e64 = plemelj_error_smooth(dom, 64);
  const double e128 = plemelj_error_smooth(dom, 128);
  CHECK(e64 < 0.25 * e32);
  CHECK(e128 < 0.25 * e64);
  CHECK(e128 < 1e-8);
}

TEST_CASE("Kerzman-Stein operator") {
  // disk: A vanishes
  {
    const auto dom = PlanarDomain::disk();
    BoundaryGrid g(dom, 128);
    CHECK(kerzman_stein(dom, g).cwiseAbs().maxCoeff() < 1e-10);
  }
  const auto dom = PlanarDomain::annulus(0.5);
  BoundaryGrid g(dom, 128);
  const Matrix A = kerzman_stein(dom, g);
  CHECK(operator_norm(A) > 1e-3);
  // skew-adjoint to quadrature accuracy
  CHECK((A + A.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  // self-blocks vanish identically for circular boundaries
  CHECK(A.block(0, 0, 128, 128).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(A.block(128, 128, 128, 128).cwiseAbs().maxCoeff() < 1e-13);
  // cross-blocks equal the smooth kernel quadrature
  CHECK((A.block(0, 128, 128, 128) - ks_cross_block(dom, g, 0, 1)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((A.block(128, 0, 128, 128) - ks_cross_block(dom, g, 1, 0)).cwiseAbs().maxCoeff() < 1e-12);
  // geometric singular-value decay (values cluster four per level)
  const auto rep = ks_decay(dom, g);
  CHECK(rep.fitted_log10_slope < -0.06);
  CHECK(rep.singular_values(30) < 1e-2 * rep.singular_values(0));
}

TEST_CASE("numeric Hardy projection is a projection") {
  for (auto dom : {PlanarDomain::annulus(0.5), PlanarDomain::pants(0.5, 0.15, 0.2)}) {
    BoundaryGrid g(dom, 128);
    const auto pr = hardy_projection_numeric(dom, g);
    CHECK(operator_norm(pr.q * pr.q - pr.q) < 1e-8);
    CHECK(operator_norm(pr.q - pr.q.adjoint()) < 1e-8);
    CHECK(pr.condition_bound < 3.0);
  }
}

TEST_CASE("disk projection is the classical Fourier projection") {
  const auto dom = PlanarDomain::disk();
  BoundaryGrid g(dom, 128);
  const auto pr = hardy_projection_numeric(dom, g);
  CHECK((pr.q - classical_projection(dom, g)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("annulus projection matches the analytic Laurent-basis projection") {
  const double q = 0.5;
  const auto dom = PlanarDomain::annulus(q);
  const int N = 256;
  BoundaryGrid g(dom, N);
  const auto pr = hardy_projection_numeric(dom, g);

  Matrix exact = Matrix::Zero(2 * N, 2 * N);
  for (int n = -N / 2; n < N / 2; ++n) {
    std::vector<CircleFunction> parts(2);
    parts[0] = CircleFunction::monomial(n);
    Complex qn = 1.0;
    for (int i = 0; i < std::abs(n); ++i) qn *= (n >= 0 ? q : 1.0 / q);
    parts[1] = CircleFunction::monomial(n, qn);
    Vector v = BoundaryData::sample(parts, g).flat();
    v.normalize();
    exact += v * v.adjoint();
  }
  CHECK(operator_norm(pr.q - exact) < 1e-6);
}

TEST_CASE("trace-class diagnostics for the annulus") {
  const auto dom = PlanarDomain::annulus(0.5);
  BoundaryGrid g(dom, 128);
  const auto rep = trace_class_diagnostic(dom, g);
  CHECK(rep.asymmetry < 1e-8);
  // geometric decay and plateauing partial sums
  CHECK(rep.fitted_log10_slope < -0.05);
  const Eigen::Index n = rep.partial_sums.size();
  CHECK(rep.partial_sums(n - 1) - rep.partial_sums(n - 41) < 1e-10);
  // disk: the difference is numerically zero
  const auto disk_rep =
      trace_class_diagnostic(PlanarDomain::disk(), BoundaryGrid(PlanarDomain::disk(), 64));
  CHECK(disk_rep.singular_values(0) < 1e-10);
}

TEST_CASE("pants trace-class plateau is stable under grid doubling") {
  const auto dom = PlanarDomain::pants(0.5, 0.15, 0.2);
  const auto r1 = trace_class_diagnostic(dom, BoundaryGrid(dom, 64));
  const auto r2 = trace_class_diagnostic(dom, BoundaryGrid(dom, 128));
  const double s1 = r1.partial_sums(std::min<Eigen::Index>(40, r1.partial_sums.size() - 1));
  const double s2 = r2.partial_sums(std::min<Eigen::Index>(40, r2.partial_sums.size() - 1));
  CHECK(std::abs(s1 - s2) < 1e-6);
}

TEST_CASE("perp formula on the spin spans") {
  // annulus NS and R at q = 0.5
  {
    const double q = 0.5;
    const auto dom = PlanarDomain::annulus(q);
    BoundaryGrid g(dom, 256);
    AnnulusPoint ns{q, std::sqrt(q), Sector::NS};
    const SurfaceShape shape{{Sector::NS}, {Sector::NS}};
    CHECK(perp_residual_spans(g, shape, annulus_hardy_basis(ns, -8, 8)) < 1e-8);
    AnnulusPoint r{q, 0.0, Sector::R};
    const SurfaceShape shape_r{{Sector::R}, {Sector::R}};
    CHECK(perp_residual_spans(g, shape_r, annulus_hardy_basis(r, -8, 8)) < 1e-8);
  }
  // pants spans, truncation-limited
  {
    const auto dom = PlanarDomain::pants(0.5, 0.1, 0.1);
    BoundaryGrid g(dom, 256);
    const ModuliPoint x{0.5, 0.1, std::sqrt(0.1), 0.1, std::sqrt(0.1)};
    const SurfaceShape shape{{Sector::NS}, {Sector::NS, Sector::NS}};
    CHECK(perp_residual_spans(g, shape, pants_hardy_basis(x, -4, 4, 40)) < 1e-6);
  }
}

TEST_CASE("perp formula on the numeric Hardy basis") {
  const auto dom = PlanarDomain::annulus(0.5);
  BoundaryGrid g(dom, 128);
  CHECK(perp_residual_numeric(dom, g, {Sector::NS, Sector::NS}) < 1e-7);
  CHECK(perp_residual_numeric(dom, g, {Sector::R, Sector::R}) < 1e-7);
}

TEST_CASE("cauchy_apply flags aliasing input") {
  const auto dom = PlanarDomain::annulus(0.4);
  BoundaryGrid g(dom, 64);
  CHECK(!cauchy_apply(dom, g, random_bandlimited(g)).aliasing_warning);
  std::vector<CircleFunction> sharp(2);
  sharp[0].coeffs[25] = 1.0;
  sharp[1].coeffs[0] = 1.0;
  CHECK(cauchy_apply(dom, g, BoundaryData::sample(sharp, g)).aliasing_warning);
}

TEST_CASE("report serialization") {
  const auto dom = PlanarDomain::annulus(0.5);
  BoundaryGrid g(dom, 64);
  const auto rep = ks_decay(dom, g);
  const std::string j = decay_report_json("annulus:0.5", 64, rep);
  CHECK(j.find("\"domain\":\"annulus:0.5\"") != std::string::npos);
  CHECK(j.find("\"grid\":64") != std::string::npos);
  const std::string csv = singular_values_csv(rep);
  CHECK(csv.substr(0, 28) == "k,singular_value,partial_sum");
}
