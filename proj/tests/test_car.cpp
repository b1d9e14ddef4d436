#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fcft/car.hpp"

using namespace fcft;

namespace {

Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

// domain columns whose images under both orderings stay inside the cutoff
std::vector<int> safe_window(const FockTruncation& t, std::int64_t raise_twice) {
  std::vector<int> cols;
  for (int i = 0; i < t.dim(); ++i)
    if (t.space->twice_energy[i] + raise_twice <= t.cutoff.twice) cols.push_back(i);
  return cols;
}

double restricted_max(const Matrix& m, const std::vector<int>& cols) {
  double worst = 0;
  for (int c : cols) worst = std::max(worst, m.col(c).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace

TEST_CASE("apply_mode on the vacuum") {
  BasisState omega;

  auto r = apply_mode(0, true, omega);
  REQUIRE(!r.zero);
  CHECK(r.sign == 1);
  CHECK(r.state == BasisState{{}, {0}});

  CHECK(apply_mode(3, false, omega).zero);   // annihilator of the vacuum
  CHECK(apply_mode(-2, true, omega).zero);   // starred annihilator
}

TEST_CASE("apply_mode signs follow the canonical slot count") {
  // state a(z^-1) a(z^-3) a*(0) a*(2) Omega
  BasisState s{{-1, -3}, {0, 2}};
  // inserting z^-2 lands in slot 1: sign -1
  auto r = apply_mode(-2, false, s);
  REQUIRE(!r.zero);
  CHECK(r.sign == -1);
  CHECK(r.state == BasisState{{-1, -2, -3}, {0, 2}});
  // removing star 2 sits at slot 3: sign -1
  r = apply_mode(2, false, s);
  REQUIRE(!r.zero);
  CHECK(r.sign == -1);
  CHECK(r.state == BasisState{{-1, -3}, {0}});
  // removing neg -3 sits at slot 1: sign -1
  r = apply_mode(-3, true, s);
  REQUIRE(!r.zero);
  CHECK(r.sign == -1);
  CHECK(r.state == BasisState{{-1}, {0, 2}});
  // double occupation vanishes
  CHECK(apply_mode(-1, false, s).zero);
  CHECK(apply_mode(0, true, s).zero);
}

TEST_CASE("mode_matrix at cutoff 1/2") {
  auto t = enumerate_basis(HalfInt::from_twice(1));
  auto m = mode_matrix(0, true, t);
  REQUIRE(t->dim() == 3);
  const int row = t->index_of(BasisState{{}, {0}});
  Matrix expected = Matrix::Zero(3, 3);
  expected(row, 0) = 1.0;
  CHECK((m.mat - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.parity == Parity::odd);
  CHECK(m.weight_shift->twice == 1);
}

TEST_CASE("adjoint pairing and weight metadata") {
  auto t = enumerate_basis(HalfInt::whole(3));
  for (int k = -6; k <= 6; ++k) {
    auto a = mode_matrix(k, false, t);
    auto astar = mode_matrix(k, true, t);
    CHECK((a.mat.adjoint() - astar.mat).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.metadata_consistent());
    CHECK(astar.metadata_consistent());
  }
}

TEST_CASE("anticommutators on the safe window") {
  auto t = enumerate_basis(HalfInt::whole(3));
  const int D = t->dim();
  for (int k = -2; k <= 2; ++k)
    for (int l = -2; l <= 2; ++l) {
      auto ak = mode_matrix(k, false, t);
      auto alstar = mode_matrix(l, true, t);
      const std::int64_t raise =
          std::max<std::int64_t>({0, mode_weight_shift(k, false).twice, mode_weight_shift(l, true).twice});
      const auto cols = safe_window(*t, raise);
      Matrix ac = anticommutator(ak.mat, alstar.mat);
      if (k == l) ac -= Matrix::Identity(D, D);
      CHECK(restricted_max(ac, cols) < 1e-12);
    }
}

TEST_CASE("unstarred pairs anticommute exactly when nothing raises past the cutoff") {
  auto t = enumerate_basis(HalfInt::whole(2));
  // non-raising modes only: a(z^k) with k >= 0 never leaves the truncation
  for (int k = 0; k <= 3; ++k)
    for (int l = 0; l <= 3; ++l) {
      auto a = mode_matrix(k, false, t);
      auto b = mode_matrix(l, false, t);
      CHECK(anticommutator(a.mat, b.mat).cwiseAbs().maxCoeff() < 1e-12);
      auto as = mode_matrix(-k - 1, true, t);
      auto bs = mode_matrix(-l - 1, true, t);
      CHECK(anticommutator(as.mat, bs.mat).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("smeared operators") {
  auto t = enumerate_basis(HalfInt::whole(2));

  // f = z^0 is the bare mode
  CircleFunction f0 = CircleFunction::monomial(0);
  CHECK((smeared(f0, false, t).mat - mode_matrix(0, false, t).mat).cwiseAbs().maxCoeff() == 0.0);

  // f = z^-1 + z^0 on the vacuum: only the creation part survives
  CircleFunction f;
  f.coeffs[-1] = 1.0;
  f.coeffs[0] = 1.0;
  Vector omega = Vector::Zero(t->dim());
  omega(0) = 1.0;
  Vector img = smeared(f, false, t).mat * omega;
  Vector expected = Vector::Zero(t->dim());
  expected(t->index_of(BasisState{{-1}, {}})) = 1.0;
  CHECK((img - expected).cwiseAbs().maxCoeff() == 0.0);

  // adjoint convention
  CHECK((smeared(f, true, t).mat - smeared(f, false, t).mat.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("smeared CAR relation with random sparse functions") {
  auto t = enumerate_basis(HalfInt::whole(3));
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> mode(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    CircleFunction f, g;
    std::int64_t raise = 0;
    for (int i = 0; i < 3; ++i) {
      const int kf = mode(rng), kg = mode(rng);
      f.coeffs[kf] += Complex(u(rng), u(rng));
      g.coeffs[kg] += Complex(u(rng), u(rng));
      raise = std::max({raise, mode_weight_shift(kf, false).twice, mode_weight_shift(kg, true).twice});
    }
    auto af = smeared(f, false, t);
    auto ags = smeared(g, true, t);
    Matrix ac = anticommutator(af.mat, ags.mat) - inner(f, g) * Matrix::Identity(t->dim(), t->dim());
    CHECK(restricted_max(ac, safe_window(*t, raise)) < 1e-12);
  }
}

TEST_CASE("parity conjugation d a d = -a") {
  auto t = enumerate_basis(HalfInt::whole(2));
  auto d = grading_involution(t->space);
  for (int k = -3; k <= 3; ++k) {
    auto a = mode_matrix(k, false, t);
    CHECK((d.mat * a.mat * d.mat + a.mat).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("weight shift matches the sparsity pattern for |k| <= 2 cutoff") {
  auto t = enumerate_basis(HalfInt::whole(2));
  for (int k = -4; k <= 4; ++k) {
    CHECK(mode_matrix(k, false, t).metadata_consistent());
    CHECK(mode_matrix(k, true, t).metadata_consistent());
  }
}
