#include "fcft/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fcft {

bool BasisState::valid() const {
  for (size_t i = 0; i < neg.size(); ++i) {
    if (neg[i] >= 0) return false;
    if (i > 0 && neg[i] >= neg[i - 1]) return false;
  }
  for (size_t i = 0; i < star.size(); ++i) {
    if (star[i] < 0) return false;
    if (i > 0 && star[i] <= star[i - 1]) return false;
  }
  return true;
}

HalfInt energy(const BasisState& s, Sector sector) {
  std::int64_t twice = 0;
  if (sector == Sector::NS) {
    for (int n : s.neg) twice += -2 * n - 1;  // -(n + 1/2)
    for (int m : s.star) twice += 2 * m + 1;  // m + 1/2
  } else {
    for (int n : s.neg) twice += -2 * n;
    for (int m : s.star) twice += 2 * m;
  }
  return HalfInt::from_twice(twice);
}

bool basis_order_less(const BasisState& a, const BasisState& b) {
  const HalfInt ea = energy(a, Sector::NS), eb = energy(b, Sector::NS);
  if (ea != eb) return ea < eb;
  auto lex = [](const std::vector<int>& x, const std::vector<int>& y) -> int {
    const size_t n = std::max(x.size(), y.size());
    for (size_t i = 0; i < n; ++i) {
      const int xi = i < x.size() ? x[i] : std::numeric_limits<int>::max();
      const int yi = i < y.size() ? y[i] : std::numeric_limits<int>::max();
      if (xi != yi) return xi < yi ? -1 : 1;
    }
    return 0;
  };
  if (int c = lex(a.neg, b.neg)) return c < 0;
  return lex(a.star, b.star) < 0;
}

TruncationPtr enumerate_basis(HalfInt cutoff, std::size_t dim_limit) {
  if (cutoff.twice < 0) throw std::invalid_argument("enumerate_basis: cutoff must be >= 0");
  std::vector<BasisState> out;
  // choose subsets: negs from {-1,-2,...}, stars from {0,1,...}
  std::vector<std::pair<std::vector<int>, std::int64_t>> neg_sets;
  // enumerate neg subsets with weight budget
  std::vector<int> negs;
  std::function<void(std::int64_t, int)> rec_neg = [&](std::int64_t used, int next) {
    neg_sets.emplace_back(negs, used);
    for (int n = next; used + (-2 * n - 1) <= cutoff.twice; --n) {
      negs.push_back(n);
      rec_neg(used + (-2 * n - 1), n - 1);
      negs.pop_back();
    }
  };
  rec_neg(0, -1);
  std::vector<int> stars;
  std::function<void(const std::vector<int>&, std::int64_t, std::int64_t, int)> rec_star =
      [&](const std::vector<int>& negset, std::int64_t neg_used, std::int64_t used, int next) {
        BasisState s;
        s.neg = negset;
        s.star = stars;
        out.push_back(s);
        if (out.size() > dim_limit)
          throw std::invalid_argument("enumerate_basis: dimension exceeds limit " +
                                      std::to_string(dim_limit));
        for (int m = next; used + (2 * m + 1) <= cutoff.twice; ++m) {
          stars.push_back(m);
          rec_star(negset, neg_used, used + (2 * m + 1), m + 1);
          stars.pop_back();
        }
      };
  for (const auto& [negset, w] : neg_sets) rec_star(negset, w, w, 0);

  std::sort(out.begin(), out.end(), basis_order_less);

  auto t = std::make_shared<FockTruncation>();
  t->cutoff = cutoff;
  t->basis = std::move(out);
  std::vector<std::uint8_t> par(t->basis.size());
  std::vector<std::int64_t> en(t->basis.size());
  for (size_t i = 0; i < t->basis.size(); ++i) {
    t->index[t->basis[i]] = static_cast<int>(i);
    par[i] = static_cast<std::uint8_t>(t->basis[i].parity());
    en[i] = energy(t->basis[i], Sector::NS).twice;
  }
  t->space = make_space(std::move(par), std::move(en));
  return t;
}

int FockTruncation::index_of(const BasisState& s) const {
  auto it = index.find(s);
  return it == index.end() ? -1 : it->second;
}

GradedOperator rotation_operator(double theta, Sector sector, const FockTruncation& trunc) {
  GradedOperator op{Matrix::Zero(trunc.dim(), trunc.dim()), trunc.space, trunc.space, Parity::even,
                    HalfInt{}};
  for (int i = 0; i < trunc.dim(); ++i) {
    const HalfInt e = energy(trunc.basis[i], sector);
    // e^{2 pi i theta E} with E = twice/2
    op.mat(i, i) = std::polar(1.0, std::numbers::pi * theta * static_cast<double>(e.twice));
  }
  return op;
}

std::string truncation_to_json(const FockTruncation& trunc) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < trunc.dim(); ++i) {
    const BasisState& s = trunc.basis[i];
    if (i) os << ",";
    os << "{\"neg\":[";
    for (size_t k = 0; k < s.neg.size(); ++k) os << (k ? "," : "") << s.neg[k];
    os << "],\"star\":[";
    for (size_t k = 0; k < s.star.size(); ++k) os << (k ? "," : "") << s.star[k];
    os << "],\"energy_ns\":" << (0.5 * energy(s, Sector::NS).twice)
       << ",\"energy_r\":" << (0.5 * energy(s, Sector::R).twice) << ",\"parity\":" << s.parity() << "}";
  }
  os << "]";
  return os.str();
}

}  // namespace fcft
