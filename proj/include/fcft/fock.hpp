#pragma once

#include <compare>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fcft/graded.hpp"
#include "fcft/halfint.hpp"

namespace fcft {

enum class Sector { NS, R };

inline const char* sector_name(Sector s) { return s == Sector::NS ? "NS" : "R"; }

/// Occupation record of one Fock basis vector: the canonical word
/// a(z^{neg[0]}) ... a(z^{neg[p-1]}) a(z^{star[0]})* ... a(z^{star[q-1]})* Ω
/// with neg strictly decreasing (all < 0) and star strictly increasing
/// (all >= 0).
struct BasisState {
  std::vector<int> neg;
  std::vector<int> star;

  int parity() const { return static_cast<int>((neg.size() + star.size()) % 2); }
  bool is_vacuum() const { return neg.empty() && star.empty(); }
  bool valid() const;

  auto operator<=>(const BasisState&) const = default;
};

/// L0 eigenvalue of a basis state in the given sector.
/// NS: sum of -(n+1/2) over neg plus (m+1/2) over star; R: sum of -n plus m.
HalfInt energy(const BasisState& s, Sector sector);

/// Enumeration order: by NS energy, then neg list, then star list
/// (elementwise ascending, exhausted lists sort last).
bool basis_order_less(const BasisState& a, const BasisState& b);

/// All basis states with NS energy <= cutoff, enumerated deterministically,
/// vacuum first.
struct FockTruncation {
  HalfInt cutoff;
  std::vector<BasisState> basis;
  std::map<BasisState, int> index;
  SpacePtr space;  // parities and twice NS energies, aligned with basis

  int dim() const { return static_cast<int>(basis.size()); }
  int index_of(const BasisState& s) const;  // -1 when outside the truncation
};

using TruncationPtr = std::shared_ptr<const FockTruncation>;

inline constexpr std::size_t kDefaultDimLimit = 200000;

TruncationPtr enumerate_basis(HalfInt cutoff, std::size_t dim_limit = kDefaultDimLimit);

/// Diagonal unitary e^{2 pi i theta L0^sector} on the truncation.
GradedOperator rotation_operator(double theta, Sector sector, const FockTruncation& trunc);

/// JSON dump: list of {neg, star, energy_ns, energy_r, parity}.
std::string truncation_to_json(const FockTruncation& trunc);

}  // namespace fcft
