#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fcft {

/// Exact half-integer, stored as twice its value. Used for L0 eigenvalues
/// and operator weight shifts, so that q^{L0} exponents never go through
/// floating point.
struct HalfInt {
  std::int64_t twice = 0;

  constexpr HalfInt() = default;
  static constexpr HalfInt from_twice(std::int64_t t) { return HalfInt{t}; }
  static constexpr HalfInt whole(std::int64_t n) { return HalfInt{2 * n}; }

  constexpr bool is_integer() const { return twice % 2 == 0; }
  constexpr double value() const { return 0.5 * static_cast<double>(twice); }

  friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt{a.twice + b.twice}; }
  friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return HalfInt{a.twice - b.twice}; }
  friend constexpr HalfInt operator-(HalfInt a) { return HalfInt{-a.twice}; }
  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string str() const {
    if (is_integer()) return std::to_string(twice / 2);
    return std::to_string(twice) + "/2";
  }

 private:
  constexpr explicit HalfInt(std::int64_t t) : twice(t) {}
};

/// Parses "k", "-k", or "p/2" (e.g. "3/2") into an exact half-integer.
inline HalfInt parse_half_int(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return HalfInt::whole(std::stoll(s));
  if (s.substr(slash + 1) != "2") throw std::invalid_argument("half-integer must have denominator 2: " + s);
  return HalfInt::from_twice(std::stoll(s.substr(0, slash)));
}

}  // namespace fcft
