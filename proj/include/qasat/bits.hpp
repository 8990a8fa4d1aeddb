#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace qasat {

/// Largest register handled by the exhaustive routines and the simulator.
inline constexpr int kDefaultMaxBits = 26;

/// A fixed-length bit string |b1 b2 ... bN>, doubling as a 2-SAT assignment
/// and a computational basis state. Bit 1 is the leftmost character and the
/// most significant bit of index(): index = sum_i b_i 2^(N-i). A set bit means
/// variable x_i is true, equivalently spin s_i = +1.
class BitString {
 public:
  BitString() = default;
  BitString(int n, std::uint64_t index) : n_(n), index_(index) {
    if (n < 0 || n > 63) throw InputError("bit string length out of range");
    if ((index >> n) != 0) throw InputError("index does not fit in bit string");
  }

  static BitString parse(std::string_view text) {
    std::uint64_t index = 0;
    for (char c : text) {
      if (c != '0' && c != '1') throw InputError("bit string must contain only 0/1: " + std::string(text));
      index = (index << 1) | static_cast<std::uint64_t>(c == '1');
    }
    return BitString(static_cast<int>(text.size()), index);
  }

  static BitString from_bools(const std::vector<bool>& bits) {
    std::uint64_t index = 0;
    for (bool b : bits) index = (index << 1) | static_cast<std::uint64_t>(b);
    return BitString(static_cast<int>(bits.size()), index);
  }

  int size() const noexcept { return n_; }
  std::uint64_t index() const noexcept { return index_; }

  /// Mask selecting position `pos` (0-based from the left) inside index().
  static std::uint64_t mask(int n, int pos) noexcept { return std::uint64_t{1} << (n - 1 - pos); }

  /// Bit at 0-based position `pos`, i.e. the value of variable x_{pos+1}.
  bool operator[](int pos) const noexcept { return (index_ & mask(n_, pos)) != 0; }

  /// Spin value s = +1 for a set bit, -1 otherwise.
  int spin(int pos) const noexcept { return (*this)[pos] ? 1 : -1; }

  BitString flipped(int pos) const { return BitString(n_, index_ ^ mask(n_, pos)); }

  std::string str() const {
    std::string out(static_cast<std::size_t>(n_), '0');
    for (int i = 0; i < n_; ++i)
      if ((*this)[i]) out[static_cast<std::size_t>(i)] = '1';
    return out;
  }

  friend bool operator==(const BitString&, const BitString&) = default;
  friend auto operator<=>(const BitString&, const BitString&) = default;

 private:
  int n_ = 0;
  std::uint64_t index_ = 0;
};

using Assignment = BitString;
using BasisState = BitString;

inline int hamming_distance(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw InputError("hamming distance of unequal lengths");
  return __builtin_popcountll(a.index() ^ b.index());
}

}  // namespace qasat
