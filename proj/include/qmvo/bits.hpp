#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace qmvo {

// Basis-index convention used across the whole library: basis index l
// encodes the bit vector x through x_i = (l >> i) & 1, so asset/qubit 0
// is the least significant bit.

inline int bit_of(std::uint64_t l, int i) { return static_cast<int>((l >> i) & 1u); }

inline int popcount(std::uint64_t l) { return std::popcount(l); }

inline std::vector<int> decode_bits(std::uint64_t l, int n) {
  std::vector<int> x(n);
  for (int i = 0; i < n; ++i) x[i] = bit_of(l, i);
  return x;
}

inline std::uint64_t encode_bits(const std::vector<int>& x) {
  std::uint64_t l = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) l |= std::uint64_t{1} << i;
  return l;
}

// Bit-string display convention: x_0 x_1 ... x_{n-1}, leftmost first.
inline std::string bitstring(std::uint64_t l, int n) {
  std::string s(n, '0');
  for (int i = 0; i < n; ++i)
    if (bit_of(l, i)) s[i] = '1';
  return s;
}

}  // namespace qmvo
