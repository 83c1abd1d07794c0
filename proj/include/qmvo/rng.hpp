#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qmvo {

// Stateless mixer used to derive independent stream seeds from a master
// seed plus cell keys (n, B, instance index, repeat, ...).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> keys) {
  std::uint64_t s = splitmix64(base);
  for (std::uint64_t k : keys) s = splitmix64(s ^ (k + 0x9e3779b97f4a7c15ULL));
  return s;
}

// mt19937_64 is fully specified by the standard; uniform doubles are made
// by explicit bit manipulation instead of std::uniform_real_distribution,
// so streams reproduce across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, count), rejection-sampled to avoid modulo bias.
  std::uint64_t uniform_index(std::uint64_t count) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % count;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % count;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace qmvo
