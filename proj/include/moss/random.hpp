// Deterministic RNG used everywhere randomness is needed. Distributions are
// implemented by hand on top of mt19937_64 raw output so that results are
// identical across standard library implementations, which is what lets a
// parallel run reproduce a serial one bit for bit.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace moss {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for (seed, salt); used to hand each tree / fold its own
// generator so work order never affects results.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(splitmix64(seed) ^ splitmix64(~salt));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return eng_(); }

  // Unbiased integer in [0, n) via rejection sampling.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return v % n;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Standard normal, Box-Muller. The pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // First k elements of a Fisher-Yates pass over [0, n); used for feature
  // subsampling. Result order is the sampling order.
  void sample_without_replacement(int n, int k, std::vector<int>& out) {
    scratch_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) scratch_[static_cast<std::size_t>(i)] = i;
    out.clear();
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
      std::swap(scratch_[static_cast<std::size_t>(i)], scratch_[static_cast<std::size_t>(j)]);
      out.push_back(scratch_[static_cast<std::size_t>(i)]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
  std::vector<int> scratch_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace moss
