// Determinism helpers: seed derivation, the hand-rolled RNG, and the
// worker pool. Everything downstream leans on these being reproducible,
// so the properties here are load-bearing.
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "moss/parallel.hpp"
#include "moss/random.hpp"

TEST_SUITE_BEGIN("support");

TEST_CASE("derive_seed is deterministic and salt-sensitive") {
  CHECK(moss::derive_seed(42, 7) == moss::derive_seed(42, 7));
  CHECK(moss::derive_seed(42, 7) != moss::derive_seed(42, 8));
  CHECK(moss::derive_seed(42, 7) != moss::derive_seed(43, 7));

  // No collisions across a modest grid of (seed, salt) pairs.
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed)
    for (std::uint64_t salt = 0; salt < 64; ++salt)
      seen.insert(moss::derive_seed(seed, salt));
  CHECK(seen.size() == 64u * 64u);
}

TEST_CASE("Rng streams are reproducible per seed") {
  moss::Rng a(123), b(123), c(124);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("Rng::below stays in range and hits every residue") {
  moss::Rng rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.below(7);
    REQUIRE(v < 7);
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int c : counts) CHECK(c > 0);
}

TEST_CASE("Rng::uniform01 lies in [0, 1)") {
  moss::Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("Rng::normal has roughly standard moments") {
  moss::Rng rng(2024);
  const int n = 20000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("sample_without_replacement returns k distinct values in range") {
  moss::Rng rng(77);
  std::vector<int> out;
  for (int trial = 0; trial < 50; ++trial) {
    rng.sample_without_replacement(10, 4, out);
    REQUIRE(out.size() == 4);
    std::set<int> uniq(out.begin(), out.end());
    CHECK(uniq.size() == 4);
    CHECK(*uniq.begin() >= 0);
    CHECK(*uniq.rbegin() < 10);
  }
  // k == n yields a full permutation.
  rng.sample_without_replacement(6, 6, out);
  std::vector<int> sorted = out;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expect(6);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(sorted == expect);
}

TEST_CASE("shuffle permutes without losing elements") {
  moss::Rng rng(31);
  std::vector<int> v(25);
  std::iota(v.begin(), v.end(), 0);
  const std::vector<int> original = v;
  rng.shuffle(v);
  CHECK(v != original);  // 25! makes a fixed-point astronomically unlikely
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == original);

  // Same seed, same permutation.
  moss::Rng rng2(31);
  std::vector<int> w = original;
  rng2.shuffle(w);
  CHECK(w == v);
}

TEST_CASE("parallel_for covers every index exactly once") {
  const int n = 257;
  std::vector<std::atomic<int>> hits(n);
  for (auto& h : hits) h.store(0);
  moss::parallel_for(n, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("parallel_for result matches serial execution") {
  const int n = 100;
  auto run = [&](int threads) {
    moss::set_max_threads(threads);
    std::vector<double> slot(n, 0.0);
    moss::parallel_for(n, [&](int i) {
      moss::Rng rng(moss::derive_seed(11, static_cast<std::uint64_t>(i)));
      slot[static_cast<std::size_t>(i)] = rng.uniform01() + i;
    });
    moss::set_max_threads(0);
    return slot;
  };
  CHECK(run(1) == run(8));
}

TEST_CASE("parallel_for propagates exceptions from the body") {
  CHECK_THROWS_AS(
      moss::parallel_for(16, [](int i) {
        if (i == 7) throw std::runtime_error("boom");
      }),
      std::runtime_error);
}

TEST_SUITE_END();
