#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "siegel/arith_tables.hpp"
#include "siegel/error.hpp"

using namespace siegel;

TEST_CASE("small windows match hand values") {
  const ArithTable t = build_window(1, 12);
  CHECK(t.liouville(12) == -1);
  CHECK(t.von_mangoldt(9) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(t.von_mangoldt(10) == 0.0);
  CHECK(t.smallest_prime_factor(12) == 2);

  const ArithTable one = build_window(1, 1);
  CHECK(one.liouville(1) == 1);
  CHECK(one.moebius(1) == 1);
  CHECK(one.divisor_count(1) == 1);
  CHECK(one.von_mangoldt(1) == 0.0);
  CHECK(one.smallest_prime_factor(1) == 1);
}

TEST_CASE("sieve agrees with trial division for n <= 1e5") {
  const std::uint64_t N = 100000;
  const ArithTable t = build_window(1, N);
  std::uint64_t mismatches = 0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    mismatches += t.liouville(n) != oracle::liouville(n);
    mismatches += t.moebius(n) != oracle::moebius(n);
    mismatches += t.divisor_count(n) != oracle::tau(n);
    mismatches += t.smallest_prime_factor(n) != oracle::spf(n);
    mismatches += std::fabs(t.von_mangoldt(n) - oracle::mangoldt(n)) > 1e-12;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("sieve agrees with trial division on a high window") {
  const std::uint64_t lo = 4'000'000'000'000ULL, hi = lo + 20000;
  const ArithTable t = build_window(lo, hi);
  for (std::uint64_t n = lo; n <= hi; n += 7) {
    REQUIRE(t.liouville(n) == oracle::liouville(n));
    REQUIRE(t.moebius(n) == oracle::moebius(n));
    REQUIRE(t.divisor_count(n) == oracle::tau(n));
    REQUIRE(t.smallest_prime_factor(n) == oracle::spf(n));
    REQUIRE(std::fabs(t.von_mangoldt(n) - oracle::mangoldt(n)) < 1e-12);
  }
}

TEST_CASE("Chebyshev identity sum_{d|n} Lambda(d) = log n for n <= 1e4") {
  const ArithTable t = build_window(1, 10000);
  for (std::uint64_t n = 1; n <= 10000; ++n) {
    double s = 0;
    for (std::uint64_t d : oracle::divisors(n)) s += t.von_mangoldt(d);
    REQUIRE(std::fabs(s - std::log(static_cast<double>(n))) < 1e-9);
  }
}

TEST_CASE("table invariants") {
  const ArithTable t = build_window(1, 100000);
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    const bool squarefree = oracle::is_squarefree(n);
    REQUIRE((t.moebius(n) != 0) == squarefree);
    if (squarefree) REQUIRE(t.moebius(n) == t.liouville(n));
    REQUIRE((t.von_mangoldt(n) > 0) == (oracle::trial_factor(n).size() == 1));
  }
  std::mt19937_64 rng(1);
  int pairs = 0;
  const ArithTable big = build_window(1, 1'000'000);
  while (pairs < 10000) {
    const std::uint64_t m = 1 + rng() % 1000, n = 1 + rng() % 1000;
    if (std::gcd(m, n) != 1) continue;
    ++pairs;
    REQUIRE(big.divisor_count(m * n) == big.divisor_count(m) * big.divisor_count(n));
  }
}

TEST_CASE("windows are seamless over arbitrary partitions") {
  const std::uint64_t N = 60000;
  const ArithTable whole = build_window(1, N);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 3; ++trial) {
    std::uint64_t lo = 1;
    while (lo <= N) {
      const std::uint64_t hi = std::min(N, lo + rng() % 9000);
      const ArithTable part = build_window(lo, hi);
      for (std::uint64_t n = lo; n <= hi; ++n) {
        REQUIRE(part.liouville(n) == whole.liouville(n));
        REQUIRE(part.moebius(n) == whole.moebius(n));
        REQUIRE(part.divisor_count(n) == whole.divisor_count(n));
        REQUIRE(part.von_mangoldt(n) == whole.von_mangoldt(n));
        REQUIRE(part.smallest_prime_factor(n) == whole.smallest_prime_factor(n));
      }
      lo = hi + 1;
    }
  }
}

TEST_CASE("build_window rejects bad ranges") {
  CHECK_THROWS_AS(build_window(0, 10), ConfigError);
  CHECK_THROWS_AS(build_window(10, 9), ConfigError);
  CHECK_THROWS_AS(build_window(1, 1000, 100), ConfigError);
  CHECK_THROWS_AS(build_window(1, kMaxHi + 1), ConfigError);
}

TEST_CASE("smooth_rough_split") {
  CHECK(smooth_rough_split(12, 2.5).smooth == 4);
  CHECK(smooth_rough_split(12, 2.5).rough == 3);
  CHECK(smooth_rough_split(1, 7).smooth == 1);
  CHECK(smooth_rough_split(1, 7).rough == 1);
  CHECK(smooth_rough_split(101, 10).smooth == 1);
  CHECK(smooth_rough_split(101, 10).rough == 101);

  // f(n) = f(smooth) f(rough) for multiplicative f.
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t n = 1 + rng() % 1'000'000;
    const double z = 1.5 + static_cast<double>(rng() % 2000) / 7.0;
    const SmoothRough s = smooth_rough_split(n, z);
    REQUIRE(s.smooth * s.rough == n);
    for (auto [p, e] : oracle::trial_factor(s.smooth)) REQUIRE(static_cast<double>(p) <= z);
    for (auto [p, e] : oracle::trial_factor(s.rough)) REQUIRE(static_cast<double>(p) > z);
    REQUIRE(oracle::tau(n) == oracle::tau(s.smooth) * oracle::tau(s.rough));
    REQUIRE(oracle::moebius(n) == oracle::moebius(s.smooth) * oracle::moebius(s.rough));
  }
}

TEST_CASE("landreau_factor") {
  const LandreauFactorization f = landreau_factor(64, 8, 4);
  std::uint64_t prod = f.rough;
  for (auto p : f.parts) {
    CHECK(p <= 8);
    prod *= p;
  }
  CHECK(prod == 64);
  CHECK(static_cast<double>(f.parts.size()) <= 1 + std::log(64.0) / std::log(2.0));

  CHECK(landreau_factor(1, 8, 4).rough == 1);
  CHECK(landreau_factor(1, 8, 4).parts.empty());
  CHECK(landreau_factor(101, 8, 4).rough == 101);
  CHECK(landreau_factor(101, 8, 4).parts.empty());
  CHECK_THROWS_AS(landreau_factor(64, 4, 4), ConfigError);

  std::mt19937_64 rng(8);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t n = 1 + rng() % 100'000'000;
    const double z = 2 + static_cast<double>(rng() % 50);
    const double y = z * (1.5 + static_cast<double>(rng() % 100));
    const LandreauFactorization lf = landreau_factor(n, y, z);
    std::uint64_t p = lf.rough;
    for (auto part : lf.parts) {
      REQUIRE(static_cast<double>(part) <= y);
      REQUIRE(static_cast<double>(oracle::trial_factor(part).back().p) <= z);
      p *= part;
    }
    REQUIRE(p == n);
    REQUIRE(static_cast<double>(lf.parts.size()) <= 1 + std::log(double(n)) / std::log(y / z) + 1e-9);
    int omega = 0;
    for (auto [q, e] : oracle::trial_factor(lf.rough)) {
      REQUIRE(static_cast<double>(q) > z);
      omega += e;
    }
    REQUIRE(omega <= std::log(double(n)) / std::log(z) + 1e-9);
  }
}

TEST_CASE("divisors_up_to") {
  CHECK(divisors_up_to(12, 4) == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(divisors_up_to(1, 10) == std::vector<std::uint64_t>{1});
  CHECK(divisors_up_to(97, 1) == std::vector<std::uint64_t>{1});
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const std::uint64_t n = 1 + rng() % 200000, b = 1 + rng() % 3000;
    std::vector<std::uint64_t> want;
    for (auto d : oracle::divisors(n)) {
      if (d <= b) want.push_back(d);
    }
    REQUIRE(divisors_up_to(n, b) == want);
  }
}

TEST_CASE("factor window matches trial division") {
  const FactorWindow fw(999'000, 1'001'000);
  for (std::uint64_t n = 999'000; n <= 1'001'000; ++n) {
    const auto f = fw.factors(n);
    const auto want = oracle::trial_factor(n);
    REQUIRE(f.size() == want.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      REQUIRE(f[i].p == want[i].p);
      REQUIRE(static_cast<int>(f[i].e) == want[i].e);
    }
  }
}

TEST_CASE("primes") {
  const auto ps = primes_up_to(10000);
  std::size_t count = 0;
  for (std::uint64_t n = 2; n <= 10000; ++n) count += oracle::is_prime(n);
  CHECK(ps.size() == count);
  CHECK(primes_in(1'000'000'000, 1'000'000'100) ==
        std::vector<std::uint64_t>{1000000007, 1000000009, 1000000021, 1000000033, 1000000087,
                                   1000000093, 1000000097});
  CHECK(is_prime(1'000'000'007));
  CHECK_FALSE(is_prime(1'000'000'011));
}

TEST_CASE("window cache round-trips") {
  const auto dir = std::filesystem::temp_directory_path() / "siegel_lab_cache_test";
  std::filesystem::remove_all(dir);
  const ArithTable built = cached_window(dir, 1000, 5000);
  CHECK(std::filesystem::exists(cache_path(dir, 1000, 5000)));
  const ArithTable loaded = cached_window(dir, 1000, 5000);
  CHECK(loaded == built);
  CHECK(loaded == build_window(1000, 5000));
  std::filesystem::remove_all(dir);
}
