#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "siegel/error.hpp"
#include "siegel/selberg.hpp"
#include "siegel/smoothing.hpp"

using namespace siegel;

namespace {

double nu_oracle(std::uint64_t n, double R) {
  double s = 0;
  for (std::uint64_t d : oracle::divisors(n)) s += oracle::moebius(d) * psi_le(R, static_cast<double>(d));
  return s * s;
}

}  // namespace

TEST_CASE("nu_direct small cases") {
  for (double R : {10.0, 30.0, 500.0}) {
    CHECK(nu_direct(1, R) == 1.0);
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 101ULL, 503ULL, 1009ULL}) {
      if (static_cast<double>(p) >= R) CHECK(nu_direct(p, R) == 1.0);
      if (static_cast<double>(p) <= std::sqrt(R)) CHECK(nu_direct(p, R) == 0.0);
    }
  }
}

TEST_CASE("nu_direct against the squared Moebius sum") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t n = 1 + rng() % 200000;
    const double R = 2.5 + static_cast<double>(rng() % 800);
    REQUIRE(std::fabs(nu_direct(n, R) - nu_oracle(n, R)) < 1e-12);
  }
}

TEST_CASE("nu_weights expansion") {
  for (double R : {5.0, 30.0, 100.0, 500.0}) {
    const TypeICoeffs w = nu_weights(R);
    CHECK(w.coeff(1) == 1.0);
    for (const auto& [d, a] : w.entries) {
      REQUIRE(oracle::is_squarefree(d));
      REQUIRE(static_cast<double>(d) < R * R);
      if (oracle::is_prime(d)) {
        const double s = psi_le(R, static_cast<double>(d));
        REQUIRE(a == doctest::Approx(-2 * s + s * s).epsilon(1e-12));
        if (static_cast<double>(d) <= std::sqrt(R)) REQUIRE(a == doctest::Approx(-1.0));
      }
    }
    std::mt19937_64 rng(static_cast<std::uint64_t>(R));
    for (int i = 0; i < 1000; ++i) {
      const std::uint64_t n = 1 + rng() % 100000;
      double s = 0;
      for (std::uint64_t d : oracle::divisors(n)) s += w.coeff(d);
      REQUIRE(std::fabs(s - nu_direct(n, R)) < 1e-10);
    }
    const auto window = nu_window(w, 50000, 60000);
    for (std::uint64_t n = 50000; n <= 60000; n += 13) {
      REQUIRE(std::fabs(window[n - 50000] - nu_oracle(n, R)) < 1e-10);
    }
    CHECK(std::isfinite(w.l1_over_d()));
  }
  CHECK_THROWS_AS(nu_weights(5000.0), ConfigError);
  CHECK_THROWS_AS(nu_weights(100.0, 1000), ConfigError);
}

TEST_CASE("Selberg majorant holds on [1, 1e6]") {
  const ArithTable t = build_window(1, 1'000'000);
  for (double R : {30.0, 100.0, 500.0}) {
    const MajorantReport m = majorant_check(t, R);
    CHECK(m.violations == 0);
    CHECK(m.rough_count > 0);
    CHECK(m.min_nu_on_rough >= 1.0 - 1e-10);
  }
}

TEST_CASE("nusieve_lhs") {
  CHECK(nusieve_lhs(10000, {}, {}, 30.0) == 1.0);
  const Congruence bad[] = {{2, 0}, {2, 1}};
  CHECK(nusieve_lhs(10000, bad, {}, 30.0) == 0.0);

  // Naive loop at x = 1e4.
  const double R = 40.0;
  const std::uint64_t x = 10000;
  const Congruence sieved[] = {{3, 0}, {1, 2}};
  const Congruence extra[] = {{5, 7}};
  double naive = 0;
  for (std::uint64_t n = 1; n <= x; ++n) {
    if ((n + 0) % 3 || (n + 7) % 5) continue;
    naive += nu_oracle(n, R) * nu_oracle(n + 2, R);
  }
  naive /= static_cast<double>(x);
  CHECK(std::fabs(nusieve_lhs(x, sieved, extra, R) - naive) < 1e-12);

  const auto ratios = nusieve_skeleton_ratios(naive, sieved, extra, R);
  CHECK(ratios.size() == 3);
}

TEST_CASE("nusieve_lhs shrinks when a small prime divides d_1") {
  std::mt19937_64 rng(12);
  const std::uint64_t primes[] = {2, 3, 5, 7};
  for (int i = 0; i < 20; ++i) {
    const double R = 20.0 + static_cast<double>(rng() % 80);
    const std::uint64_t h2 = 1 + rng() % 10;
    const std::uint64_t p = primes[rng() % 4];
    const Congruence base[] = {{1, 0}, {1, h2}};
    const Congruence divided[] = {{p, 0}, {1, h2}};
    const double lhs0 = nusieve_lhs(1'000'000, base, {}, R);
    const double lhs1 = nusieve_lhs(1'000'000, divided, {}, R);
    REQUIRE(lhs1 <= lhs0);
  }
}
