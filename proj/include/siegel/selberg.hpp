#pragma once

// Smoothed Selberg sieve nu(n) = (sum_{d | n} mu(d) psi_{<=R}(d))^2 and its
// Type I expansion nu(n) = sum_{d | n, d <= R^2} a_d.

#include <cstdint>
#include <span>
#include <vector>

#include "siegel/arith_tables.hpp"
#include "siegel/crt.hpp"
#include "siegel/type_one.hpp"

namespace siegel {

inline constexpr std::uint64_t kDefaultNuSupportBound = 10'000'000;

double nu_direct(std::uint64_t n, double R);
double nu_direct(const Factorization& f, double R);

// a_d = sum_{[d1,d2] = d} mu(d1) psi_{<=R}(d1) mu(d2) psi_{<=R}(d2).
// Throws ConfigError("R-too-large") when R^2 exceeds support_bound.
TypeICoeffs nu_weights(double R, std::uint64_t support_bound = kDefaultNuSupportBound);

// nu over [lo, hi] from the weights.
std::vector<double> nu_window(const TypeICoeffs& weights, std::uint64_t lo, std::uint64_t hi);

struct MajorantReport {
  std::uint64_t violations = 0;
  std::uint64_t rough_count = 0;     // n in the window with 1_(>R)(n) = 1
  double min_nu_on_rough = 0;        // should be >= 1
  std::uint64_t first_violation = 0; // 0 when none
};

// Counts n in the table window with 1_(>R)(n) > nu(n) + 1e-10.
MajorantReport majorant_check(const ArithTable& table, double R);

// E_{n <= x} prod_j nu(n + h_j) 1_{d_j | n + h_j} prod_j' 1_{d'_j' | n + h'_j'}.
double nusieve_lhs(std::uint64_t x, std::span<const Congruence> sieved,
                   std::span<const Congruence> extra, double R);

// Ratios LHS / (tau(prod d)^C / (prod d * log^k R)) for C = 1, 2, 3.
std::vector<double> nusieve_skeleton_ratios(double lhs, std::span<const Congruence> sieved,
                                            std::span<const Congruence> extra, double R);

}  // namespace siegel
