#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "siegel/arith_tables.hpp"
#include "siegel/quad_char.hpp"

namespace siegel {

enum class Twist { none, chi_cofactor };

// A finite Type I sum n -> sum_{d | n, d <= cutoff} c_d, or with the
// character cofactor sum_{d | n} c_d chi(n/d). Entries are sorted by d and
// only nonzero coefficients are stored.
struct TypeICoeffs {
  double cutoff = 0;
  Twist twist = Twist::none;
  std::vector<std::pair<std::uint64_t, double>> entries;

  double coeff(std::uint64_t d) const;
  std::uint64_t max_key() const { return entries.empty() ? 0 : entries.back().first; }

  // Sum over divisors of n. chi is required for Twist::chi_cofactor.
  double evaluate(std::uint64_t n, const QuadChar* chi = nullptr) const;
  double evaluate(std::uint64_t n, const Factorization& f, const QuadChar* chi = nullptr) const;

  // out[n - lo] += value at n for every n in [lo, lo + out.size()), by
  // scattering each coefficient over its multiples.
  void scatter(std::uint64_t lo, std::span<double> out, const QuadChar* chi = nullptr) const;

  // sum_d |c_d| / d
  double l1_over_d() const;
};

}  // namespace siegel
