#include "siegel/type_one.hpp"

#include <algorithm>
#include <cmath>

#include "siegel/error.hpp"
#include "siegel/summation.hpp"

namespace siegel {

double TypeICoeffs::coeff(std::uint64_t d) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), d,
                             [](const auto& e, std::uint64_t key) { return e.first < key; });
  return (it != entries.end() && it->first == d) ? it->second : 0.0;
}

double TypeICoeffs::evaluate(std::uint64_t n, const QuadChar* chi) const {
  return evaluate(n, factorize(n), chi);
}

double TypeICoeffs::evaluate(std::uint64_t n, const Factorization& f, const QuadChar* chi) const {
  if (twist == Twist::chi_cofactor && chi == nullptr) {
    throw ConfigError("TypeICoeffs: twisted sum needs a character");
  }
  CompensatedSum acc;
  for (std::uint64_t d : divisors_of(f, max_key())) {
    const double c = coeff(d);
    if (c == 0.0) continue;
    acc.add(twist == Twist::chi_cofactor ? c * (*chi)(n / d) : c);
  }
  return acc.value();
}

void TypeICoeffs::scatter(std::uint64_t lo, std::span<double> out, const QuadChar* chi) const {
  if (twist == Twist::chi_cofactor && chi == nullptr) {
    throw ConfigError("TypeICoeffs: twisted sum needs a character");
  }
  if (out.empty()) return;
  const std::uint64_t hi = lo + out.size() - 1;
  for (const auto& [d, c] : entries) {
    if (d > hi) break;
    std::uint64_t j = (lo + d - 1) / d;
    for (std::uint64_t m = j * d; m <= hi; m += d, ++j) {
      out[m - lo] += twist == Twist::chi_cofactor ? c * (*chi)(j) : c;
    }
  }
}

double TypeICoeffs::l1_over_d() const {
  CompensatedSum acc;
  for (const auto& [d, c] : entries) acc.add(std::fabs(c) / static_cast<double>(d));
  return acc.value();
}

}  // namespace siegel
