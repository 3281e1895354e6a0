#include "siegel/selberg.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "siegel/error.hpp"
#include "siegel/smoothing.hpp"
#include "siegel/summation.hpp"

namespace siegel {

namespace {

// Squarefree d < R with mu(d) psi_{<=R}(d) != 0, paired with that value.
std::vector<std::pair<std::uint64_t, double>> sieve_support(double R) {
  const auto limit = static_cast<std::uint64_t>(std::ceil(R));
  std::vector<std::pair<std::uint64_t, double>> out;
  if (limit < 1) return out;
  const ArithTable t = build_window(1, limit);
  for (std::uint64_t d = 1; d <= limit; ++d) {
    const int mu = t.moebius(d);
    if (mu == 0) continue;
    const double w = psi_le(R, static_cast<double>(d));
    if (w != 0.0) out.emplace_back(d, mu * w);
  }
  return out;
}

}  // namespace

double nu_direct(const Factorization& f, double R) {
  // Only squarefree divisors carry mu != 0: enumerate subsets of the primes.
  CompensatedSum acc;
  const std::size_t k = f.size();
  std::vector<std::uint64_t> prods{1};
  std::vector<int> signs{1};
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t count = prods.size();
    for (std::size_t j = 0; j < count; ++j) {
      const long double next = static_cast<long double>(prods[j]) * f[i].p;
      if (next >= R) continue;  // psi_{<=R}(d) = 0 for d >= R
      prods.push_back(prods[j] * f[i].p);
      signs.push_back(-signs[j]);
    }
  }
  for (std::size_t j = 0; j < prods.size(); ++j) {
    acc.add(signs[j] * psi_le(R, static_cast<double>(prods[j])));
  }
  const double s = acc.value();
  return s * s;
}

double nu_direct(std::uint64_t n, double R) {
  if (n < 1) throw ConfigError("nu_direct: n must be >= 1");
  if (!(R > 1)) throw ConfigError("nu_direct: R must exceed 1");
  return nu_direct(factorize(n), R);
}

TypeICoeffs nu_weights(double R, std::uint64_t support_bound) {
  if (!(R > 1)) throw ConfigError("nu_weights: R must exceed 1");
  if (R * R > static_cast<double>(support_bound)) {
    throw ConfigError("R-too-large: R^2 = " + std::to_string(R * R) + " exceeds " +
                      std::to_string(support_bound));
  }
  const auto support = sieve_support(R);
  const auto size = static_cast<std::size_t>(std::floor(R * R)) + 1;
  std::vector<double> dense(size, 0.0);
  for (const auto& [d1, w1] : support) {
    for (const auto& [d2, w2] : support) {
      const std::uint64_t l = std::lcm(d1, d2);
      dense[l] += w1 * w2;
    }
  }
  TypeICoeffs out;
  out.cutoff = R * R;
  out.twist = Twist::none;
  for (std::size_t d = 1; d < size; ++d) {
    if (dense[d] != 0.0) out.entries.emplace_back(d, dense[d]);
  }
  return out;
}

std::vector<double> nu_window(const TypeICoeffs& weights, std::uint64_t lo, std::uint64_t hi) {
  std::vector<double> out(static_cast<std::size_t>(hi - lo + 1), 0.0);
  weights.scatter(lo, out);
  return out;
}

MajorantReport majorant_check(const ArithTable& table, double R) {
  const TypeICoeffs w = nu_weights(R);
  const std::vector<double> nu = nu_window(w, table.lo, table.hi);
  MajorantReport rep;
  rep.min_nu_on_rough = INFINITY;
  for (std::uint64_t n = table.lo; n <= table.hi; ++n) {
    const bool rough = n == 1 || static_cast<double>(table.smallest_prime_factor(n)) > R;
    if (!rough) continue;
    const double v = nu[n - table.lo];
    ++rep.rough_count;
    rep.min_nu_on_rough = std::min(rep.min_nu_on_rough, v);
    if (1.0 > v + 1e-10) {
      if (rep.violations == 0) rep.first_violation = n;
      ++rep.violations;
    }
  }
  return rep;
}

double nusieve_lhs(std::uint64_t x, std::span<const Congruence> sieved,
                   std::span<const Congruence> extra, double R) {
  if (x < 1) throw ConfigError("nusieve_lhs: x must be >= 1");
  std::vector<Congruence> all(sieved.begin(), sieved.end());
  all.insert(all.end(), extra.begin(), extra.end());
  for (const auto& c : all) {
    if (c.modulus > x) throw ConfigError("nusieve_lhs: every d must be <= x");
  }
  const auto cls = crt_merge(all);
  if (!cls) return 0.0;
  if (sieved.empty()) {
    const std::uint64_t first = cls->residue == 0 ? cls->modulus : cls->residue;
    const std::uint64_t count = first > x ? 0 : (x - first) / cls->modulus + 1;
    return static_cast<double>(count) / static_cast<double>(x);
  }
  std::uint64_t max_h = 0;
  for (const auto& c : sieved) max_h = std::max(max_h, c.shift);
  const TypeICoeffs w = nu_weights(R);
  CompensatedSum acc;
  const std::uint64_t first = cls->residue == 0 ? cls->modulus : cls->residue;
  constexpr std::uint64_t kWindow = std::uint64_t{1} << 20;
  for (std::uint64_t lo = 1; lo <= x; lo += kWindow) {
    const std::uint64_t hi = std::min(x, lo + kWindow - 1);
    std::uint64_t n = first >= lo ? first : first + (lo - first + cls->modulus - 1) / cls->modulus * cls->modulus;
    if (n > hi) continue;
    const auto nu = nu_window(w, lo, hi + max_h);
    for (; n <= hi; n += cls->modulus) {
      double prod = 1.0;
      for (const auto& c : sieved) prod *= nu[n + c.shift - lo];
      acc.add(prod);
    }
  }
  return acc.value() / static_cast<double>(x);
}

std::vector<double> nusieve_skeleton_ratios(double lhs, std::span<const Congruence> sieved,
                                            std::span<const Congruence> extra, double R) {
  long double prod = 1;
  std::uint64_t prod_int = 1;
  bool overflow = false;
  for (const auto* group : {&sieved, &extra}) {
    for (const auto& c : *group) {
      prod *= c.modulus;
      if (prod_int > (std::uint64_t{1} << 62) / c.modulus) overflow = true;
      else prod_int *= c.modulus;
    }
  }
  double tau = 1;
  if (!overflow) {
    for (const auto& pp : factorize(prod_int)) tau *= pp.e + 1;
  }
  const double logk = std::pow(std::log(R), static_cast<double>(sieved.size()));
  std::vector<double> out;
  for (int C = 1; C <= 3; ++C) {
    const double skeleton = std::pow(tau, C) / (static_cast<double>(prod) * logk);
    out.push_back(lhs / skeleton);
  }
  return out;
}

}  // namespace siegel
