#pragma once

// Kloosterman sums, Fourier coefficients of periodic weights restricted to
// the hyperbola n1 n2 = a (q), the modified Fourier expansion, and character
// sums with polynomial arguments. Everything is an exact double loop over
// residues at desk-scale moduli.

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "siegel/quad_char.hpp"

namespace siegel {

using cplx = std::complex<double>;

std::uint64_t gcd3(std::uint64_t a, std::uint64_t b, std::uint64_t c);
std::uint64_t divisor_count(std::uint64_t n);

// e_q(k) = exp(2 pi i k / q) for k = 0..q-1.
class RootTable {
 public:
  explicit RootTable(std::uint64_t q);
  std::uint64_t modulus() const { return q_; }
  cplx operator()(std::uint64_t k) const { return roots_[k % q_]; }

 private:
  std::uint64_t q_;
  std::vector<cplx> roots_;
};

// f(n1, n2) with period q0 in each variable, |f| <= 1.
struct PeriodicWeight {
  std::uint64_t q0 = 1;
  std::vector<cplx> values;  // row-major, index (n1 mod q0) * q0 + (n2 mod q0)

  cplx operator()(std::uint64_t n1, std::uint64_t n2) const {
    return values[(n1 % q0) * q0 + (n2 % q0)];
  }

  static PeriodicWeight constant(std::uint64_t q0, cplx v = 1.0);
  // Uniform in the unit disk, deterministic for a given generator state.
  static PeriodicWeight random(std::uint64_t q0, std::mt19937_64& rng);
  // Throws ConfigError unless every |value| <= 1 + 1e-12 and the size is q0^2.
  void validate() const;
};

// S(u1, u2; q) = sum_{(x, q) = 1} e_q(u1 x + u2 x^{-1}).
cplx kloosterman(std::int64_t u1, std::int64_t u2, std::uint64_t q);
cplx kloosterman(std::int64_t u1, std::int64_t u2, std::uint64_t q, const RootTable& roots);

// tau(q) sqrt(q) gcd(u1, u2, q)^{1/2}
double estermann_bound(std::int64_t u1, std::int64_t u2, std::uint64_t q);

// E_{n1, n2 mod q} f(n1, n2) 1_{n1 n2 = a (q)} e_q(u1 n1 + u2 n2).
// Throws ConfigError unless q0 | q, gcd(a, q) | q0 and f has period q0.
cplx hyperbola_fourier_coeff(std::uint64_t q, std::int64_t a, const PeriodicWeight& f,
                             std::int64_t u1, std::int64_t u2);

// All q^2 coefficients at once; entry u1 * q + u2.
std::vector<cplx> hyperbola_fourier_all(std::uint64_t q, std::int64_t a, const PeriodicWeight& f);

// tau(q0)^2 q0^{3/2} tau(q) q^{-3/2} gcd(u1, u2, q)^{1/2}
double hyperbola_bound(std::uint64_t q, std::uint64_t q0, std::int64_t u1, std::int64_t u2);

struct MfeDecomposition {
  std::uint64_t q = 0, q0 = 0, q0_prime = 0;
  std::int64_t a = 0;
  double alpha = 0;
  // c_{u1,u2} for every (u1, u2) mod q, entry u1 * q + u2; the expansion uses
  // only those with q/q0 dividing neither u1 nor u2.
  std::vector<cplx> coeffs;

  // Largest |c| over pairs that the expansion excludes (should be ~0).
  double max_excluded() const;
  // Largest |c| / (2 * hyperbola_bound) over the included pairs.
  double max_bound_ratio() const;
  // Max over all (n1, n2) mod q of |lhs - main - fourier| for the weight f.
  double identity_residual(const PeriodicWeight& f) const;
};

MfeDecomposition mfe_decompose(std::uint64_t q, std::int64_t a, const PeriodicWeight& f);

struct CharShiftTerm {
  std::uint64_t h = 0;
  std::uint64_t d = 1;        // condition d | n + h
  std::uint64_t d_prime = 0;  // 0: no character factor; else chi((n + h) / d_prime), d_prime | d
};

struct CharShiftSum {
  double value = 0;     // E_{n <= x} 1_I(n) prod 1_{d|n+h} prod_J chi((n+h)/d')
  double skeleton = 0;  // q^{1/2} (prod d, q)^{1/2} (1/(q prod d) + 1/x)
  double ratio = 0;     // |value| / skeleton
};

// Throws ConfigError unless J is nonempty and every d' divides its d.
CharShiftSum char_shift_sum(const QuadChar& chi, std::span<const CharShiftTerm> terms,
                            std::uint64_t lo, std::uint64_t hi, std::uint64_t x);

struct WeilScan {
  std::size_t intervals = 0;
  std::size_t violations = 0;
  double max_ratio = 0;  // max |sum| / bound
};

// |sum_{n in I} chi((n + h1)(n + h2))| against
//   2 sqrt(q) (ceil(|I|/q) + 1) * A,  A = tau(q) (1 + log q) gcd(q, h1 - h2)^{1/2} / 2.
double weil_interval_bound(const QuadChar& chi, std::uint64_t h1, std::uint64_t h2,
                           std::uint64_t length);
double weil_interval_sum(const QuadChar& chi, std::uint64_t h1, std::uint64_t h2,
                         std::uint64_t lo, std::uint64_t hi);
WeilScan weil_interval_scan(const QuadChar& chi, std::uint64_t h1, std::uint64_t h2,
                            std::size_t count, std::mt19937_64& rng);

}  // namespace siegel
