#pragma once

// Real primitive quadratic characters chi_Delta = (Delta | .), their L-values
// at s = 1, the quality proxy standing in for a Siegel zero, and the
// exceptional-prime statistics.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace siegel {

// Kronecker symbol (a | n) for n >= 0.
int kronecker(std::int64_t a, std::uint64_t n);

bool is_fundamental_discriminant(std::int64_t delta);

class QuadChar {
 public:
  // Throws ConfigError unless delta is a fundamental discriminant != 1.
  explicit QuadChar(std::int64_t delta);

  std::int64_t delta() const { return delta_; }
  std::uint64_t conductor() const { return conductor_; }

  int operator()(std::uint64_t n) const {
    if (table_) return (*table_)[static_cast<std::size_t>(n % conductor_)];
    return kronecker(delta_, n);
  }

  bool operator==(const QuadChar& other) const { return delta_ == other.delta_; }

 private:
  std::int64_t delta_;
  std::uint64_t conductor_;
  std::shared_ptr<const std::vector<std::int8_t>> table_;
};

inline int chi_eval(const QuadChar& chi, std::uint64_t n) { return chi(n); }

// Primes p in [lo, hi] with chi(p) != -1, ascending.
std::vector<std::uint64_t> exceptional_primes(const QuadChar& chi, std::uint64_t lo,
                                              std::uint64_t hi);

// L(s, chi) for real s > 0: partial sum over complete periods plus an
// Euler-Maclaurin tail per residue class (character sums over a period
// vanish, which cancels the divergent pieces). Throws ComputationError if
// doubling the number of blocks fails to reach tol.
double l_value(const QuadChar& chi, double s, double tol = 1e-12);

double l_one(const QuadChar& chi, double tol = 1e-12);

// L'(1, chi) = -sum chi(n) log n / n.
double l_prime_one(const QuadChar& chi, double tol = 1e-12);

enum class QualityMethod { user_supplied, lprime_ratio };

std::string to_string(QualityMethod m);

struct QualityProxy {
  double eta_hat = 10.0;
  QualityMethod method = QualityMethod::lprime_ratio;
  // Unclamped (L'/L)(1,chi) / log q for the lprime-ratio method.
  double raw_ratio = 0.0;
};

inline constexpr double kMinQuality = 10.0;

// user_eta, when given, must be >= 10. Otherwise eta_hat is the clamped
// ratio (L'/L)(1,chi)/log q_chi.
QualityProxy quality_proxy(const QuadChar& chi, std::optional<double> user_eta = std::nullopt);

// sum_{n <= x} (1*chi)(n)/n via sum_{d <= x} chi(d)/d * H(floor(x/d)).
double one_star_chi_partial(const QuadChar& chi, std::uint64_t x);

struct ExceptionalBand {
  int m = 0;
  double lower = 0;  // q^((1+eps)/(2m))
  double upper = 0;  // q^((1+eps)/(2(m-1)))
  double sum = 0;    // sum of 1/p* over (lower, upper]
  double comparator = 0;  // m / eta^(1/m)
};

struct ExceptionalSumReport {
  std::uint64_t x = 0;
  double eps = 0;
  double eta_hat = 0;
  QualityMethod method = QualityMethod::lprime_ratio;
  double lower = 0;           // q^((1+eps)/2)
  double sum = 0;             // sum of 1/p* over (lower, x]
  std::size_t count = 0;      // number of p* in (lower, x]
  double comparator = 0;      // log_q x / eta
  std::vector<ExceptionalBand> bands;
};

// Throws ConfigError("range-too-small") when x < q^((1+eps)/2).
ExceptionalSumReport exceptional_sum_report(const QuadChar& chi, std::uint64_t x, double eps,
                                            const QualityProxy& eta);

}  // namespace siegel
