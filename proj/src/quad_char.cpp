#include "siegel/quad_char.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>

#include "siegel/arith_tables.hpp"
#include "siegel/error.hpp"
#include "siegel/summation.hpp"

namespace siegel {

namespace {

using u64 = std::uint64_t;

constexpr u64 kTableLimit = u64{1} << 24;

// Jacobi symbol (a | n), n odd, 0 <= a < n.
int jacobi(u64 a, u64 n) {
  int result = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      const u64 r = n & 7;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

u64 reduce_signed(std::int64_t a, u64 n) {
  if (a >= 0) return static_cast<u64>(a) % n;
  const u64 r = static_cast<u64>(-(a + 1)) % n;
  return n - 1 - r;
}

bool squarefree(u64 n) {
  for (const auto& pp : factorize(n)) {
    if (pp.e > 1) return false;
  }
  return true;
}

u64 abs_u64(std::int64_t v) {
  return v < 0 ? static_cast<u64>(-(v + 1)) + 1 : static_cast<u64>(v);
}

// Bernoulli numbers B_2, B_4, B_6, B_8 divided by (2j)!.
constexpr std::array<double, 4> kBernoulliOverFactorial{
    1.0 / 6.0 / 2.0, -1.0 / 30.0 / 24.0, 1.0 / 42.0 / 720.0, -1.0 / 30.0 / 40320.0};

// Summand g(u) with its antiderivative and odd derivatives, for the
// Euler-Maclaurin tail of sum_{m >= M} g(mq + r).
struct Summand {
  enum class Kind { power, log_over_u } kind;
  double s = 1.0;

  double value(double u) const {
    return kind == Kind::power ? std::pow(u, -s) : std::log(u) / u;
  }

  double antiderivative(double u) const {
    if (kind == Kind::log_over_u) return 0.5 * std::log(u) * std::log(u);
    if (s == 1.0) return std::log(u);
    return std::pow(u, 1.0 - s) / (1.0 - s);
  }

  double derivative(int k, double u) const {
    if (kind == Kind::power) {
      double c = 1.0;
      for (int i = 0; i < k; ++i) c *= -s - i;
      return c * std::pow(u, -s - k);
    }
    // d^k/du^k (log u / u) = (-1)^k k! u^{-k-1} (log u - H_k)
    double fact = 1.0, harmonic = 0.0;
    for (int i = 1; i <= k; ++i) {
      fact *= i;
      harmonic += 1.0 / i;
    }
    const double sign = (k & 1) ? -1.0 : 1.0;
    return sign * fact * std::pow(u, -k - 1.0) * (std::log(u) - harmonic);
  }
};

double tail_sum(const QuadChar& chi, const Summand& g, u64 blocks) {
  const u64 q = chi.conductor();
  const double qd = static_cast<double>(q);
  CompensatedSum total;
  for (u64 r = 1; r <= q; ++r) {
    const int c = chi(r);
    if (c == 0) continue;
    const double u = static_cast<double>(blocks) * qd + static_cast<double>(r);
    CompensatedSum t;
    t.add(-g.antiderivative(u) / qd);
    t.add(0.5 * g.value(u));
    double qpow = qd;
    for (int j = 1; j <= 4; ++j) {
      t.add(-kBernoulliOverFactorial[j - 1] * qpow * g.derivative(2 * j - 1, u));
      qpow *= qd * qd;
    }
    total.add(c * t.value());
  }
  return total.value();
}

double block_sum(const QuadChar& chi, const Summand& g, u64 from, u64 to, CompensatedSum& acc) {
  for (u64 n = from; n <= to; ++n) {
    const int c = chi(n);
    if (c != 0) acc.add(c * g.value(static_cast<double>(n)));
  }
  return acc.value();
}

double dirichlet_series(const QuadChar& chi, const Summand& g, double tol) {
  if (!(tol > 0)) throw ConfigError("tolerance must be positive");
  const u64 q = chi.conductor();
  u64 blocks = 16;
  CompensatedSum partial;
  block_sum(chi, g, 1, blocks * q, partial);
  double prev = partial.value() + tail_sum(chi, g, blocks);
  for (int iter = 0; iter < 10; ++iter) {
    block_sum(chi, g, blocks * q + 1, 2 * blocks * q, partial);
    blocks *= 2;
    const double cur = partial.value() + tail_sum(chi, g, blocks);
    if (std::fabs(cur - prev) <= tol) return cur;
    prev = cur;
  }
  throw ComputationError("nonconvergence: L-series block estimates did not contract to tol");
}

double harmonic(u64 m) {
  static const std::vector<double> table = [] {
    std::vector<double> h(1024, 0.0);
    CompensatedSum acc;
    for (std::size_t i = 1; i < h.size(); ++i) {
      acc.add(1.0 / static_cast<double>(i));
      h[i] = acc.value();
    }
    return h;
  }();
  if (m < table.size()) return table[m];
  const double x = static_cast<double>(m);
  const double inv2 = 1.0 / (x * x);
  return std::log(x) + std::numbers::egamma_v<double> + 0.5 / x -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

}  // namespace

int kronecker(std::int64_t a, u64 n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  const int v = std::countr_zero(n);
  n >>= v;
  if (v > 0) {
    if ((a & 1) == 0) return 0;
    if (v & 1) {
      const u64 r = reduce_signed(a, 8);
      if (r == 3 || r == 5) result = -result;
    }
  }
  if (n == 1) return result;
  return result * jacobi(reduce_signed(a, n), n);
}

bool is_fundamental_discriminant(std::int64_t delta) {
  if (delta == 0 || delta == 1) return false;
  const u64 r = reduce_signed(delta, 4);
  if (r == 1) return squarefree(abs_u64(delta));
  if (r != 0) return false;
  const std::int64_t m = delta / 4;
  const u64 rm = reduce_signed(m, 4);
  return (rm == 2 || rm == 3) && squarefree(abs_u64(m));
}

QuadChar::QuadChar(std::int64_t delta) : delta_(delta), conductor_(abs_u64(delta)) {
  if (!is_fundamental_discriminant(delta)) {
    throw ConfigError("not a fundamental discriminant: " + std::to_string(delta));
  }
  if (conductor_ <= kTableLimit) {
    auto table = std::make_shared<std::vector<std::int8_t>>(conductor_);
    for (u64 n = 0; n < conductor_; ++n) {
      (*table)[n] = static_cast<std::int8_t>(kronecker(delta_, n));
    }
    table_ = std::move(table);
  }
}

std::vector<u64> exceptional_primes(const QuadChar& chi, u64 lo, u64 hi) {
  std::vector<u64> out;
  if (lo > hi) return out;
  for (u64 p : primes_in(lo, hi)) {
    if (chi(p) != -1) out.push_back(p);
  }
  return out;
}

double l_value(const QuadChar& chi, double s, double tol) {
  if (!(s > 0)) throw ConfigError("l_value: s must be positive");
  return dirichlet_series(chi, Summand{Summand::Kind::power, s}, tol);
}

double l_one(const QuadChar& chi, double tol) { return l_value(chi, 1.0, tol); }

double l_prime_one(const QuadChar& chi, double tol) {
  return -dirichlet_series(chi, Summand{Summand::Kind::log_over_u, 1.0}, tol);
}

std::string to_string(QualityMethod m) {
  return m == QualityMethod::user_supplied ? "user-supplied" : "lprime-ratio";
}

QualityProxy quality_proxy(const QuadChar& chi, std::optional<double> user_eta) {
  QualityProxy out;
  if (user_eta) {
    if (!(*user_eta >= kMinQuality)) {
      throw ConfigError("quality eta must be >= 10, got " + std::to_string(*user_eta));
    }
    out.eta_hat = *user_eta;
    out.method = QualityMethod::user_supplied;
    out.raw_ratio = *user_eta;
    return out;
  }
  const double ratio =
      l_prime_one(chi) / l_one(chi) / std::log(static_cast<double>(chi.conductor()));
  out.raw_ratio = ratio;
  out.eta_hat = std::max(kMinQuality, ratio);
  out.method = QualityMethod::lprime_ratio;
  return out;
}

double one_star_chi_partial(const QuadChar& chi, u64 x) {
  if (x < 1) throw ConfigError("one_star_chi_partial: x must be >= 1");
  CompensatedSum acc;
  for (u64 d = 1; d <= x; ++d) {
    const int c = chi(d);
    if (c != 0) acc.add(c * harmonic(x / d) / static_cast<double>(d));
  }
  return acc.value();
}

ExceptionalSumReport exceptional_sum_report(const QuadChar& chi, u64 x, double eps,
                                            const QualityProxy& eta) {
  if (!(eps > 0)) throw ConfigError("exceptional_sum_report: eps must be positive");
  const double logq = std::log(static_cast<double>(chi.conductor()));
  ExceptionalSumReport rep;
  rep.x = x;
  rep.eps = eps;
  rep.eta_hat = eta.eta_hat;
  rep.method = eta.method;
  rep.lower = std::exp(logq * (1.0 + eps) / 2.0);
  if (static_cast<double>(x) < rep.lower) {
    throw ConfigError("range-too-small: x < q^((1+eps)/2)");
  }
  auto sum_over = [&](double lower, double upper, std::size_t* count) {
    CompensatedSum acc;
    const u64 lo = static_cast<u64>(std::floor(lower)) + 1;
    const u64 hi = static_cast<u64>(std::floor(upper));
    std::size_t c = 0;
    for (u64 p : exceptional_primes(chi, lo, hi)) {
      acc.add(1.0 / static_cast<double>(p));
      ++c;
    }
    if (count) *count = c;
    return acc.value();
  };
  rep.sum = sum_over(rep.lower, static_cast<double>(x), &rep.count);
  rep.comparator = std::log(static_cast<double>(x)) / logq / eta.eta_hat;
  const int m_max = static_cast<int>(std::floor(std::sqrt(std::log(eta.eta_hat)) + 1.0));
  for (int m = 2; m <= m_max; ++m) {
    ExceptionalBand band;
    band.m = m;
    band.lower = std::exp(logq * (1.0 + eps) / (2.0 * m));
    band.upper = std::exp(logq * (1.0 + eps) / (2.0 * (m - 1)));
    band.sum = sum_over(band.lower, band.upper, nullptr);
    band.comparator = m / std::pow(eta.eta_hat, 1.0 / m);
    rep.bands.push_back(band);
  }
  return rep;
}

}  // namespace siegel
