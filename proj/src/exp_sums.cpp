#include "siegel/exp_sums.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "siegel/arith_tables.hpp"
#include "siegel/crt.hpp"
#include "siegel/error.hpp"

namespace siegel {

namespace {

using u64 = std::uint64_t;

u64 umod(std::int64_t a, u64 q) {
  const std::int64_t r = a % static_cast<std::int64_t>(q);
  return static_cast<u64>(r < 0 ? r + static_cast<std::int64_t>(q) : r);
}

u64 inverse_mod(u64 x, u64 q) {
  std::int64_t r0 = static_cast<std::int64_t>(q), r1 = static_cast<std::int64_t>(x % q);
  std::int64_t s0 = 0, s1 = 1;
  while (r1 != 0) {
    const std::int64_t t = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - t * r1);
    std::tie(s0, s1) = std::make_pair(s1, s0 - t * s1);
  }
  return umod(s0, q);
}

void check_hyperbola_args(u64 q, std::int64_t a, const PeriodicWeight& f) {
  if (q < 1) throw ConfigError("modulus q must be >= 1");
  f.validate();
  if (q % f.q0 != 0) throw ConfigError("precondition violation: q0 must divide q");
  const u64 g = std::gcd(umod(a, q), q);
  if (f.q0 % g != 0) throw ConfigError("precondition violation: gcd(a, q) must divide q0");
}

// out[u1 * q + u2] = scale * sum_n g(n1, n2) e_q(sign (u1 n1 + u2 n2)).
std::vector<cplx> dft2(const std::vector<cplx>& g, u64 q, int sign, double scale) {
  const RootTable roots(q);
  auto root = [&](u64 k) { return sign > 0 ? roots(k) : std::conj(roots(k)); };
  const std::size_t n = static_cast<std::size_t>(q);
  std::vector<cplx> rows(n * n, 0.0);
  for (std::size_t n1 = 0; n1 < n; ++n1) {
    for (std::size_t n2 = 0; n2 < n; ++n2) {
      const cplx v = g[n1 * n + n2];
      if (v == cplx{}) continue;
      for (std::size_t u2 = 0; u2 < n; ++u2) rows[n1 * n + u2] += v * root((u2 * n2) % n);
    }
  }
  std::vector<cplx> out(n * n, 0.0);
  for (std::size_t n1 = 0; n1 < n; ++n1) {
    for (std::size_t u1 = 0; u1 < n; ++u1) {
      const cplx w = root((u1 * n1) % n) * scale;
      for (std::size_t u2 = 0; u2 < n; ++u2) out[u1 * n + u2] += rows[n1 * n + u2] * w;
    }
  }
  return out;
}

}  // namespace

u64 gcd3(u64 a, u64 b, u64 c) { return std::gcd(std::gcd(a, b), c); }

u64 divisor_count(u64 n) {
  u64 t = 1;
  for (const auto& pp : factorize(n)) t *= pp.e + 1;
  return t;
}

RootTable::RootTable(u64 q) : q_(q), roots_(q) {
  if (q < 1) throw ConfigError("RootTable: q must be >= 1");
  for (u64 k = 0; k < q; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q);
    roots_[k] = {std::cos(th), std::sin(th)};
  }
}

PeriodicWeight PeriodicWeight::constant(u64 q0, cplx v) {
  PeriodicWeight f;
  f.q0 = q0;
  f.values.assign(static_cast<std::size_t>(q0 * q0), v);
  return f;
}

PeriodicWeight PeriodicWeight::random(u64 q0, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> radius(0.0, 1.0), angle(0.0, 2.0 * std::numbers::pi);
  PeriodicWeight f;
  f.q0 = q0;
  f.values.resize(static_cast<std::size_t>(q0 * q0));
  for (auto& v : f.values) v = std::polar(std::sqrt(radius(rng)), angle(rng));
  return f;
}

void PeriodicWeight::validate() const {
  if (q0 < 1 || values.size() != q0 * q0) throw ConfigError("periodic weight: bad table size");
  for (const auto& v : values) {
    if (!(std::abs(v) <= 1.0 + 1e-12)) throw ConfigError("periodic weight must be 1-bounded");
  }
}

cplx kloosterman(std::int64_t u1, std::int64_t u2, u64 q, const RootTable& roots) {
  if (q < 1) throw ConfigError("kloosterman: q must be >= 1");
  const u64 a = umod(u1, q), b = umod(u2, q);
  cplx s = 0;
  for (u64 x = 0; x < q; ++x) {
    if (std::gcd(x, q) != 1) continue;
    const u64 xi = inverse_mod(x, q);
    s += roots((a * x + b * xi) % q);
  }
  return s;
}

cplx kloosterman(std::int64_t u1, std::int64_t u2, u64 q) {
  return kloosterman(u1, u2, q, RootTable(q));
}

double estermann_bound(std::int64_t u1, std::int64_t u2, u64 q) {
  const u64 g = gcd3(umod(u1, q), umod(u2, q), q);
  return static_cast<double>(divisor_count(q)) * std::sqrt(static_cast<double>(q)) *
         std::sqrt(static_cast<double>(g));
}

cplx hyperbola_fourier_coeff(u64 q, std::int64_t a, const PeriodicWeight& f, std::int64_t u1,
                             std::int64_t u2) {
  check_hyperbola_args(q, a, f);
  const RootTable roots(q);
  const u64 ar = umod(a, q), v1 = umod(u1, q), v2 = umod(u2, q);
  cplx s = 0;
  for (u64 n1 = 0; n1 < q; ++n1) {
    for (u64 n2 = 0; n2 < q; ++n2) {
      if ((n1 * n2) % q != ar) continue;
      s += f(n1, n2) * roots((v1 * n1 + v2 * n2) % q);
    }
  }
  return s / static_cast<double>(q * q);
}

std::vector<cplx> hyperbola_fourier_all(u64 q, std::int64_t a, const PeriodicWeight& f) {
  check_hyperbola_args(q, a, f);
  const u64 ar = umod(a, q);
  std::vector<cplx> g(static_cast<std::size_t>(q * q), 0.0);
  for (u64 n1 = 0; n1 < q; ++n1) {
    for (u64 n2 = 0; n2 < q; ++n2) {
      if ((n1 * n2) % q == ar) g[n1 * q + n2] = f(n1, n2);
    }
  }
  return dft2(g, q, +1, 1.0 / static_cast<double>(q * q));
}

double hyperbola_bound(u64 q, u64 q0, std::int64_t u1, std::int64_t u2) {
  const double t0 = static_cast<double>(divisor_count(q0));
  const u64 g = gcd3(umod(u1, q), umod(u2, q), q);
  return t0 * t0 * std::pow(static_cast<double>(q0), 1.5) * static_cast<double>(divisor_count(q)) *
         std::pow(static_cast<double>(q), -1.5) * std::sqrt(static_cast<double>(g));
}

MfeDecomposition mfe_decompose(u64 q, std::int64_t a, const PeriodicWeight& f) {
  check_hyperbola_args(q, a, f);
  MfeDecomposition out;
  out.q = q;
  out.q0 = f.q0;
  out.a = a;
  const u64 ar = umod(a, q);
  const u64 gaq = std::gcd(ar, q);
  out.q0_prime = std::gcd(f.q0 * gaq, q);
  out.alpha = 1.0;
  const u64 outer = q / out.q0_prime, inner = out.q0_prime / gaq;
  for (const auto& pp : factorize(outer)) {
    if (inner % pp.p != 0) {
      out.alpha *= static_cast<double>(pp.p) / static_cast<double>(pp.p - 1);
    }
  }
  // Residual after removing the averaged main term, then its Fourier coefficients.
  const double main_scale = out.alpha * static_cast<double>(out.q0_prime) / static_cast<double>(q);
  std::vector<cplx> r(static_cast<std::size_t>(q * q), 0.0);
  for (u64 n1 = 0; n1 < q; ++n1) {
    for (u64 n2 = 0; n2 < q; ++n2) {
      const u64 prod = (n1 * n2) % q;
      double w = prod == ar ? 1.0 : 0.0;
      if (prod % out.q0_prime == ar % out.q0_prime && std::gcd(prod, q) == gaq) w -= main_scale;
      if (w != 0.0) r[n1 * q + n2] = w * f(n1, n2);
    }
  }
  out.coeffs = dft2(r, q, -1, 1.0 / static_cast<double>(q * q));
  return out;
}

double MfeDecomposition::max_excluded() const {
  const u64 step = q / q0;
  double m = 0;
  for (u64 u1 = 0; u1 < q; ++u1) {
    for (u64 u2 = 0; u2 < q; ++u2) {
      if (u1 % step == 0 || u2 % step == 0) m = std::max(m, std::abs(coeffs[u1 * q + u2]));
    }
  }
  return m;
}

double MfeDecomposition::max_bound_ratio() const {
  const u64 step = q / q0;
  double m = 0;
  for (u64 u1 = 0; u1 < q; ++u1) {
    for (u64 u2 = 0; u2 < q; ++u2) {
      if (u1 % step == 0 || u2 % step == 0) continue;
      const double b = 2.0 * hyperbola_bound(q, q0, static_cast<std::int64_t>(u1),
                                             static_cast<std::int64_t>(u2));
      m = std::max(m, std::abs(coeffs[u1 * q + u2]) / b);
    }
  }
  return m;
}

double MfeDecomposition::identity_residual(const PeriodicWeight& f) const {
  const u64 step = q / q0;
  std::vector<cplx> kept(coeffs.size(), 0.0);
  for (u64 u1 = 0; u1 < q; ++u1) {
    for (u64 u2 = 0; u2 < q; ++u2) {
      if (u1 % step != 0 && u2 % step != 0) kept[u1 * q + u2] = coeffs[u1 * q + u2];
    }
  }
  const std::vector<cplx> fourier = dft2(kept, q, +1, 1.0);
  const u64 ar = umod(a, q), gaq = std::gcd(ar, q);
  const double main_scale = alpha * static_cast<double>(q0_prime) / static_cast<double>(q);
  double worst = 0;
  for (u64 n1 = 0; n1 < q; ++n1) {
    for (u64 n2 = 0; n2 < q; ++n2) {
      const u64 prod = (n1 * n2) % q;
      const cplx lhs = prod == ar ? f(n1, n2) : cplx{};
      cplx main = 0;
      if (prod % q0_prime == ar % q0_prime && std::gcd(prod, q) == gaq) main = main_scale * f(n1, n2);
      worst = std::max(worst, std::abs(lhs - main - fourier[n1 * q + n2]));
    }
  }
  return worst;
}

CharShiftSum char_shift_sum(const QuadChar& chi, std::span<const CharShiftTerm> terms, u64 lo,
                            u64 hi, u64 x) {
  if (x < 1) throw ConfigError("char_shift_sum: x must be >= 1");
  bool any_chi = false;
  std::vector<Congruence> cong;
  long double prod_d = 1;
  unsigned __int128 prod_mod_q = 1;
  const u64 q = chi.conductor();
  for (const auto& t : terms) {
    if (t.d < 1) throw ConfigError("char_shift_sum: d must be >= 1");
    if (t.d_prime != 0) {
      if (t.d % t.d_prime != 0) throw ConfigError("char_shift_sum: d' must divide d");
      any_chi = true;
    }
    cong.push_back({t.d, t.h});
    prod_d *= t.d;
    prod_mod_q = prod_mod_q * (t.d % q) % q;
  }
  if (!any_chi) throw ConfigError("char_shift_sum: J must be nonempty");
  CharShiftSum out;
  const double g = static_cast<double>(std::gcd(static_cast<u64>(prod_mod_q), q));
  const double qd = static_cast<double>(q);
  out.skeleton = std::sqrt(qd) * std::sqrt(g) *
                 (1.0 / (qd * static_cast<double>(prod_d)) + 1.0 / static_cast<double>(x));
  const auto cls = crt_merge(cong);
  const u64 first_n = std::max<u64>(lo, 1), last_n = std::min(hi, x);
  if (!cls || first_n > last_n) return out;
  u64 n = first_n + (cls->residue + cls->modulus - first_n % cls->modulus) % cls->modulus;
  double s = 0;
  for (; n <= last_n; n += cls->modulus) {
    int v = 1;
    for (const auto& t : terms) {
      if (t.d_prime != 0) v *= chi((n + t.h) / t.d_prime);
      if (v == 0) break;
    }
    s += v;
  }
  out.value = s / static_cast<double>(x);
  out.ratio = std::fabs(out.value) / out.skeleton;
  return out;
}

double weil_interval_bound(const QuadChar& chi, u64 h1, u64 h2, u64 length) {
  const u64 q = chi.conductor();
  const double qd = static_cast<double>(q);
  const u64 diff = h1 > h2 ? h1 - h2 : h2 - h1;
  const double A = static_cast<double>(divisor_count(q)) * (1.0 + std::log(qd)) *
                   std::sqrt(static_cast<double>(std::gcd(q, diff))) / 2.0;
  const double blocks = std::ceil(static_cast<double>(length) / qd) + 1.0;
  return 2.0 * std::sqrt(qd) * blocks * A;
}

double weil_interval_sum(const QuadChar& chi, u64 h1, u64 h2, u64 lo, u64 hi) {
  long s = 0;
  for (u64 n = lo; n <= hi; ++n) s += chi(n + h1) * chi(n + h2);
  return static_cast<double>(s);
}

WeilScan weil_interval_scan(const QuadChar& chi, u64 h1, u64 h2, std::size_t count,
                            std::mt19937_64& rng) {
  if (h1 == h2) throw ConfigError("weil scan: h1 and h2 must differ");
  const u64 q = chi.conductor();
  std::uniform_int_distribution<u64> start(1, 10 * q), len(1, 3 * q);
  WeilScan out;
  for (std::size_t i = 0; i < count; ++i) {
    const u64 lo = start(rng), L = len(rng);
    const double s = std::fabs(weil_interval_sum(chi, h1, h2, lo, lo + L - 1));
    const double ratio = s / weil_interval_bound(chi, h1, h2, L);
    out.max_ratio = std::max(out.max_ratio, ratio);
    if (ratio > 1.0) ++out.violations;
    ++out.intervals;
  }
  return out;
}

}  // namespace siegel
