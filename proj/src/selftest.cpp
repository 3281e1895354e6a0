#include "siegel/selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "siegel/approximants.hpp"
#include "siegel/arith_tables.hpp"
#include "siegel/correlations.hpp"
#include "siegel/crt.hpp"
#include "siegel/exp_sums.hpp"
#include "siegel/quad_char.hpp"
#include "siegel/selberg.hpp"
#include "siegel/smoothing.hpp"

namespace siegel {

namespace {

using u64 = std::uint64_t;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void fail(const std::string& what) {
    if (passed) detail << what;
    passed = false;
  }
};

u64 pow_mod(u64 b, u64 e, u64 m) {
  unsigned __int128 r = 1, x = b % m;
  for (; e; e >>= 1, x = x * x % m) {
    if (e & 1) r = r * x % m;
  }
  return static_cast<u64>(r);
}

// (a | p) for an odd prime p by Euler's criterion.
int legendre(std::int64_t a, u64 p) {
  const std::int64_t r = ((a % static_cast<std::int64_t>(p)) + static_cast<std::int64_t>(p)) %
                         static_cast<std::int64_t>(p);
  if (r == 0) return 0;
  return pow_mod(static_cast<u64>(r), (p - 1) / 2, p) == 1 ? 1 : -1;
}

// Kronecker symbol from its prime-by-prime definition.
int kronecker_brute(std::int64_t a, u64 n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int v = 1;
  u64 m = n;
  for (u64 p = 2; m > 1; ++p) {
    while (m % p == 0) {
      m /= p;
      if (p == 2) {
        if (a % 2 == 0) return 0;
        const std::int64_t r = ((a % 8) + 8) % 8;
        v *= (r == 1 || r == 7) ? 1 : -1;
      } else {
        v *= legendre(a, p);
      }
    }
  }
  return v;
}

struct Trial {
  int lambda = 1, mu = 1;
  double mangoldt = 0;
  u64 tau = 1;
};

Trial trial(u64 n) {
  Trial t;
  u64 m = n;
  int distinct = 0;
  bool squarefree = true;
  u64 last_p = 0;
  for (u64 p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    ++distinct;
    last_p = p;
    if (e > 1) squarefree = false;
    if (e & 1) t.lambda = -t.lambda;
    t.tau *= e + 1;
  }
  if (m > 1) {
    ++distinct;
    last_p = m;
    t.lambda = -t.lambda;
    t.tau *= 2;
  }
  t.mu = squarefree ? ((distinct & 1) ? -1 : 1) : 0;
  if (distinct == 1) t.mangoldt = std::log(static_cast<double>(last_p));
  return t;
}

// L(1, chi) from Dirichlet's finite class-number formulas.
double l_one_finite(const QuadChar& chi) {
  const std::int64_t d = chi.delta();
  const u64 q = chi.conductor();
  double s = 0;
  if (d < 0) {
    for (u64 a = 1; a < q; ++a) s += chi(a) * static_cast<double>(a);
    return -std::numbers::pi * s / std::pow(static_cast<double>(q), 1.5);
  }
  for (u64 a = 1; a < q; ++a) {
    if (chi(a) != 0) s += chi(a) * std::log(std::sin(std::numbers::pi * a / q));
  }
  return -s / std::sqrt(static_cast<double>(q));
}

std::vector<std::int64_t> fundamental_discriminants(std::int64_t bound) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = -bound; d <= bound; ++d) {
    if (is_fundamental_discriminant(d)) out.push_back(d);
  }
  return out;
}

using CheckFn = std::function<void(Outcome&, bool)>;

void check_sieve_oracle(Outcome& o, bool quick) {
  const u64 N = quick ? 20000 : 100000;
  const ArithTable t = build_window(1, N);
  for (u64 n = 1; n <= N; ++n) {
    const Trial tr = trial(n);
    if (t.liouville(n) != tr.lambda || t.moebius(n) != tr.mu || t.divisor_count(n) != tr.tau ||
        std::fabs(t.von_mangoldt(n) - tr.mangoldt) > 1e-12) {
      o.fail("mismatch at n = " + std::to_string(n));
      return;
    }
  }
  o.detail << "n <= " << N;
}

void check_chebyshev(Outcome& o, bool) {
  const ArithTable t = build_window(1, 10000);
  double worst = 0;
  for (u64 n = 1; n <= 10000; ++n) {
    double s = 0;
    for (u64 d : divisors_up_to(n, n)) s += t.von_mangoldt(d);
    worst = std::max(worst, std::fabs(s - std::log(static_cast<double>(n))));
  }
  o.detail << "max residual " << worst;
  if (worst > 1e-9) o.fail(" exceeds 1e-9");
}

void check_seamless(Outcome& o, bool) {
  const u64 N = 50000;
  const ArithTable whole = build_window(1, N);
  std::mt19937_64 rng(7);
  u64 lo = 1;
  while (lo <= N) {
    const u64 hi = std::min(N, lo + rng() % 7000);
    const ArithTable part = build_window(lo, hi);
    for (u64 n = lo; n <= hi; ++n) {
      if (part.liouville(n) != whole.liouville(n) || part.moebius(n) != whole.moebius(n) ||
          part.divisor_count(n) != whole.divisor_count(n) ||
          part.von_mangoldt(n) != whole.von_mangoldt(n) ||
          part.smallest_prime_factor(n) != whole.smallest_prime_factor(n)) {
        o.fail("window seam mismatch at n = " + std::to_string(n));
        return;
      }
    }
    lo = hi + 1;
  }
}

void check_tau_multiplicative(Outcome& o, bool) {
  const ArithTable t = build_window(1, 1'000'000);
  std::mt19937_64 rng(11);
  int tested = 0;
  while (tested < 10000) {
    const u64 m = 1 + rng() % 1000, n = 1 + rng() % 1000;
    if (std::gcd(m, n) != 1) continue;
    ++tested;
    if (t.divisor_count(m * n) != t.divisor_count(m) * t.divisor_count(n)) {
      o.fail("tau not multiplicative at " + std::to_string(m) + "*" + std::to_string(n));
      return;
    }
  }
}

void check_kronecker(Outcome& o, bool quick) {
  const u64 nmax = quick ? 1000 : 10000;
  std::size_t count = 0;
  for (std::int64_t d : fundamental_discriminants(500)) {
    const QuadChar chi(d);
    ++count;
    for (u64 n = 0; n <= nmax; ++n) {
      if (chi(n) != kronecker_brute(d, n)) {
        o.fail("Kronecker mismatch at delta = " + std::to_string(d) + ", n = " + std::to_string(n));
        return;
      }
    }
  }
  o.detail << count << " discriminants, n <= " << nmax;
}

void check_character_structure(Outcome& o, bool) {
  for (std::int64_t d : fundamental_discriminants(500)) {
    const QuadChar chi(d);
    const u64 q = chi.conductor();
    long total = 0;
    for (u64 m = 0; m < q; ++m) {
      total += chi(m);
      if ((chi(m) == 0) != (std::gcd(m, q) > 1)) {
        o.fail("zero set wrong for delta = " + std::to_string(d));
        return;
      }
      for (u64 n = 0; n < q; ++n) {
        if (chi(m * n) != chi(m) * chi(n)) {
          o.fail("not multiplicative for delta = " + std::to_string(d));
          return;
        }
      }
    }
    if (total != 0) o.fail("period sum nonzero for delta = " + std::to_string(d));
    // Primitive: for no maximal proper divisor r of q is chi constant on the
    // unit classes mod r.
    for (u64 p : primes_up_to(q)) {
      if (q % p) continue;
      const u64 r = q / p;
      std::vector<int> seen(r, 0);
      bool induced = true;
      for (u64 n = 1; n <= q && induced; ++n) {
        if (std::gcd(n, q) != 1) continue;
        int& s = seen[n % r];
        if (s == 0) s = chi(n);
        induced = s == chi(n);
      }
      if (induced) o.fail("imprimitive for delta = " + std::to_string(d));
    }
  }
}

void check_l_values(Outcome& o, bool) {
  double worst = 0;
  for (std::int64_t d : fundamental_discriminants(200)) {
    const QuadChar chi(d);
    worst = std::max(worst, std::fabs(l_one(chi, 1e-10) - l_one_finite(chi)));
  }
  o.detail << "max |L - finite formula| = " << worst;
  if (worst > 1e-6) o.fail(" exceeds 1e-6");
}

void check_exceptional_partition(Outcome& o, bool) {
  for (std::int64_t d : {-4L, -163L, 5L, 12L}) {
    const QuadChar chi(d);
    const auto ex = exceptional_primes(chi, 2, 20000);
    std::size_t inert = 0;
    for (u64 p : primes_up_to(20000)) inert += chi(p) == -1;
    if (ex.size() + inert != primes_up_to(20000).size()) {
      o.fail("exceptional primes do not partition for delta = " + std::to_string(d));
    }
  }
}

void check_cutoffs(Outcome& o, bool) {
  double prev = 1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double u = 1.2 * i / 2000.0;
    const double v = psi(u);
    if (v > prev + 1e-15 || v < 0 || v > 1 || psi(-u) != v) {
      o.fail("psi not even, monotone and [0,1]-valued at u = " + std::to_string(u));
      return;
    }
    prev = v;
  }
  const double mass = adaptive_simpson(phi, -1.0, 1.0, {1e-13, 48, 32});
  o.detail << "phi mass - 1 = " << mass - 1.0;
  if (std::fabs(mass - 1.0) > 1e-10) o.fail(" phi mass off");
}

void check_log_identity(Outcome& o, bool) {
  double worst = 0;
  for (u64 n : {1ULL, 2ULL, 97ULL, 1000ULL, 1000000ULL, 123456789ULL}) {
    worst = std::max(worst, log_identity_residual(n, 1e-10));
  }
  o.detail << "max residual " << worst;
  if (worst > 1e-8) o.fail(" exceeds 1e-8");
}

void check_fourier(Outcome& o, bool) {
  const FourierChecks f = fourier_checks();
  o.detail << "mass-1 = " << f.mass - 1 << ", moment = " << f.first_moment_re << "+"
           << f.first_moment_im << "i";
  if (std::fabs(f.mass - 1) > 1e-6 || std::hypot(f.first_moment_re, f.first_moment_im) > 1e-6) {
    o.fail(" exceeds 1e-6");
  }
}

void check_selberg(Outcome& o, bool quick) {
  const u64 N = quick ? 20000 : 100000;
  const ArithTable t = build_window(1, std::max<u64>(N, 250000));
  for (double R : {30.0, 100.0, 500.0}) {
    const TypeICoeffs w = nu_weights(R);
    if (std::fabs(w.coeff(1) - 1.0) > 1e-15) o.fail("a_1 != 1");
    for (const auto& [d, c] : w.entries) {
      if (t.moebius(d) == 0 || static_cast<double>(d) >= R * R) {
        o.fail("weight outside squarefree support at d = " + std::to_string(d));
        return;
      }
    }
    const auto nu = nu_window(w, 1, N);
    for (u64 n = 1; n <= N; n += quick ? 7 : 1) {
      if (std::fabs(nu[n - 1] - nu_direct(n, R)) > 1e-10) {
        o.fail("weights disagree with direct nu at n = " + std::to_string(n));
        return;
      }
    }
    const MajorantReport m = majorant_check(t, R);
    if (m.violations) o.fail("majorant violated at n = " + std::to_string(m.first_violation));
  }
}

void check_approximants(Outcome& o, bool quick) {
  const u64 N = quick ? 5000 : 30000;
  std::mt19937_64 rng(3);
  for (std::int64_t d : {-4L, -163L, 5L}) {
    const QuadChar chi(d);
    for (auto [R, D] : {std::pair{5.0, 50.0}, std::pair{30.0, 2000.0}, std::pair{200.0, 1000.0}}) {
      const TypeICoeffs b = lambda_sharp_coeffs(R, D, chi);
      const FactorWindow fw(1, N);
      std::vector<double> sharp(N, 0.0);
      b.scatter(1, sharp, &chi);
      for (u64 n = 1; n <= N; ++n) {
        const int ls = lambda_siegel(fw.factors(n), R, chi);
        if (std::abs(ls) > 1) o.fail("|lambda_S| > 1");
        const double flat = ls - sharp[n - 1];
        if (std::fabs(sharp[n - 1] + flat - ls) > 1e-9) o.fail("sharp + flat != lambda_S");
        const auto split = smooth_rough_split(n, R);
        if (static_cast<double>(split.smooth) <= std::sqrt(D) && std::fabs(flat) > 1e-9) {
          o.fail("lambda_flat nonzero below sqrt(D) at n = " + std::to_string(n));
          return;
        }
      }
      for (int i = 0; i < 200; ++i) {
        const u64 n = 1 + rng() % N;
        const double direct = lambda_flat_convolution(n, R, D, chi);
        if (std::fabs(direct - lambda_flat(n, b, R, chi)) > 1e-10) {
          o.fail("flat part disagrees with its convolution at n = " + std::to_string(n));
          return;
        }
      }
    }
    for (u64 n = 1; n <= N; ++n) {
      if (lambda_agreement_predicate(n, 50.0, chi)) {
        const Trial tr = trial(n);
        if (lambda_siegel(n, 50.0, chi) != tr.lambda) {
          o.fail("agreement predicate true but lambda != lambda_S at n = " + std::to_string(n));
          return;
        }
      }
      if (chi_log(n, chi) < -1e-10) o.fail("chi*log negative at n = " + std::to_string(n));
    }
    for (int i = 0; i < 2000; ++i) {
      const u64 m = 1 + rng() % 3000, n = 1 + rng() % 3000;
      if (lambda_siegel(m * n, 40.0, chi) != lambda_siegel(m, 40.0, chi) * lambda_siegel(n, 40.0, chi)) {
        o.fail("lambda_S not completely multiplicative");
        return;
      }
    }
  }
}

void check_chi_log_sharp(Outcome& o, bool quick) {
  // Non-degenerate regime: q = 3, D = 10 gives T = 90 < x^(1/3).
  const QuadChar chi(-3);
  QualityProxy eta;
  eta.eta_hat = 50;
  eta.method = QualityMethod::user_supplied;
  const SiegelParams p = make_params(10'000'000, 2, 0, 0.5, eta, {20.0, 10.0, std::nullopt});
  const ChiLogSharp sharp(p, chi, 1e-11);
  std::mt19937_64 rng(5);
  double worst_route = 0, worst_split = 0;
  const int samples = quick ? 10 : 40;
  for (int i = 0; i < samples; ++i) {
    const u64 n = 1 + rng() % 20000;
    const double a = sharp.evaluate(n);
    worst_route = std::max(worst_route, std::fabs(a - sharp.evaluate_by_quadrature(n)));
    worst_split = std::max(worst_split, std::fabs(a + sharp.flat_by_quadrature(n) - chi_log(n, chi)));
  }
  o.detail << "route gap " << worst_route << ", split gap " << worst_split;
  if (worst_route > 1e-8 || worst_split > 1e-8) o.fail(" exceeds 1e-8");
}

void check_singular_series(Outcome& o, bool quick) {
  const u64 cutoff = quick ? 1'000'000 : 10'000'000;
  const u64 twin[] = {0, 2};
  const SingularSeries s = singular_series(twin, cutoff);
  const double known = 1.3203236316937391;
  o.detail << "S({0,2}) = " << s.value << " in [" << s.lower << ", " << s.upper << "]";
  if (std::fabs(s.value - known) > 1e-8 || known < s.lower || known > s.upper) o.fail(" off");
  const u64 shifted[] = {5, 7};
  if (std::fabs(singular_series(shifted, cutoff).value - s.value) > 1e-15) {
    o.fail(" not translation invariant");
  }
  const u64 parity[] = {0, 1};
  if (singular_series(parity, 1000).value != 0.0) o.fail(" S({0,1}) != 0");
}

void check_crt(Outcome& o, bool) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    std::vector<Congruence> c;
    const int k = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < k; ++j) c.push_back({1 + rng() % 30, rng() % 30});
    const auto merged = crt_merge(c);
    u64 L = 1;
    for (const auto& cc : c) L = std::lcm(L, cc.modulus);
    std::vector<u64> hits;
    for (u64 n = 0; n < L; ++n) {
      bool ok = true;
      for (const auto& cc : c) ok = ok && (n + cc.shift) % cc.modulus == 0;
      if (ok) hits.push_back(n);
    }
    if ((merged.has_value() != !hits.empty()) ||
        (merged && (hits.size() != 1 || hits[0] != merged->residue || merged->modulus != L))) {
      o.fail("CRT merge disagrees with brute force");
      return;
    }
  }
}

void check_correlate(Outcome& o, bool quick) {
  const u64 x = quick ? 20000 : 100000;
  const Factor pair[] = {{FunctionKind::lambda, 0, {}}, {FunctionKind::lambda, 1, {}}};
  const CorrelationContext ctx;
  const double one = correlate(x, pair, ctx, {4096, 1});
  const double four = correlate(x, pair, ctx, {4096, 4});
  if (one != four) o.fail("thread count changes the result");
  const ArithTable t = build_window(1, x + 1);
  double naive = 0;
  for (u64 n = 1; n <= x; ++n) naive += t.liouville(n) * t.liouville(n + 1);
  naive /= static_cast<double>(x);
  if (std::fabs(one - naive) > 1e-12) o.fail("correlate disagrees with naive loop");
  // Linearity: lambda = (lambda + mu) - mu in the first slot.
  Factor sum{FunctionKind::custom, 0, [&](u64 n) { return double(t.liouville(n) + t.moebius(n)); }};
  Factor minus_mu{FunctionKind::custom, 0, [&](u64 n) { return -double(t.moebius(n)); }};
  const Factor a[] = {sum, {FunctionKind::lambda, 1, {}}};
  const Factor b[] = {minus_mu, {FunctionKind::lambda, 1, {}}};
  const double lin = correlate(x, a, ctx, {4096, 1}) + correlate(x, b, ctx, {4096, 1});
  if (std::fabs(lin - one) > 1e-12) o.fail("correlate not linear");
  o.detail << "E lambda(n)lambda(n+1) = " << one;
}

void check_kloosterman(Outcome& o, bool quick) {
  const u64 qmax = quick ? 60 : 200;
  double worst = 0;
  for (u64 q = 1; q <= qmax; ++q) {
    const RootTable roots(q);
    for (u64 u1 = 0; u1 < q; ++u1) {
      for (u64 u2 = 0; u2 < q; ++u2) {
        const cplx s = kloosterman(u1, u2, q, roots);
        worst = std::max(worst, std::abs(s) / estermann_bound(u1, u2, q));
      }
    }
    const cplx s11 = kloosterman(1, 1, q, roots);
    if (std::fabs(s11.imag()) > 1e-9) o.fail("S(1,1;q) not real");
    if (std::abs(kloosterman(2, 3, q, roots) - kloosterman(3, 2, q, roots)) > 1e-9) {
      o.fail("S(u1,u2) != S(u2,u1)");
    }
  }
  for (auto [q1, q2] : {std::pair<u64, u64>{7, 9}, {8, 15}, {11, 25}}) {
    // S(u1,u2;q1 q2) = S(u1 q2*, u2 q2*; q1) S(u1 q1*, u2 q1*; q2) with q2* = q2^{-1} mod q1.
    u64 inv2 = 1, inv1 = 1;
    while ((inv2 * q2) % q1 != 1) ++inv2;
    while ((inv1 * q1) % q2 != 1) ++inv1;
    const std::int64_t u1 = 3, u2 = 5;
    const cplx lhs = kloosterman(u1, u2, q1 * q2);
    const cplx rhs = kloosterman(u1 * inv2, u2 * inv2, q1) * kloosterman(u1 * inv1, u2 * inv1, q2);
    if (std::abs(lhs - rhs) > 1e-8) o.fail("Kloosterman sums do not factor over CRT");
  }
  o.detail << "max |S|/bound = " << worst << " for q <= " << qmax;
  if (worst > 1.0 + 1e-9) o.fail(" Estermann bound violated");
}

void check_mfe(Outcome& o, bool quick) {
  std::mt19937_64 rng(23);
  int configs = 0;
  double worst_identity = 0, worst_excluded = 0, worst_ratio = 0;
  const u64 qmax = quick ? 24 : 48;
  for (u64 q = 2; q <= qmax; ++q) {
    for (u64 q0 = 1; q0 <= q; ++q0) {
      if (q % q0) continue;
      for (u64 a : {u64{1}, q0, q0 * 2 % q, q - 1}) {
        if (q0 % std::gcd(a, q)) continue;
        const PeriodicWeight f = PeriodicWeight::random(q0, rng);
        const MfeDecomposition m = mfe_decompose(q, static_cast<std::int64_t>(a), f);
        worst_identity = std::max(worst_identity, m.identity_residual(f));
        worst_excluded = std::max(worst_excluded, m.max_excluded());
        worst_ratio = std::max(worst_ratio, m.max_bound_ratio());
        ++configs;
      }
    }
  }
  o.detail << configs << " configs, identity " << worst_identity << ", excluded "
           << worst_excluded << ", bound ratio " << worst_ratio;
  if (worst_identity > 1e-9 || worst_excluded > 1e-9 || worst_ratio > 1.0) o.fail(" failed");
}

}  // namespace

bool SelftestResult::ok() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

SelftestResult run_selftest(std::ostream* log, bool quick) {
  const std::vector<std::pair<std::string, CheckFn>> suite{
      {"sieve-vs-trial-division", check_sieve_oracle},
      {"chebyshev-identity", check_chebyshev},
      {"window-seams", check_seamless},
      {"tau-multiplicative", check_tau_multiplicative},
      {"kronecker-vs-euler-criterion", check_kronecker},
      {"character-structure", check_character_structure},
      {"l-one-vs-finite-formula", check_l_values},
      {"exceptional-partition", check_exceptional_partition},
      {"cutoffs", check_cutoffs},
      {"log-identity", check_log_identity},
      {"fourier-checks", check_fourier},
      {"selberg-weights-and-majorant", check_selberg},
      {"lambda-approximants", check_approximants},
      {"chi-log-sharp-routes", check_chi_log_sharp},
      {"singular-series", check_singular_series},
      {"crt-merge", check_crt},
      {"correlate", check_correlate},
      {"kloosterman", check_kloosterman},
      {"modified-fourier-expansion", check_mfe},
  };
  SelftestResult result;
  for (const auto& [name, fn] : suite) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      fn(o, quick);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    SelftestCheck c;
    c.name = name;
    c.passed = o.passed;
    c.detail = o.detail.str();
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (log) {
      *log << (c.passed ? "PASS " : "FAIL ") << c.name;
      if (!c.detail.empty()) *log << "  " << c.detail;
      *log << '\n';
      log->flush();
    }
    result.checks.push_back(std::move(c));
  }
  return result;
}

}  // namespace siegel
