// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "siegel/approximants.hpp"
#include "siegel/arith_tables.hpp"
#include "siegel/cli.hpp"
#include "siegel/correlations.hpp"
#include "siegel/exp_sums.hpp"
#include "siegel/quad_char.hpp"
#include "siegel/report.hpp"
#include "siegel/selberg.hpp"
#include "siegel/selftest.hpp"
#include "siegel/smoothing.hpp"

using namespace siegel;
using u64 = std::uint64_t;

namespace {

constexpr double kTwinConstant = 1.3203236316;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s,
               const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.require(false, std::string("exception: ") + e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0) {
    std::ostringstream b;
    b << "runtime < " << budget_s << " s";
    v.require(s < budget_s, b.str());
  }
  if (!v.pass) ++failures;
  std::printf("%s %2d %-28s %8.2f s  %s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), s,
              v.detail.str().c_str());
  std::fflush(stdout);
}

// Plain Eratosthenes tables for the desk-scale counts, independent of the library sieve.
std::vector<double> plain_mangoldt(u64 n) {
  std::vector<double> m(n + 1, 0.0);
  std::vector<bool> composite(n + 1, false);
  for (u64 p = 2; p <= n; ++p) {
    if (composite[p]) continue;
    for (u64 j = p * p; j <= n; j += p) composite[j] = true;
    const double lp = std::log(static_cast<double>(p));
    for (u64 q = p;; q *= p) {
      m[q] = lp;
      if (q > n / p) break;
    }
  }
  return m;
}

std::vector<std::int8_t> plain_liouville(u64 n) {
  std::vector<std::uint8_t> omega(n + 1, 0);
  std::vector<u64> rest(n + 1);
  for (u64 i = 0; i <= n; ++i) rest[i] = i;
  for (u64 p = 2; p <= n; ++p) {
    if (rest[p] != p) continue;  // p composite: already divided by a smaller prime
    for (u64 j = p; j <= n; j += p) {
      while (rest[j] % p == 0) {
        rest[j] /= p;
        ++omega[j];
      }
    }
  }
  std::vector<std::int8_t> l(n + 1);
  for (u64 i = 1; i <= n; ++i) l[i] = (omega[i] & 1) ? -1 : 1;
  return l;
}

QualityProxy eta_of(double eta) {
  QualityProxy q;
  q.eta_hat = eta;
  q.method = QualityMethod::user_supplied;
  return q;
}

}  // namespace

int main() {
  criterion(1, "sieve-oracles", 10, [](Verdict& v) {
    const u64 N = 100000;
    const ArithTable t = build_window(1, N);
    u64 bad = 0;
    for (u64 n = 1; n <= N; ++n) {
      const std::size_t i = t.index(n);
      if (t.lambda[i] != oracle::liouville(n) || t.mu[i] != oracle::moebius(n) ||
          t.tau[i] != oracle::tau(n) || std::fabs(t.mangoldt[i] - oracle::mangoldt(n)) > 1e-12) {
        ++bad;
      }
    }
    double worst = 0;
    for (u64 n = 1; n <= 10000; ++n) {
      double s = 0;
      for (u64 d = 1; d <= n; ++d) {
        if (n % d == 0) s += t.mangoldt[t.index(d)];
      }
      worst = std::max(worst, std::fabs(s - std::log(static_cast<double>(n))));
    }
    v.detail << "mismatches " << bad << ", chebyshev residual " << worst;
    v.require(bad == 0, "table mismatch");
    v.require(worst <= 1e-9, "chebyshev identity");
  });

  criterion(2, "singular-series", 30, [](Verdict& v) {
    const u64 h[] = {0, 2};
    const SingularSeries s7 = singular_series(h, 10'000'000);
    const SingularSeries s6 = singular_series(h, 1'000'000);
    v.detail.precision(13);
    v.detail << "value " << s7.value << " in [" << s7.lower << ", " << s7.upper << "]";
    v.require(std::fabs(s7.value - kTwinConstant) <= 1e-8, "value");
    v.require(s7.lower <= kTwinConstant + 1e-10 && kTwinConstant - 1e-10 <= s7.upper,
              "enclosure");
    v.require(std::max(s6.lower, s7.lower) <= std::min(s6.upper, s7.upper), "enclosures overlap");
  });

  criterion(3, "hardy-littlewood-twins", 120, [](Verdict& v) {
    const u64 x = 10'000'000;
    const std::vector<double> m = plain_mangoldt(x + 2);
    double direct = 0;
    for (u64 n = 1; n <= x; ++n) direct += m[n] * m[n + 2];
    direct /= static_cast<double>(x);
    const Factor f[] = {{FunctionKind::mangoldt, 0, {}}, {FunctionKind::mangoldt, 2, {}}};
    const double c = correlate(x, f, CorrelationContext{});
    const double dev = std::fabs(c - kTwinConstant) / kTwinConstant;
    v.detail << "correlate " << c << ", plain sieve " << direct << ", relative deviation " << dev;
    v.require(std::fabs(c - direct) < 1e-9 * direct, "correlate disagrees with plain count");
    v.require(dev <= 0.07, "tolerance 0.07");
  });

  criterion(4, "chowla-pairs", 60, [](Verdict& v) {
    const u64 x = 10'000'000;
    const std::vector<std::int8_t> l = plain_liouville(x + 1);
    long long direct = 0;
    for (u64 n = 1; n <= x; ++n) direct += l[n] * l[n + 1];
    const Factor f[] = {{FunctionKind::lambda, 0, {}}, {FunctionKind::lambda, 1, {}}};
    const double c = correlate(x, f, CorrelationContext{});
    v.detail << "correlate " << c << ", plain sieve " << static_cast<double>(direct) / x;
    v.require(std::fabs(c - static_cast<double>(direct) / x) < 1e-12, "plain count");
    v.require(std::fabs(c) <= 0.02, "tolerance 0.02");
  });

  criterion(5, "approximant-identities", 0, [](Verdict& v) {
    const u64 N = 100000;
    const FactorWindow fw(1, N);
    const ArithTable t = build_window(1, N);
    double worst_lambda = 0, worst_Lambda = 0;
    u64 agreement_exceptions = 0;
    struct Triple {
      std::int64_t delta;
      double R, D;
    };
    for (const Triple tr : {Triple{-3, 20, 5}, Triple{-4, 30, 3}, Triple{5, 50, 2}}) {
      const QuadChar chi(tr.delta);
      const TypeICoeffs b = lambda_sharp_coeffs(tr.R, tr.D, chi);
      const SiegelParams p = make_params(10'000'000, 2, 0, 0.5, eta_of(50), {tr.R, tr.D, std::nullopt});
      const ChiLogSharp sharp(p, chi, 1e-11);
      const std::vector<double> sharp_w = sharp.window(1, N);
      const std::vector<double> nu = nu_window(nu_weights(tr.R), 1, N);
      for (u64 n = 1; n <= N; ++n) {
        const auto f = fw.factors(n);
        const int ls = lambda_siegel(f, tr.R, chi);
        const double lsharp = lambda_sharp(n, b, chi);
        const double lflat = lambda_flat_convolution(n, tr.R, tr.D, chi);
        worst_lambda = std::max(worst_lambda, std::fabs(lsharp + lflat - ls));
        // Lambda_siegel = (chi * log) nu; the sharp part from the scattered
        // coefficients, the flat part from the defining convolution.
        const double Ls = Lambda_siegel(n, tr.R, chi);
        const double Lsharp = sharp_w[n - 1] * nu[n - 1];
        const double Lflat = nu[n - 1] * (chi_log(n, f, chi) - sharp_w[n - 1]);
        worst_Lambda = std::max(worst_Lambda, std::fabs(Lsharp + Lflat - Ls));
        if (lambda_agreement_predicate(n, tr.R, chi) && t.lambda[t.index(n)] != ls) {
          ++agreement_exceptions;
        }
      }
      // The flat part by quadrature of its defining integral on a sample.
      std::mt19937_64 rng(static_cast<u64>(tr.delta + 100));
      for (int i = 0; i < 50; ++i) {
        const u64 n = 1 + rng() % N;
        const double flat_q = nu[n - 1] * sharp.flat_by_quadrature(n);
        const double Lflat = Lambda_siegel(n, tr.R, chi) - sharp_w[n - 1] * nu[n - 1];
        worst_Lambda = std::max(worst_Lambda, std::fabs(flat_q - Lflat));
      }
    }
    v.detail << "lambda residual " << worst_lambda << ", Lambda residual " << worst_Lambda
             << ", agreement exceptions " << agreement_exceptions;
    v.require(worst_lambda <= 1e-9, "lambda identity");
    v.require(worst_Lambda <= 1e-9, "Lambda identity");
    v.require(agreement_exceptions == 0, "agreement predicate");
  });

  criterion(6, "selberg-majorant", 0, [](Verdict& v) {
    const ArithTable t = build_window(1, 1'000'000);
    std::mt19937_64 rng(6);
    u64 violations = 0;
    double worst = 0;
    for (double R : {30.0, 100.0, 500.0}) {
      violations += majorant_check(t, R).violations;
      const TypeICoeffs w = nu_weights(R);
      for (int i = 0; i < 1000; ++i) {
        const u64 n = 1 + rng() % 1'000'000;
        worst = std::max(worst, std::fabs(w.evaluate(n) - nu_direct(n, R)));
      }
    }
    v.detail << "violations " << violations << ", expansion residual " << worst;
    v.require(violations == 0, "majorant");
    v.require(worst <= 1e-10, "expansion");
  });

  criterion(7, "quadrature", 0, [](Verdict& v) {
    double worst = 0;
    for (u64 n : {1ULL, 97ULL, 1000000ULL}) worst = std::max(worst, log_identity_residual(n));
    const FourierChecks f = fourier_checks();
    const double moment = std::hypot(f.first_moment_re, f.first_moment_im);
    v.detail << "log identity " << worst << ", mass-1 " << f.mass - 1 << ", first moment " << moment;
    v.require(worst <= 1e-8, "log identity");
    v.require(std::fabs(f.mass - 1) <= 1e-6 && moment <= 1e-6, "fourier checks");
  });

  criterion(8, "exponential-sums", 300, [](Verdict& v) {
    double worst = 0;
    for (u64 q = 1; q <= 200; ++q) {
      const RootTable roots(q);
      for (u64 u1 = 0; u1 < q; ++u1) {
        for (u64 u2 = 0; u2 < q; ++u2) {
          const auto a = static_cast<std::int64_t>(u1), b = static_cast<std::int64_t>(u2);
          worst = std::max(worst, std::abs(kloosterman(a, b, q, roots)) / estermann_bound(a, b, q));
        }
      }
    }
    std::mt19937_64 rng(8);
    int configs = 0, noncoprime = 0;
    double identity = 0, excluded = 0, ratio = 0;
    for (u64 q = 2; q <= 48; ++q) {
      for (u64 q0 = 1; q0 <= q; ++q0) {
        if (q % q0) continue;
        for (u64 a : {u64{1}, q0 % q, q0 * 2 % q, q - 1}) {
          if (q0 % std::gcd(a, q)) continue;
          const PeriodicWeight f = PeriodicWeight::random(q0, rng);
          const MfeDecomposition m = mfe_decompose(q, static_cast<std::int64_t>(a), f);
          identity = std::max(identity, m.identity_residual(f));
          excluded = std::max(excluded, m.max_excluded());
          ratio = std::max(ratio, m.max_bound_ratio());
          ++configs;
          if (std::gcd(a, q) != 1) ++noncoprime;
        }
      }
    }
    v.detail << "Estermann ratio " << worst << "; " << configs << " expansions (" << noncoprime
             << " non-coprime), identity " << identity << ", bound ratio " << ratio;
    v.require(worst <= 1 + 1e-9, "Estermann bound");
    v.require(configs >= 50 && noncoprime > 0, "grid size");
    v.require(identity <= 1e-9 && excluded <= 1e-9, "expansion identity");
    v.require(ratio <= 1.0, "coefficient bound");
  });

  criterion(9, "l-one-class-numbers", 0, [](Verdict& v) {
    double worst = 0;
    int count = 0;
    for (std::int64_t d = -200; d <= 200; ++d) {
      if (!oracle::is_fundamental(d)) continue;
      worst = std::max(worst, std::fabs(l_one(QuadChar(d)) - oracle::l_one_class_number(d)));
      ++count;
    }
    v.detail << count << " discriminants, max deviation " << worst;
    v.require(worst <= 1e-6, "deviation");
  });

  criterion(10, "chain-end-to-end", 0, [](Verdict& v) {
    const QuadChar chi(-163);
    const SiegelParams p = make_params(1'000'000, 2, 0, 0.5, quality_proxy(chi, 50.0),
                                       {200.0, 1000.0, std::nullopt});
    const ShiftSystem shifts{{0, 2}, {}};
    std::string dumps[3];
    ChainReport first;
    const unsigned threads[] = {1, 8, 1};
    for (int i = 0; i < 3; ++i) {
      ChainOptions opt;
      opt.correlate.threads = threads[i];
      const ChainReport r = chain_report(p, shifts, chi, opt);
      dumps[i] = to_json(r).dump();
      if (i == 0) first = r;
    }
    bool finite = true;
    for (double l : first.lines) finite = finite && std::isfinite(l);
    const auto raw = chain_line_factors(0, shifts);
    const double direct = correlate(1'000'000, raw, CorrelationContext{});
    const std::vector<std::string> args{"chain", "--delta", "-163", "--x", "1e6", "--k", "2",
                                        "--shifts", "0,2", "--R", "200", "--D", "1000", "--eta", "50"};
    std::string cli_out[2];
    int codes[2];
    for (int i = 0; i < 2; ++i) {
      std::vector<std::string> a{"--threads", i == 0 ? "1" : "8"};
      a.insert(a.end(), args.begin(), args.end());
      std::ostringstream out, err;
      codes[i] = run_cli(a, out, err);
      cli_out[i] = json::parse(out.str())["report"].dump();
    }
    v.detail << "lines";
    for (double l : first.lines) v.detail << " " << l;
    v.detail << ", S " << first.S;
    v.require(finite, "finite lines");
    v.require(first.lines[0] == direct, "line (i) bit-for-bit");
    v.require(dumps[0] == dumps[1] && dumps[0] == dumps[2], "library report determinism");
    v.require(codes[0] == 0 && codes[1] == 0 && cli_out[0] == cli_out[1], "CLI report determinism");
  });

  criterion(11, "selftest", 900, [](Verdict& v) {
    const SelftestResult r = run_selftest(nullptr, false);
    int failed = 0;
    for (const auto& c : r.checks) {
      if (!c.passed) {
        ++failed;
        v.detail << " " << c.name << ": " << c.detail << ";";
      }
    }
    v.detail << r.checks.size() << " checks, " << failed << " failed";
    v.require(r.ok(), "selftest");
  });

  return failures == 0 ? 0 : 1;
}
