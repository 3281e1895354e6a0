#include "siegel/correlations.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include "siegel/arith_tables.hpp"
#include "siegel/error.hpp"
#include "siegel/selberg.hpp"
#include "siegel/summation.hpp"

namespace siegel {

namespace {

using u64 = std::uint64_t;

std::size_t distinct_residues(std::span<const u64> h, u64 p) {
  std::vector<u64> r;
  r.reserve(h.size());
  for (u64 v : h) r.push_back(v % p);
  std::sort(r.begin(), r.end());
  return static_cast<std::size_t>(std::unique(r.begin(), r.end()) - r.begin());
}

// (1 * chi)(p^e)
int one_star_chi_local(int c, std::uint32_t e) {
  if (c == 1) return static_cast<int>(e) + 1;
  if (c == 0) return 1;
  return (e & 1) ? 0 : 1;
}

// chi * log = (1 * chi) * Lambda, evaluated from the factorization.
double chi_log_from_factors(std::span<const PrimePower> f, const QuadChar& chi) {
  double total = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double rest = 1;
    for (std::size_t j = 0; j < f.size() && rest != 0; ++j) {
      if (j != i) rest *= one_star_chi_local(chi(f[j].p), f[j].e);
    }
    if (rest == 0) continue;
    const int c = chi(f[i].p);
    double local = 0;
    for (std::uint32_t a = 1; a <= f[i].e; ++a) local += one_star_chi_local(c, f[i].e - a);
    total += std::log(static_cast<double>(f[i].p)) * local * rest;
  }
  return total;
}

bool needs_chi(FunctionKind k) {
  return k == FunctionKind::chi || k == FunctionKind::lambda_siegel ||
         k == FunctionKind::lambda_sharp || k == FunctionKind::Lambda_siegel ||
         k == FunctionKind::Lambda_sharp;
}

bool needs_params(FunctionKind k) {
  return k == FunctionKind::lambda_siegel || k == FunctionKind::lambda_sharp ||
         k == FunctionKind::Lambda_siegel || k == FunctionKind::Lambda_sharp ||
         k == FunctionKind::nu;
}

bool needs_nu(FunctionKind k) {
  return k == FunctionKind::nu || k == FunctionKind::Lambda_siegel ||
         k == FunctionKind::Lambda_sharp;
}

// Lazily built sieve data for one extended window.
class WindowData {
 public:
  WindowData(const CorrelationContext& ctx, u64 lo, u64 hi) : ctx_(ctx), lo_(lo), hi_(hi) {}

  const ArithTable& table() {
    if (!table_) table_ = build_window(lo_, hi_);
    return *table_;
  }
  const FactorWindow& factors() {
    if (!factors_) factors_ = FactorWindow(lo_, hi_);
    return *factors_;
  }
  const std::vector<double>& nu() {
    if (!nu_) nu_ = nu_window(*ctx_.nu_weights, lo_, hi_);
    return *nu_;
  }

  std::vector<double> values(const Factor& f) {
    const std::size_t n = static_cast<std::size_t>(hi_ - lo_ + 1);
    std::vector<double> out(n, 0.0);
    const QuadChar* chi = ctx_.chi ? &*ctx_.chi : nullptr;
    switch (f.kind) {
      case FunctionKind::one:
        std::fill(out.begin(), out.end(), 1.0);
        break;
      case FunctionKind::lambda:
        for (std::size_t i = 0; i < n; ++i) out[i] = table().lambda[i];
        break;
      case FunctionKind::mangoldt:
        for (std::size_t i = 0; i < n; ++i) out[i] = table().mangoldt[i];
        break;
      case FunctionKind::mu:
        for (std::size_t i = 0; i < n; ++i) out[i] = table().mu[i];
        break;
      case FunctionKind::tau:
        for (std::size_t i = 0; i < n; ++i) out[i] = table().tau[i];
        break;
      case FunctionKind::chi:
        for (std::size_t i = 0; i < n; ++i) out[i] = (*chi)(lo_ + i);
        break;
      case FunctionKind::lambda_siegel: {
        const double R = ctx_.params->R.value;
        for (std::size_t i = 0; i < n; ++i) {
          out[i] = lambda_siegel(factors().factors(lo_ + i), R, *chi);
        }
        break;
      }
      case FunctionKind::lambda_sharp:
        ctx_.sharp_coeffs->scatter(lo_, out, chi);
        break;
      case FunctionKind::Lambda_siegel: {
        const auto& nu_vals = nu();
        for (std::size_t i = 0; i < n; ++i) {
          if (nu_vals[i] == 0.0) continue;
          out[i] = chi_log_from_factors(factors().factors(lo_ + i), *chi) * nu_vals[i];
        }
        break;
      }
      case FunctionKind::Lambda_sharp: {
        out = ctx_.chi_log_sharp->window(lo_, hi_);
        const auto& nu_vals = nu();
        for (std::size_t i = 0; i < n; ++i) out[i] *= nu_vals[i];
        break;
      }
      case FunctionKind::nu:
        out = nu();
        break;
      case FunctionKind::custom:
        for (std::size_t i = 0; i < n; ++i) {
          try {
            out[i] = f.custom(lo_ + i);
          } catch (const std::exception& e) {
            throw ComputationError("evaluation failure at n = " + std::to_string(lo_ + i) + ": " +
                                   e.what());
          }
        }
        break;
    }
    return out;
  }

 private:
  const CorrelationContext& ctx_;
  u64 lo_, hi_;
  std::optional<ArithTable> table_;
  std::optional<FactorWindow> factors_;
  std::optional<std::vector<double>> nu_;
};

void check_context(const Factor& f, const CorrelationContext& ctx) {
  const std::string name = to_string(f.kind);
  if (needs_chi(f.kind) && !ctx.chi) throw ConfigError(name + " needs a character (--delta)");
  if (needs_params(f.kind) && !ctx.params) throw ConfigError(name + " needs Siegel parameters");
  if (needs_nu(f.kind) && !ctx.nu_weights) throw ConfigError(name + " needs sieve weights");
  if (f.kind == FunctionKind::lambda_sharp && !ctx.sharp_coeffs) {
    throw ConfigError(name + " needs Type I coefficients");
  }
  if (f.kind == FunctionKind::Lambda_sharp && !ctx.chi_log_sharp) {
    throw ConfigError(name + " needs the (chi*log)^sharp tables");
  }
  if (f.kind == FunctionKind::custom && !f.custom) throw ConfigError("custom factor without callable");
}

// Sum over n in [a, b] of prod_j f_j(n + h_j).
CompensatedSum window_sum(std::span<const Factor> factors, const CorrelationContext& ctx, u64 a,
                          u64 b, u64 max_shift) {
  WindowData data(ctx, a, b + max_shift);
  const std::size_t len = static_cast<std::size_t>(b - a + 1);
  std::vector<double> prod(len, 1.0);
  // Identical (kind, custom-free) factors share one evaluation.
  std::map<FunctionKind, std::vector<double>> cache;
  for (const auto& f : factors) {
    const std::vector<double>* vals;
    std::vector<double> own;
    if (f.kind == FunctionKind::custom) {
      own = data.values(f);
      vals = &own;
    } else {
      auto it = cache.find(f.kind);
      if (it == cache.end()) it = cache.emplace(f.kind, data.values(f)).first;
      vals = &it->second;
    }
    for (std::size_t i = 0; i < len; ++i) prod[i] *= (*vals)[i + f.shift];
  }
  CompensatedSum acc;
  for (std::size_t i = 0; i < len; ++i) {
    if (!std::isfinite(prod[i])) {
      throw ComputationError("evaluation failure at n = " + std::to_string(a + i) +
                             ": non-finite product");
    }
    acc.add(prod[i]);
  }
  return acc;
}

}  // namespace

double beta_p(std::span<const u64> h, u64 p) {
  if (p < 2) throw ConfigError("beta_p: p must be prime");
  const std::size_t k = h.size();
  if (k == 0) return 1.0;
  const u64 nu = distinct_residues(h, p);
  // p^{k-1} (p - nu) / (p - 1)^k, exact while it fits.
  const double bits = static_cast<double>(k) * std::log2(static_cast<double>(p));
  if (bits < 120) {
    unsigned __int128 num = p - nu, den = 1;
    for (std::size_t i = 0; i + 1 < k; ++i) num *= p;
    for (std::size_t i = 0; i < k; ++i) den *= p - 1;
    if (num == 0) return 0.0;
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
  }
  const long double pl = static_cast<long double>(p);
  return static_cast<double>(std::pow(pl / (pl - 1), static_cast<long double>(k)) *
                             (1.0L - static_cast<long double>(nu) / pl));
}

SingularSeries singular_series(std::span<const u64> h, u64 cutoff) {
  const u64 max_h = h.empty() ? 0 : *std::max_element(h.begin(), h.end());
  if (cutoff < max_h + 2) {
    throw ConfigError("cutoff-too-small: cutoff must be >= max(h) + 2");
  }
  SingularSeries out;
  out.cutoff = cutoff;
  const double k = static_cast<double>(h.size());
  CompensatedSum log_sum;
  bool zero = false;
  for (u64 p : primes_up_to(cutoff)) {
    const double b = beta_p(h, p);
    if (b == 0.0) {
      zero = true;
      break;
    }
    log_sum.add(std::log(b));
  }
  if (zero) return out;
  out.partial = std::exp(log_sum.value());
  if (h.size() <= 1) {
    out.value = out.lower = out.upper = out.partial;
    return out;
  }
  // For p > cutoff every h_i is distinct mod p, so
  //   log beta_p = -sum_{m >= 2} (k^m - k) / (m p^m),  0 <= -log beta_p <= k^2 / (2 p^2 (1 - k/p)).
  // sum_{p > P} 1/p^2 <= 2 * 1.25506 / (P log P) from pi(t) < 1.25506 t / log t.
  const double P = static_cast<double>(cutoff);
  const double prime_tail = 2.0 * 1.25506 / (P * std::log(P));
  out.tail_bound = k * k / (2.0 * (1.0 - k / P)) * prime_tail;
  // Expected tail: the leading term (k^2 - k)/2 sum 1/p^2 with sum_{p > P} 1/p^2 ~ E1(log P).
  const double expected = -std::expint(-std::log(P));
  out.value = out.partial * std::exp(-(k * k - k) / 2.0 * expected);
  const double rounding = 1e-12 * out.partial;
  out.upper = out.partial + rounding;
  out.lower = out.partial * std::exp(-out.tail_bound) - rounding;
  return out;
}

std::string to_string(FunctionKind k) {
  switch (k) {
    case FunctionKind::lambda: return "lambda";
    case FunctionKind::mangoldt: return "mangoldt";
    case FunctionKind::mu: return "mu";
    case FunctionKind::tau: return "tau";
    case FunctionKind::chi: return "chi";
    case FunctionKind::lambda_siegel: return "lambda_siegel";
    case FunctionKind::lambda_sharp: return "lambda_sharp";
    case FunctionKind::Lambda_siegel: return "Lambda_siegel";
    case FunctionKind::Lambda_sharp: return "Lambda_sharp";
    case FunctionKind::nu: return "nu";
    case FunctionKind::one: return "one";
    case FunctionKind::custom: return "custom";
  }
  return "unknown";
}

FunctionKind parse_function_kind(const std::string& name) {
  static const std::map<std::string, FunctionKind> names{
      {"lambda", FunctionKind::lambda},
      {"mangoldt", FunctionKind::mangoldt},
      {"Lambda", FunctionKind::mangoldt},
      {"mu", FunctionKind::mu},
      {"tau", FunctionKind::tau},
      {"chi", FunctionKind::chi},
      {"lambda_siegel", FunctionKind::lambda_siegel},
      {"lambda_sharp", FunctionKind::lambda_sharp},
      {"Lambda_siegel", FunctionKind::Lambda_siegel},
      {"Lambda_sharp", FunctionKind::Lambda_sharp},
      {"nu", FunctionKind::nu},
      {"one", FunctionKind::one},
  };
  auto it = names.find(name);
  if (it == names.end()) throw ConfigError("unknown function name: " + name);
  return it->second;
}

Factor parse_factor(const std::string& spec) {
  const auto colon = spec.find(':');
  Factor f;
  f.kind = parse_function_kind(spec.substr(0, colon));
  if (colon != std::string::npos) {
    const std::string s = spec.substr(colon + 1);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      if (s.empty() || s[0] == '-') throw std::invalid_argument("negative");
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad shift in factor '" + spec + "'");
    }
    if (used != s.size()) throw ConfigError("bad shift in factor '" + spec + "'");
    f.shift = v;
  }
  return f;
}

CorrelationContext make_context(std::span<const Factor> factors, std::optional<QuadChar> chi,
                                std::optional<SiegelParams> params, u64 n_max, double quad_tol) {
  CorrelationContext ctx;
  ctx.chi = std::move(chi);
  ctx.params = std::move(params);
  bool want_nu = false, want_b = false, want_sharp = false;
  for (const auto& f : factors) {
    if (needs_chi(f.kind) && !ctx.chi) {
      throw ConfigError(to_string(f.kind) + " needs a character (--delta)");
    }
    if (needs_params(f.kind) && !ctx.params) {
      throw ConfigError(to_string(f.kind) + " needs Siegel parameters");
    }
    want_nu = want_nu || needs_nu(f.kind);
    want_b = want_b || f.kind == FunctionKind::lambda_sharp;
    want_sharp = want_sharp || f.kind == FunctionKind::Lambda_sharp;
  }
  if (want_nu) ctx.nu_weights = std::make_shared<TypeICoeffs>(nu_weights(ctx.params->R.value));
  if (want_b) {
    ctx.sharp_coeffs = std::make_shared<TypeICoeffs>(
        lambda_sharp_coeffs(ctx.params->R.value, ctx.params->D.value, *ctx.chi));
  }
  if (want_sharp) {
    auto s = std::make_shared<ChiLogSharp>(*ctx.params, *ctx.chi, quad_tol);
    s->prepare(n_max);
    ctx.chi_log_sharp = std::move(s);
  }
  return ctx;
}

std::vector<double> evaluate_window(const Factor& f, const CorrelationContext& ctx, u64 lo, u64 hi) {
  if (lo < 1 || hi < lo) throw ConfigError("evaluate_window: need 1 <= lo <= hi");
  check_context(f, ctx);
  WindowData data(ctx, lo, hi);
  return data.values(f);
}

double correlate(u64 x, std::span<const Factor> factors, const CorrelationContext& ctx,
                 const CorrelateOptions& opt) {
  if (x < 1) throw ConfigError("correlate: x must be >= 1");
  if (opt.window < 1) throw ConfigError("correlate: window size must be >= 1");
  u64 max_shift = 0;
  for (const auto& f : factors) {
    check_context(f, ctx);
    max_shift = std::max(max_shift, f.shift);
  }
  if (opt.window + max_shift > kDefaultWindowSize) {
    throw ConfigError("correlate: window size plus shift exceeds the sieve window limit");
  }
  if (x > (u64{1} << 62) - max_shift) throw ConfigError("correlate: x exceeds 2^62");
  const u64 windows = (x + opt.window - 1) / opt.window;
  std::vector<CompensatedSum> sums(static_cast<std::size_t>(windows));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(windows));
  std::atomic<u64> next{0};
  auto worker = [&] {
    for (u64 w = next++; w < windows; w = next++) {
      const u64 a = 1 + w * opt.window;
      const u64 b = std::min(x, a + opt.window - 1);
      try {
        sums[w] = window_sum(factors, ctx, a, b, max_shift);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(windows)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  CompensatedSum total;
  for (u64 w = 0; w < windows; ++w) {
    if (errors[w]) std::rethrow_exception(errors[w]);
    total.add(sums[w]);
  }
  return total.value() / static_cast<double>(x);
}

void ShiftSystem::validate(bool chain_mode) const {
  std::vector<u64> all(h.begin(), h.end());
  all.insert(all.end(), h_prime.begin(), h_prime.end());
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw ConfigError("shifts must be pairwise distinct");
  }
  if (chain_mode && h.size() > 2) throw ConfigError("chain mode requires k <= 2");
}

u64 ShiftSystem::max_shift() const {
  u64 m = 0;
  for (u64 v : h) m = std::max(m, v);
  for (u64 v : h_prime) m = std::max(m, v);
  return m;
}

std::vector<Factor> chain_line_factors(int line, const ShiftSystem& shifts) {
  static constexpr FunctionKind big[5] = {FunctionKind::mangoldt, FunctionKind::mangoldt,
                                          FunctionKind::Lambda_siegel, FunctionKind::Lambda_siegel,
                                          FunctionKind::Lambda_sharp};
  static constexpr FunctionKind small[5] = {FunctionKind::lambda, FunctionKind::lambda_siegel,
                                            FunctionKind::lambda_siegel, FunctionKind::lambda_sharp,
                                            FunctionKind::lambda_sharp};
  if (line < 0 || line > 4) throw ConfigError("chain line index out of range");
  std::vector<Factor> out;
  for (u64 v : shifts.h) out.push_back({big[line], v, {}});
  for (u64 v : shifts.h_prime) out.push_back({small[line], v, {}});
  return out;
}

ChainReport chain_report(const SiegelParams& params, const ShiftSystem& shifts, const QuadChar& chi,
                         const ChainOptions& opt) {
  shifts.validate(true);
  ChainReport rep;
  rep.x = params.x;
  rep.params = params;
  rep.shifts = shifts;
  rep.delta = chi.delta();
  const u64 n_max = params.x + shifts.max_shift();
  std::vector<Factor> all;
  for (int i = 0; i < 5; ++i) {
    auto f = chain_line_factors(i, shifts);
    all.insert(all.end(), f.begin(), f.end());
  }
  const CorrelationContext ctx = make_context(all, chi, params, n_max, opt.quad_tol);
  ChiLogSharp sharp_probe(params, chi, opt.quad_tol);
  rep.T = sharp_probe.T();
  rep.middle_window_empty = sharp_probe.middle_window_empty();
  rep.sharp_degenerate = sharp_probe.degenerate();
  for (int i = 0; i < 5; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const auto factors = chain_line_factors(i, shifts);
    rep.lines[i] = correlate(params.x, factors, ctx, opt.correlate);
    rep.seconds[i] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  const u64 cutoff = std::max(opt.series_cutoff, shifts.max_shift() + 2);
  rep.series = singular_series(shifts.h, cutoff);
  rep.S = shifts.h_prime.empty() ? rep.series.value : 0.0;
  for (int i = 0; i < 4; ++i) rep.gaps[i] = std::fabs(rep.lines[i] - rep.lines[i + 1]);
  rep.gaps[4] = std::fabs(rep.lines[4] - rep.S);
  for (int i = 0; i < 5; ++i) {
    rep.relative_gaps[i] = rep.lines[0] != 0.0 ? rep.gaps[i] / std::fabs(rep.lines[0])
                                               : std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

LevelScan level_of_distribution_scan(const SiegelParams& params, const QuadChar& chi, u64 q,
                                     std::int64_t a, u64 lo, u64 hi, std::span<const double> f,
                                     double quad_tol) {
  if (q < 1 || q > params.x) throw ConfigError("level scan: need 1 <= q <= x");
  if (lo < 1 || hi < lo || hi > 2 * params.x) {
    throw ConfigError("level scan: interval must lie in [1, 2x]");
  }
  if (!f.empty() && f.size() != chi.conductor()) {
    throw ConfigError("level scan: weight table must have length q_chi");
  }
  ChiLogSharp sharp(params, chi, quad_tol);
  sharp.prepare(hi);
  const std::int64_t qs = static_cast<std::int64_t>(q);
  std::int64_t r = a % qs;
  if (r < 0) r += qs;
  u64 n = lo + (static_cast<u64>(r) + q - lo % q) % q;
  LevelScan out;
  CompensatedSum acc;
  for (; n <= hi; n += q) {
    double w = 1.0;
    if (!f.empty()) {
      const std::int64_t idx = (static_cast<std::int64_t>(n) - a) / qs;
      const std::int64_t m = static_cast<std::int64_t>(chi.conductor());
      w = f[static_cast<std::size_t>(((idx % m) + m) % m)];
    }
    const double v = sharp.flat(n) * w;
    acc.add(v);
    out.max_abs = std::max(out.max_abs, std::fabs(v));
    ++out.terms;
  }
  out.sum = acc.value();
  out.trivial = static_cast<double>(params.x) / static_cast<double>(q) * out.max_abs;
  out.ratio = out.trivial > 0 ? std::fabs(out.sum) / out.trivial : 0.0;
  return out;
}

}  // namespace siegel
