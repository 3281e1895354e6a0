#include "siegel/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "siegel/approximants.hpp"
#include "siegel/arith_tables.hpp"
#include "siegel/correlations.hpp"
#include "siegel/error.hpp"
#include "siegel/exp_sums.hpp"
#include "siegel/quad_char.hpp"
#include "siegel/report.hpp"
#include "siegel/selberg.hpp"
#include "siegel/selftest.hpp"

namespace siegel {

namespace {

using u64 = std::uint64_t;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<u64> parse_count_list(const std::string& text) {
  std::vector<u64> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_count(item));
  if (out.empty()) throw ConfigError("empty list: '" + text + "'");
  return out;
}

std::vector<u64> parse_shift_list(const std::string& text) {
  std::vector<u64> out;
  for (const auto& item : split(text, ',')) {
    char* end = nullptr;
    const long long v = std::strtoll(item.c_str(), &end, 10);
    if (*end != '\0' || v < 0) throw ConfigError("invalid shift '" + item + "'");
    out.push_back(static_cast<u64>(v));
  }
  return out;
}

// Appends config-file keys that were not given as flags.
std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::vector<std::string> merged;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      merged.push_back(args[i]);
    }
  }
  if (!path) return merged;
  for (const auto& [key, value] : read_config_file(*path)) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : merged) {
      given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    }
    if (given) continue;
    merged.push_back(flag);
    if (!value.empty()) merged.push_back(value);
  }
  return merged;
}

// Flags shared by the commands that build Siegel-model parameters.
struct ModelFlags {
  std::int64_t delta = 0;
  std::string x = "1e6";
  int k = 2;
  int ell = 0;
  std::optional<double> eta, R, D, R0;
  double eps0 = 0.5;
  double quad_tol = 0;

  void add(CLI::App* sub, bool need_delta) {
    auto* d = sub->add_option("--delta", delta, "fundamental discriminant");
    if (need_delta) d->required();
    sub->add_option("--x", x, "range end, e.g. 1e6; comma list for sweeps");
    sub->add_option("--k", k, "number of shifts in the main term");
    sub->add_option("--ell", ell, "number of character-twisted shifts");
    sub->add_option("--eta", eta, "quality proxy override (>= 10)");
    sub->add_option("--R", R, "sieve level override");
    sub->add_option("--D", D, "Type-I level override");
    sub->add_option("--R0", R0, "smoothness scale override");
    sub->add_option("--eps0", eps0, "exponent in the Type-I level");
    sub->add_option("--quad-tol", quad_tol, "quadrature tolerance (0: 1e-9 log x)");
  }

  SiegelParams params(const QuadChar& chi, u64 xv) const {
    return make_params(xv, k, ell, eps0, quality_proxy(chi, eta), {R, D, R0});
  }
};

struct Globals {
  std::string out_path;
  std::string format;
  unsigned threads = 1;
  u64 window = kDefaultCorrelateWindow;
  bool timings = false;
};

json config_echo(const CLI::App& app, const CLI::App* sub) {
  json j = json::object();
  auto collect = [&](const CLI::App& a) {
    for (const CLI::Option* opt : a.get_options()) {
      if (opt->count() == 0 || opt->get_name() == "--help") continue;
      const auto& r = opt->results();
      std::string name = opt->get_name();
      while (!name.empty() && name.front() == '-') name.erase(name.begin());
      j[name] = r.size() == 1 ? json(r.front()) : json(r);
    }
  };
  collect(app);
  collect(*sub);
  return j;
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

class Emitter {
 public:
  Emitter(const Globals& g, std::ostream& out) : g_(g), out_(out) {}

  std::string format(const std::string& fallback) const {
    const std::string f = g_.format.empty() ? fallback : g_.format;
    if (f != "json" && f != "csv") throw ConfigError("unknown format '" + f + "'");
    return f;
  }

  void write(const std::string& text) const {
    if (g_.out_path.empty()) {
      out_ << text;
      out_.flush();
      return;
    }
    std::ofstream f(g_.out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + g_.out_path + "'");
    f << text;
  }

 private:
  const Globals& g_;
  std::ostream& out_;
};

void cmd_sieve(u64 lo, u64 hi, bool use_cache, const Emitter& emit, const std::string& format,
               const json& config) {
  if (lo < 1 || hi < lo) throw ConfigError("sieve needs 1 <= lo <= hi");
  ArithTable t;
  const char* dir = std::getenv("SIEGEL_LAB_CACHE_DIR");
  if (use_cache) {
    if (!dir) throw ConfigError("--cache needs SIEGEL_LAB_CACHE_DIR");
    t = cached_window(dir, lo, hi);
  } else {
    t = build_window(lo, hi);
  }
  if (format == "json") {
    json j = envelope("sieve", config);
    json rows = json::array();
    for (u64 n = lo; n <= hi; ++n) {
      rows.push_back({{"n", n},
                      {"lambda", t.liouville(n)},
                      {"mangoldt", t.von_mangoldt(n)},
                      {"mu", t.moebius(n)},
                      {"tau", t.divisor_count(n)},
                      {"spf", t.smallest_prime_factor(n)}});
    }
    j["rows"] = std::move(rows);
    emit.write(json_text(j));
    return;
  }
  std::vector<std::vector<std::string>> rows;
  for (u64 n = lo; n <= hi; ++n) {
    rows.push_back({std::to_string(n), std::to_string(t.liouville(n)),
                    csv_number(t.von_mangoldt(n)), std::to_string(t.moebius(n)),
                    std::to_string(t.divisor_count(n)),
                    std::to_string(t.smallest_prime_factor(n))});
  }
  emit.write(to_csv({"n", "lambda", "mangoldt", "mu", "tau", "spf"}, rows));
}

void cmd_char(std::int64_t delta, std::optional<double> eta, const std::string& xs, double eps,
              const Emitter& emit, const json& config) {
  const QuadChar chi(delta);
  const QualityProxy q = quality_proxy(chi, eta);
  json j = envelope("char", config);
  j["delta"] = delta;
  j["conductor"] = chi.conductor();
  j["L1"] = l_one(chi);
  j["Lprime1"] = l_prime_one(chi);
  j["eta_hat"] = q.eta_hat;
  j["method"] = to_string(q.method);
  j["raw_ratio"] = q.raw_ratio;
  json sums = json::array();
  if (!xs.empty()) {
    for (u64 x : parse_count_list(xs)) sums.push_back(to_json(exceptional_sum_report(chi, x, eps, q)));
  }
  j["exceptional_sums"] = std::move(sums);
  emit.write(json_text(j));
}

void cmd_approx(const ModelFlags& m, const std::string& table, u64 n_max, const Emitter& emit) {
  const QuadChar chi(m.delta);
  const SiegelParams p = m.params(chi, parse_count_list(m.x).front());
  std::vector<std::vector<std::string>> rows;
  if (table == "b" || table == "a") {
    const TypeICoeffs c = table == "b" ? lambda_sharp_coeffs(p.R.value, p.D.value, chi)
                                       : nu_weights(p.R.value);
    for (const auto& [d, v] : c.entries) rows.push_back({std::to_string(d), csv_number(v)});
  } else if (table == "c" || table == "psi") {
    const ChiLogSharp sharp(p, chi, m.quad_tol);
    if (n_max == 0) throw ConfigError("--n-max must be positive");
    sharp.prepare(n_max);
    for (u64 d = 1; d <= n_max; ++d) {
      const double v = table == "c" ? sharp.c(d) : sharp.Psi(static_cast<double>(d));
      rows.push_back({std::to_string(d), csv_number(v)});
    }
  } else {
    throw ConfigError("unknown table '" + table + "' (expected b, a, c or psi)");
  }
  emit.write(to_csv({"d", "value"}, rows));
}

void cmd_correlate(const ModelFlags& m, const std::string& factor_text, const Globals& g,
                   const Emitter& emit, const std::string& format, const json& config) {
  std::vector<Factor> factors;
  for (const auto& s : split(factor_text, ',')) factors.push_back(parse_factor(s));
  if (factors.empty()) throw ConfigError("--factors is empty");
  const std::vector<u64> xs = parse_count_list(m.x);
  std::optional<QuadChar> chi;
  if (m.delta != 0) chi.emplace(m.delta);
  json results = json::array();
  std::vector<std::vector<std::string>> rows;
  for (u64 x : xs) {
    std::optional<SiegelParams> params;
    if (chi) params = m.params(*chi, x);
    u64 max_shift = 0;
    for (const auto& f : factors) max_shift = std::max(max_shift, f.shift);
    const CorrelationContext ctx = make_context(factors, chi, params, x + max_shift, m.quad_tol);
    const double v = correlate(x, factors, ctx, {g.window, g.threads});
    rows.push_back({std::to_string(x), factor_text, csv_number(v)});
    json r{{"x", x}, {"value", v}};
    if (params) r["params"] = to_json(*params);
    results.push_back(std::move(r));
  }
  if (format == "csv") {
    emit.write(to_csv({"x", "factors", "value"}, rows));
    return;
  }
  json j = envelope("correlate", config);
  j["factors"] = factor_text;
  j["results"] = std::move(results);
  emit.write(json_text(j));
}

void cmd_chain(const ModelFlags& m, const std::string& shifts, const std::string& lshifts,
               u64 series_cutoff, const Globals& g, const Emitter& emit,
               const std::string& format, const json& config) {
  const QuadChar chi(m.delta);
  ShiftSystem s;
  s.h = parse_shift_list(shifts);
  if (!lshifts.empty()) s.h_prime = parse_shift_list(lshifts);
  if (static_cast<int>(s.h.size()) != m.k) throw ConfigError("--k must equal the number of --shifts");
  if (static_cast<int>(s.h_prime.size()) != m.ell) {
    throw ConfigError("--ell must equal the number of --lshifts");
  }
  ChainOptions opt;
  opt.correlate = {g.window, g.threads};
  opt.quad_tol = m.quad_tol;
  opt.series_cutoff = series_cutoff;
  std::vector<ChainReport> reports;
  for (u64 x : parse_count_list(m.x)) reports.push_back(chain_report(m.params(chi, x), s, chi, opt));
  if (format == "csv") {
    std::vector<std::string> header{"x", "R", "D", "R0", "T"};
    for (int i = 1; i <= 5; ++i) header.push_back("line" + std::to_string(i));
    header.push_back("S");
    for (int i = 1; i <= 5; ++i) header.push_back("gap" + std::to_string(i));
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) {
      std::vector<std::string> row{std::to_string(r.x), csv_number(r.params.R.value),
                                   csv_number(r.params.D.value), csv_number(r.params.R0.value),
                                   csv_number(r.T)};
      for (double v : r.lines) row.push_back(csv_number(v));
      row.push_back(csv_number(r.S));
      for (double v : r.gaps) row.push_back(csv_number(v));
      rows.push_back(std::move(row));
    }
    emit.write(to_csv(header, rows));
    return;
  }
  json j = envelope("chain", config);
  if (reports.size() == 1) {
    j["report"] = to_json(reports.front(), g.timings);
  } else {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r, g.timings));
    j["reports"] = std::move(arr);
  }
  emit.write(json_text(j));
}

struct ExpsumFlags {
  std::string mode = "kloosterman";
  u64 q = 7, q0 = 1, qmax = 50, count = 1000, seed = 1;
  std::int64_t u1 = 1, u2 = 1, a = 1, delta = -163;
  u64 h1 = 0, h2 = 1;
};

void cmd_expsum(const ExpsumFlags& f, const Emitter& emit, const std::string& format,
                const json& config) {
  std::mt19937_64 rng(f.seed);
  if (f.mode == "kloosterman" || f.mode == "hyperbola") {
    if (f.q < 1) throw ConfigError("--q must be positive");
    cplx v;
    double bound;
    if (f.mode == "kloosterman") {
      v = kloosterman(f.u1, f.u2, f.q);
      bound = estermann_bound(f.u1, f.u2, f.q);
    } else {
      const PeriodicWeight w = PeriodicWeight::constant(f.q0);
      v = hyperbola_fourier_coeff(f.q, f.a, w, f.u1, f.u2);
      bound = hyperbola_bound(f.q, f.q0, f.u1, f.u2);
    }
    if (format == "csv") {
      emit.write(to_csv({"q", "u1", "u2", "re", "im", "abs", "bound"},
                        {{std::to_string(f.q), std::to_string(f.u1), std::to_string(f.u2),
                          csv_number(v.real()), csv_number(v.imag()), csv_number(std::abs(v)),
                          csv_number(bound)}}));
      return;
    }
    json j = envelope("expsum", config);
    j["re"] = v.real();
    j["im"] = v.imag();
    j["abs"] = std::abs(v);
    j["bound"] = bound;
    emit.write(json_text(j));
    return;
  }
  if (f.mode == "mfe") {
    const PeriodicWeight w = PeriodicWeight::random(f.q0, rng);
    const MfeDecomposition m = mfe_decompose(f.q, f.a, w);
    const double identity = m.identity_residual(w);
    if (format == "csv") {
      emit.write(to_csv({"q", "q0", "a", "alpha", "identity_residual",
                         "max_excluded", "max_bound_ratio"},
                        {{std::to_string(f.q), std::to_string(f.q0), std::to_string(f.a),
                          csv_number(m.alpha),
                          csv_number(identity), csv_number(m.max_excluded()),
                          csv_number(m.max_bound_ratio())}}));
      return;
    }
    json j = envelope("expsum", config);
    j["q0_prime"] = m.q0_prime;
    j["alpha"] = m.alpha;
    j["identity_residual"] = identity;
    j["max_excluded"] = m.max_excluded();
    j["max_bound_ratio"] = m.max_bound_ratio();
    emit.write(json_text(j));
    return;
  }
  if (f.mode == "scan") {
    std::vector<std::vector<std::string>> rows;
    for (u64 q = 1; q <= f.qmax; ++q) {
      const RootTable roots(q);
      double kl = 0;
      for (u64 u1 = 0; u1 < q; ++u1) {
        for (u64 u2 = 0; u2 < q; ++u2) {
          kl = std::max(kl, std::abs(kloosterman(u1, u2, q, roots)) / estermann_bound(u1, u2, q));
        }
      }
      double mfe = 0;
      for (u64 q0 = 1; q0 <= q; ++q0) {
        if (q % q0) continue;
        const MfeDecomposition m = mfe_decompose(q, 1, PeriodicWeight::random(q0, rng));
        mfe = std::max(mfe, m.max_bound_ratio());
      }
      rows.push_back({std::to_string(q), csv_number(kl), csv_number(mfe)});
    }
    emit.write(to_csv({"q", "kloosterman_max_ratio", "mfe_max_ratio"}, rows));
    return;
  }
  if (f.mode == "weil") {
    const QuadChar chi(f.delta);
    const WeilScan s = weil_interval_scan(chi, f.h1, f.h2, f.count, rng);
    if (format == "csv") {
      emit.write(to_csv({"delta", "h1", "h2", "intervals", "violations", "max_ratio"},
                        {{std::to_string(f.delta), std::to_string(f.h1), std::to_string(f.h2),
                          std::to_string(s.intervals), std::to_string(s.violations),
                          csv_number(s.max_ratio)}}));
      return;
    }
    json j = envelope("expsum", config);
    j["intervals"] = s.intervals;
    j["violations"] = s.violations;
    j["max_ratio"] = s.max_ratio;
    emit.write(json_text(j));
    return;
  }
  throw ConfigError("unknown expsum mode '" + f.mode + "'");
}

void cmd_ld_scan(const ModelFlags& m, u64 q, std::int64_t a, const std::string& lo_text,
                 const std::string& hi_text, const Emitter& emit, const json& config) {
  const QuadChar chi(m.delta);
  const u64 x = parse_count_list(m.x).front();
  const SiegelParams p = m.params(chi, x);
  const u64 lo = lo_text.empty() ? 1 : parse_count(lo_text);
  const u64 hi = hi_text.empty() ? x : parse_count(hi_text);
  const LevelScan s = level_of_distribution_scan(p, chi, q, a, lo, hi, {}, m.quad_tol);
  json j = envelope("ld-scan", config);
  j["params"] = to_json(p);
  j["q"] = q;
  j["a"] = a;
  j["scan"] = to_json(s);
  emit.write(json_text(j));
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(number) + ": expected key=value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

u64 parse_count(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0' || !std::isfinite(v) || v < 1 || v > 9.2e18 ||
      v != std::floor(v)) {
    throw ConfigError("expected a positive integer, got '" + text + "'");
  }
  return static_cast<u64>(v);
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for Siegel-model approximants and correlations",
               "siegel-lab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", software_version());
  Globals g;
  app.add_option("--out", g.out_path, "write the report to this file");
  app.add_option("--format", g.format, "json or csv");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--windows", g.window, "correlation window size")
      ->check(CLI::Range(u64{1}, u64{1} << 24));
  app.add_flag("--timings", g.timings, "include wall-clock timings in chain reports");
  app.add_option("--config", "key=value file merged under the flags");

  u64 sieve_lo = 1;
  std::string sieve_hi;
  bool sieve_cache = false;
  auto* sieve = app.add_subcommand("sieve", "dump a window of lambda, mangoldt, mu, tau, spf");
  sieve->add_option("--lo", sieve_lo, "window start");
  sieve->add_option("--hi", sieve_hi, "window end")->required();
  sieve->add_flag("--cache", sieve_cache, "use the cache in SIEGEL_LAB_CACHE_DIR");

  std::int64_t char_delta = 0;
  std::optional<double> char_eta;
  std::string char_x;
  double char_eps = 0.1;
  auto* chr = app.add_subcommand("char", "quadratic character summary");
  chr->add_option("--delta", char_delta, "fundamental discriminant")->required();
  chr->add_option("--eta", char_eta, "quality proxy override (>= 10)");
  chr->add_option("--x", char_x, "ranges for exceptional-prime sums, comma separated");
  chr->add_option("--eps", char_eps, "exponent slack for exceptional-prime sums");

  ModelFlags approx_flags;
  std::string approx_table = "b";
  u64 approx_n = 1000;
  auto* approx = app.add_subcommand("approx", "coefficient tables of the approximants");
  approx_flags.add(approx, true);
  approx->add_option("--table", approx_table, "b, a, c or psi");
  approx->add_option("--n-max", approx_n, "last d for the c and psi tables");

  ModelFlags corr_flags;
  std::string corr_factors;
  auto* corr = app.add_subcommand("correlate", "averaged product of shifted functions");
  corr_flags.add(corr, false);
  corr->add_option("--factors", corr_factors, "name:shift list, e.g. lambda:0,lambda:1")
      ->required();

  ModelFlags chain_flags;
  std::string chain_shifts = "0,2", chain_lshifts;
  u64 chain_cutoff = kDefaultSeriesCutoff;
  auto* chain = app.add_subcommand("chain", "evaluate the five-step approximation chain");
  chain_flags.add(chain, true);
  chain->add_option("--shifts", chain_shifts, "shifts of the main factors");
  chain->add_option("--lshifts", chain_lshifts, "shifts of the character-twisted factors");
  chain->add_option("--series-cutoff", chain_cutoff, "prime cutoff for the singular series");

  ExpsumFlags ex;
  auto* expsum = app.add_subcommand("expsum", "Kloosterman and hyperbola exponential sums");
  expsum->add_option("--mode", ex.mode, "kloosterman, hyperbola, mfe, scan or weil");
  expsum->add_option("--q", ex.q, "modulus");
  expsum->add_option("--q0", ex.q0, "period of the weight");
  expsum->add_option("--a", ex.a, "residue class of n1 n2");
  expsum->add_option("--u1", ex.u1, "first frequency");
  expsum->add_option("--u2", ex.u2, "second frequency");
  expsum->add_option("--qmax", ex.qmax, "last modulus for scans");
  expsum->add_option("--seed", ex.seed, "random seed for weights and intervals");
  expsum->add_option("--delta", ex.delta, "discriminant for the weil mode");
  expsum->add_option("--h1", ex.h1, "first shift for the weil mode");
  expsum->add_option("--h2", ex.h2, "second shift for the weil mode");
  expsum->add_option("--count", ex.count, "number of random intervals");

  ModelFlags ld_flags;
  u64 ld_q = 1;
  std::int64_t ld_a = 0;
  std::string ld_lo, ld_hi;
  auto* ld = app.add_subcommand("ld-scan", "level-of-distribution diagnostics for Lambda sharp");
  ld_flags.add(ld, true);
  ld->add_option("--q", ld_q, "modulus");
  ld->add_option("--a", ld_a, "residue");
  ld->add_option("--lo", ld_lo, "start of the summation range");
  ld->add_option("--hi", ld_hi, "end of the summation range");

  bool quick = false;
  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
  selftest->add_flag("--quick", quick, "smaller exhaustive ranges");

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << software_version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  const Emitter emit(g, out);
  try {
    CLI::App* sub = app.get_subcommands().front();
    const json config = config_echo(app, sub);
    if (sub == sieve) {
      cmd_sieve(sieve_lo, parse_count(sieve_hi), sieve_cache, emit, emit.format("csv"), config);
    } else if (sub == chr) {
      cmd_char(char_delta, char_eta, char_x, char_eps, emit, config);
    } else if (sub == approx) {
      cmd_approx(approx_flags, approx_table, approx_n, emit);
    } else if (sub == corr) {
      cmd_correlate(corr_flags, corr_factors, g, emit, emit.format("csv"), config);
    } else if (sub == chain) {
      cmd_chain(chain_flags, chain_shifts, chain_lshifts, chain_cutoff, g, emit,
                emit.format("json"), config);
    } else if (sub == expsum) {
      cmd_expsum(ex, emit, emit.format(ex.mode == "scan" ? "csv" : "json"), config);
    } else if (sub == ld) {
      cmd_ld_scan(ld_flags, ld_q, ld_a, ld_lo, ld_hi, emit, config);
    } else if (sub == selftest) {
      std::ostringstream log;
      const SelftestResult r = run_selftest(&err, quick);
      for (const auto& c : r.checks) {
        log << (c.passed ? "PASS " : "FAIL ") << c.name << '\n';
      }
      emit.write(log.str());
      if (!r.ok()) return kExitSelftest;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "computation failed: " << e.what() << '\n';
    return kExitComputation;
  }
  return kExitOk;
}

}  // namespace siegel
