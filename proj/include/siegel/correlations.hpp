#pragma once

// Shifted correlation averages E_{n <= x} prod_j f_j(n + h_j), singular
// series, and the five-line approximation chain.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "siegel/approximants.hpp"
#include "siegel/quad_char.hpp"
#include "siegel/type_one.hpp"

namespace siegel {

// (1 - 1/p)^{-k} (1 - |h mod p| / p)
double beta_p(std::span<const std::uint64_t> h, std::uint64_t p);

struct SingularSeries {
  double value = 0;      // point estimate including the expected tail
  double partial = 0;    // product over p <= cutoff
  double lower = 0;      // certified enclosure of the full product
  double upper = 0;
  double tail_bound = 0; // bound on |log of the tail product|
  std::uint64_t cutoff = 0;
};

inline constexpr std::uint64_t kDefaultSeriesCutoff = 10'000'000;

// Throws ConfigError("cutoff-too-small") unless cutoff >= max(h) + 2.
SingularSeries singular_series(std::span<const std::uint64_t> h,
                               std::uint64_t cutoff = kDefaultSeriesCutoff);

enum class FunctionKind {
  lambda,
  mangoldt,
  mu,
  tau,
  chi,
  lambda_siegel,
  lambda_sharp,
  Lambda_siegel,
  Lambda_sharp,
  nu,
  one,
  custom,
};

std::string to_string(FunctionKind k);
// Throws ConfigError for unknown names.
FunctionKind parse_function_kind(const std::string& name);

struct Factor {
  FunctionKind kind = FunctionKind::one;
  std::uint64_t shift = 0;
  std::function<double(std::uint64_t)> custom;  // for FunctionKind::custom
};

// Parses "name:shift".
Factor parse_factor(const std::string& spec);

// Shared data for the approximants. Build with make_context before calling
// correlate from several threads.
struct CorrelationContext {
  std::optional<QuadChar> chi;
  std::optional<SiegelParams> params;
  std::shared_ptr<const TypeICoeffs> nu_weights;
  std::shared_ptr<const TypeICoeffs> sharp_coeffs;
  std::shared_ptr<const ChiLogSharp> chi_log_sharp;
};

// Builds exactly what the listed factors need, with tables prepared up to
// n_max. Throws ConfigError when a needed character or parameter is missing.
CorrelationContext make_context(std::span<const Factor> factors, std::optional<QuadChar> chi,
                                std::optional<SiegelParams> params, std::uint64_t n_max,
                                double quad_tol = 0);

// Values of one factor at n = lo..hi.
std::vector<double> evaluate_window(const Factor& f, const CorrelationContext& ctx,
                                    std::uint64_t lo, std::uint64_t hi);

inline constexpr std::uint64_t kDefaultCorrelateWindow = std::uint64_t{1} << 20;

struct CorrelateOptions {
  std::uint64_t window = kDefaultCorrelateWindow;
  unsigned threads = 1;
};

// (1/x) sum_{n <= x} prod_j f_j(n + h_j). [1, x] is cut into fixed windows,
// each summed with compensation, and the window sums are reduced in
// ascending order, so the result does not depend on the thread count.
double correlate(std::uint64_t x, std::span<const Factor> factors, const CorrelationContext& ctx,
                 const CorrelateOptions& opt = {});

struct ShiftSystem {
  std::vector<std::uint64_t> h;
  std::vector<std::uint64_t> h_prime;

  // Throws ConfigError unless all k + ell shifts are distinct.
  void validate(bool chain_mode) const;
  std::uint64_t max_shift() const;
};

struct ChainReport {
  std::uint64_t x = 0;
  SiegelParams params;
  ShiftSystem shifts;
  std::int64_t delta = 0;
  std::array<double, 5> lines{};         // lines (i)..(v) before the final 'approx S'
  SingularSeries series;                 // of h; value forced to 0 when ell > 0
  double S = 0;
  std::array<double, 5> gaps{};          // |line_i - line_{i+1}|, last is |line_v - S|
  std::array<double, 5> relative_gaps{}; // gaps / |line (i)|, NaN when line (i) = 0
  bool middle_window_empty = false;
  bool sharp_degenerate = false;
  double T = 0;                          // D q^2
  std::array<double, 5> seconds{};
};

struct ChainOptions {
  CorrelateOptions correlate;
  double quad_tol = 0;  // 0 selects 1e-9 log x
  std::uint64_t series_cutoff = kDefaultSeriesCutoff;
};

ChainReport chain_report(const SiegelParams& params, const ShiftSystem& shifts,
                         const QuadChar& chi, const ChainOptions& opt = {});

// Factor lists for each line.
std::vector<Factor> chain_line_factors(int line, const ShiftSystem& shifts);

struct LevelScan {
  double sum = 0;          // sum over n in [lo, hi], n = a (q) of (chi*log)^flat(n) f((n-a)/q)
  std::uint64_t terms = 0;
  double max_abs = 0;      // max |summand|
  double trivial = 0;      // x / q * max_abs
  double ratio = 0;        // |sum| / trivial, 0 when trivial = 0
};

// f, when non-empty, is a table of length q_chi holding a q_chi-periodic weight.
LevelScan level_of_distribution_scan(const SiegelParams& params, const QuadChar& chi,
                                     std::uint64_t q, std::int64_t a, std::uint64_t lo,
                                     std::uint64_t hi, std::span<const double> f = {},
                                     double quad_tol = 0);

}  // namespace siegel
