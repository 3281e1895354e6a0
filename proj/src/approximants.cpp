#include "siegel/approximants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "siegel/error.hpp"
#include "siegel/selberg.hpp"
#include "siegel/smoothing.hpp"
#include "siegel/summation.hpp"

namespace siegel {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::formula: return "formula";
    case Provenance::override_: return "override";
    case Provenance::clamped: return "clamped";
  }
  return "unknown";
}

SiegelParams make_params(std::uint64_t x, int k, int ell, double eps0, const QualityProxy& eta,
                         const ScaleOverrides& overrides) {
  if (x < 2) throw ConfigError("x must be >= 2");
  if (k < 0 || ell < 0) throw ConfigError("k and ell must be nonnegative");
  if (!(eps0 > 0 && eps0 < 1)) throw ConfigError("eps0 must lie in (0, 1)");
  if (!(eta.eta_hat > 1)) throw ConfigError("eta must exceed 1");
  SiegelParams p;
  p.x = x;
  p.k = k;
  p.ell = ell;
  p.eps0 = eps0;
  p.eta = eta;
  const double xd = static_cast<double>(x);
  const double log_eta = std::log(eta.eta_hat);
  p.R.value = std::pow(xd, 1.0 / std::pow(log_eta, 1.0 / (5.0 * std::max(1, k))));
  p.D.value = std::pow(xd, eps0 / (10.0 * std::max(1, k + ell)));
  p.R0.value = std::pow(xd, 1.0 / std::sqrt(log_eta));
  auto apply = [](Scale& s, const std::optional<double>& v, const char* name) {
    if (!v) return;
    if (!(*v > 1) || !std::isfinite(*v)) {
      throw ConfigError(std::string("override ") + name + " must be a finite real > 1");
    }
    s.value = *v;
    s.provenance = Provenance::override_;
  };
  apply(p.R, overrides.R, "R");
  apply(p.D, overrides.D, "D");
  apply(p.R0, overrides.R0, "R0");
  auto clamp = [](Scale& s, double lo, double hi) {
    const double v = std::clamp(s.value, lo, std::max(lo, hi));
    if (v != s.value) {
      s.value = v;
      s.provenance = Provenance::clamped;
    }
  };
  clamp(p.R, 2.0, xd);
  clamp(p.D, 2.0, xd);
  clamp(p.R0, 2.0, p.R.value);
  return p;
}

int lambda_siegel(std::span<const PrimePower> f, double R, const QuadChar& chi) {
  int v = 1;
  for (const auto& pp : f) {
    const int local = static_cast<double>(pp.p) <= R ? -1 : chi(pp.p);
    if (local == 0) return 0;
    if ((pp.e & 1) && local == -1) v = -v;
  }
  return v;
}

int lambda_siegel(std::uint64_t n, double R, const QuadChar& chi) {
  if (n < 1) throw ConfigError("lambda_siegel: n must be >= 1");
  const auto f = factorize(n);
  return lambda_siegel(f, R, chi);
}

bool lambda_agreement_predicate(std::uint64_t n, double R, const QuadChar& chi) {
  if (n < 1) throw ConfigError("lambda_agreement_predicate: n must be >= 1");
  for (const auto& pp : factorize(n)) {
    if (static_cast<double>(pp.p) > R && chi(pp.p) != -1) return false;
  }
  return true;
}

TypeICoeffs lambda_sharp_coeffs(double R, double D, const QuadChar& chi, std::uint64_t bound) {
  if (!(R > 1) || !(D > 1)) throw ConfigError("lambda_sharp_coeffs: R and D must exceed 1");
  if (D > static_cast<double>(bound)) {
    throw ConfigError("D-too-large: D = " + std::to_string(D) + " exceeds " +
                      std::to_string(bound));
  }
  // Local factors (lambda * mu chi)(p^j) = (-1)^j (1 + chi(p)); zero when chi(p) = -1.
  const auto limit = static_cast<std::uint64_t>(std::ceil(D));
  std::vector<std::pair<std::uint64_t, int>> primes;
  for (std::uint64_t p : primes_up_to(std::min<std::uint64_t>(limit, static_cast<std::uint64_t>(R)))) {
    const int c = chi(p);
    if (c != -1) primes.emplace_back(p, 1 + c);
  }
  TypeICoeffs out;
  out.cutoff = D;
  out.twist = Twist::chi_cofactor;
  std::function<void(std::size_t, std::uint64_t, double)> dfs = [&](std::size_t i, std::uint64_t d,
                                                                    double g) {
    const double w = psi_le(D, static_cast<double>(d));
    if (w != 0.0) out.entries.emplace_back(d, g * w);
    for (std::size_t j = i; j < primes.size(); ++j) {
      const auto [p, weight] = primes[j];
      if (static_cast<double>(d) * static_cast<double>(p) >= D) break;
      std::uint64_t dp = d * p;
      double sign = -1.0;
      while (static_cast<double>(dp) < D) {
        dfs(j + 1, dp, g * sign * weight);
        if (static_cast<double>(dp) * static_cast<double>(p) >= D) break;
        dp *= p;
        sign = -sign;
      }
    }
  };
  dfs(0, 1, 1.0);
  std::sort(out.entries.begin(), out.entries.end());
  return out;
}

double lambda_sharp(std::uint64_t n, const TypeICoeffs& b, const QuadChar& chi) {
  return b.evaluate(n, &chi);
}

double lambda_flat(std::uint64_t n, const TypeICoeffs& b, double R, const QuadChar& chi) {
  const auto f = factorize(n);
  return lambda_siegel(f, R, chi) - b.evaluate(n, f, &chi);
}

double lambda_flat_convolution(std::uint64_t n, double R, double D, const QuadChar& chi) {
  CompensatedSum acc;
  for (std::uint64_t d : divisors_up_to(n, n)) {
    const auto fd = factorize(d);
    if (!fd.empty() && static_cast<double>(fd.back().p) > R) continue;
    const double cut = psi_gt(D, static_cast<double>(d));
    if (cut == 0.0) continue;
    // (lambda * mu chi)(d) by brute-force convolution.
    long h = 0;
    for (std::uint64_t e : divisors_up_to(d, d)) {
      const auto fe = factorize(e);
      const int lam = (big_omega(fe) & 1) ? -1 : 1;
      const auto fq = factorize(d / e);
      bool squarefree = true;
      for (const auto& pp : fq) squarefree = squarefree && pp.e == 1;
      if (!squarefree) continue;
      const int mu = (fq.size() & 1) ? -1 : 1;
      h += lam * mu * chi(d / e);
    }
    if (h != 0) acc.add(static_cast<double>(h) * cut * chi(n / d));
  }
  return acc.value();
}

double chi_log(std::uint64_t n, std::span<const PrimePower> f, const QuadChar& chi) {
  const Factorization fac(f.begin(), f.end());
  CompensatedSum acc;
  for (std::uint64_t d : divisors_of(fac, n)) {
    const int c = chi(d);
    if (c != 0 && d != n) acc.add(c * std::log(static_cast<double>(n / d)));
  }
  return acc.value();
}

double chi_log(std::uint64_t n, const QuadChar& chi) {
  if (n < 1) throw ConfigError("chi_log: n must be >= 1");
  const auto f = factorize(n);
  return chi_log(n, f, chi);
}

double Lambda_siegel(std::uint64_t n, double R, const QuadChar& chi) {
  const auto f = factorize(n);
  return chi_log(n, f, chi) * nu_direct(f, R);
}

namespace {

// psi_{<= z}(x / t) with z = T^2, written through log(x/t) / log z.
double psi_le_ratio(double x, double t, double log_z) { return psi(std::log(x / t) / log_z); }

}  // namespace

ChiLogSharp::ChiLogSharp(const SiegelParams& params, const QuadChar& chi, double quad_tol)
    : chi_(chi),
      x_(static_cast<double>(params.x)),
      T_(params.D.value * static_cast<double>(chi.conductor()) *
         static_cast<double>(chi.conductor())),
      tol_(quad_tol > 0 ? quad_tol : 1e-9 * std::log(static_cast<double>(params.x))) {
  // K = int_T^{100x} psi_{>T^2}(x/t) log t dt/t. psi is even, so the
  // integrand lives on t < x/T and again on t > x T.
  const double log_z = 2.0 * std::log(T_);
  const double bps[] = {x_ / (T_ * T_), x_ / T_, x_ * T_};
  QuadOptions opt;
  opt.tol = tol_;
  const auto k_part = [&](double a, double b) {
    if (!(b > a)) return 0.0;
    return quad_log_pieces(
        [&](double t) { return (1.0 - psi_le_ratio(x_, t, log_z)) * std::log(t); }, a, b, bps,
        opt);
  };
  K_ = k_part(T_, std::min(100.0 * x_, x_ / T_)) + k_part(std::max(T_, x_ * T_), 100.0 * x_);
}

double ChiLogSharp::I1(double d) const {
  // int_{1/100}^T Phi_t(d) log t dt/t, with Phi_t(d) supported on [d/e, d e].
  const double lo = d / std::numbers::e, hi = d * std::numbers::e;
  if (hi <= T_) return std::log(d);
  if (lo >= T_) return 0.0;
  QuadOptions opt;
  opt.tol = tol_;
  return quad_log([&](double t) { return phi_t(t, d) * std::log(t); }, lo, T_, opt);
}

double ChiLogSharp::c(std::uint64_t d) const {
  const double dd = static_cast<double>(d);
  double v = I1(dd);
  if (K_ != 0.0) v += phi_t(T_, dd) * K_;
  return v;
}

double ChiLogSharp::Psi(double y) const {
  const double lo = std::max(T_, y / std::numbers::e);
  const double hi = std::min(100.0 * x_, y * std::numbers::e);
  if (hi <= lo) return 0.0;
  // psi_{<=T^2}(x/t) = 1 exactly on [x/T, x T].
  const double ramp_lo = x_ / (T_ * T_), ramp_hi = x_ / T_, upper_ramp = x_ * T_;
  if (hi <= ramp_lo) return 0.0;
  if (y / std::numbers::e >= T_ && y / std::numbers::e >= ramp_hi &&
      y * std::numbers::e <= std::min(100.0 * x_, upper_ramp)) {
    return std::log(y);
  }
  const double log_z = 2.0 * std::log(T_);
  const double bps[] = {ramp_lo, ramp_hi, upper_ramp};
  QuadOptions opt;
  opt.tol = tol_;
  return quad_log_pieces(
      [&](double t) { return psi_le_ratio(x_, t, log_z) * phi_t(t, y) * std::log(t); },
      std::max(lo, ramp_lo), hi, bps, opt);
}

void ChiLogSharp::prepare(std::uint64_t n) const {
  const std::size_t need = static_cast<std::size_t>(n) + 1;
  if (c_table_.size() >= need) return;
  std::size_t from = std::max<std::size_t>(c_table_.size(), 1);
  c_table_.resize(need, 0.0);
  psi_table_.resize(need, 0.0);
  for (std::size_t m = from; m < need; ++m) {
    c_table_[m] = c(m);
    psi_table_[m] = Psi(static_cast<double>(m));
  }
}

double ChiLogSharp::evaluate(std::uint64_t n) const {
  if (n < 1) throw ConfigError("chi_log_sharp: n must be >= 1");
  const bool tabulated = c_table_.size() > n;
  CompensatedSum acc;
  for (std::uint64_t d : divisors_up_to(n, n)) {
    const std::uint64_t m = n / d;
    const int cm = chi_(m), cd = chi_(d);
    if (cm != 0) acc.add(cm * (tabulated ? c_table_[d] : c(d)));
    if (cd != 0) acc.add(cd * (tabulated ? psi_table_[m] : Psi(static_cast<double>(m))));
  }
  return acc.value();
}

std::vector<double> ChiLogSharp::window(std::uint64_t lo, std::uint64_t hi) const {
  if (lo < 1 || hi < lo) throw ConfigError("chi_log_sharp window: need 1 <= lo <= hi");
  prepare(hi);
  std::vector<double> out(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (std::uint64_t d = 1; d <= hi; ++d) {
    const double cd_coeff = c_table_[d];
    const int cd = chi_(d);
    std::uint64_t m = (lo + d - 1) / d;
    for (std::uint64_t n = m * d; n <= hi; n += d, ++m) {
      double v = 0.0;
      const int cm = chi_(m);
      if (cm != 0) v += cm * cd_coeff;
      if (cd != 0) v += cd * psi_table_[m];
      out[n - lo] += v;
    }
  }
  return out;
}

double ChiLogSharp::evaluate_by_quadrature(std::uint64_t n) const {
  if (n < 1) throw ConfigError("chi_log_sharp: n must be >= 1");
  const auto divs = divisors_up_to(n, n);
  const double nd = static_cast<double>(n);
  const double log_z = 2.0 * std::log(T_);
  std::vector<double> bps{T_, x_ / T_, x_ / (T_ * T_), x_ * T_};
  for (std::uint64_t d : divs) {
    bps.push_back(static_cast<double>(d) / std::numbers::e);
    bps.push_back(static_cast<double>(d) * std::numbers::e);
  }
  QuadOptions opt;
  opt.tol = tol_;
  // First window: sum_{d | n} Phi_t(d) chi(n/d).
  const double first = quad_log_pieces(
      [&](double t) {
        double s = 0;
        for (std::uint64_t d : divs) s += phi_t(t, static_cast<double>(d)) * chi_(n / d);
        return s * std::log(t);
      },
      0.01, T_, bps, opt);
  // Second: psi_{<=T^2}(x/t) sum_{d | n} Phi_t(n/d) chi(d).
  const double second = quad_log_pieces(
      [&](double t) {
        const double w = psi_le_ratio(x_, t, log_z);
        if (w == 0.0) return 0.0;
        double s = 0;
        for (std::uint64_t d : divs) s += phi_t(t, nd / static_cast<double>(d)) * chi_(d);
        return w * s * std::log(t);
      },
      T_, 100.0 * x_, bps, opt);
  // Third: psi_{>T^2}(x/t) sum_{d | n} Phi_T(d) chi(n/d).
  double frozen = 0;
  for (std::uint64_t d : divs) frozen += phi_t(T_, static_cast<double>(d)) * chi_(n / d);
  double third = 0;
  if (frozen != 0.0) {
    third = quad_log_pieces(
        [&](double t) { return (1.0 - psi_le_ratio(x_, t, log_z)) * frozen * std::log(t); }, T_,
        100.0 * x_, bps, opt);
  }
  return first + second + third;
}

double ChiLogSharp::flat_by_quadrature(std::uint64_t n) const {
  if (n < 1) throw ConfigError("chi_log_flat: n must be >= 1");
  const auto divs = divisors_up_to(n, n);
  const double nd = static_cast<double>(n);
  const double log_z = 2.0 * std::log(T_);
  std::vector<double> bps{x_ / T_, x_ / (T_ * T_)};
  for (std::uint64_t d : divs) {
    bps.push_back(nd / static_cast<double>(d) / std::numbers::e);
    bps.push_back(nd / static_cast<double>(d) * std::numbers::e);
  }
  QuadOptions opt;
  opt.tol = tol_;
  return quad_log_pieces(
      [&](double t) {
        const double w = 1.0 - psi_le_ratio(x_, t, log_z);
        if (w == 0.0) return 0.0;
        double s = 0;
        for (std::uint64_t d : divs) {
          const double m = nd / static_cast<double>(d);
          s += chi_(d) * (phi_t(t, m) - phi_t(T_, m));
        }
        return w * s * std::log(t);
      },
      T_, 100.0 * x_, bps, opt);
}

double ChiLogSharp::flat(std::uint64_t n) const { return chi_log(n, chi_) - evaluate(n); }

double Lambda_sharp(std::uint64_t n, const ChiLogSharp& sharp, double R) {
  return sharp.evaluate(n) * nu_direct(n, R);
}

}  // namespace siegel
