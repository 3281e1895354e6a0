#pragma once

// The Siegel-model and Type I approximants to lambda and Lambda.
//
//   lambda_S      completely multiplicative: lambda(p) for p <= R, chi(p) for p > R
//   lambda_sharp  sum_{d | n} b_d chi(n/d), b_d = (lambda * mu chi)_(<=R)(d) psi_{<=D}(d)
//   Lambda_S      (chi * log) nu
//   Lambda_sharp  (chi * log)^sharp nu, with the t-integral split at T = D q^2

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "siegel/arith_tables.hpp"
#include "siegel/quad_char.hpp"
#include "siegel/type_one.hpp"

namespace siegel {

enum class Provenance { formula, override_, clamped };

std::string to_string(Provenance p);

struct Scale {
  double value = 0;
  Provenance provenance = Provenance::formula;
};

struct SiegelParams {
  std::uint64_t x = 0;
  int k = 0;
  int ell = 0;
  double eps0 = 0.5;
  QualityProxy eta;
  Scale R, D, R0;
};

struct ScaleOverrides {
  std::optional<double> R, D, R0;
};

// Scales from their defining formulas, then overrides, then clamping to
// 2 <= R <= x, 2 <= D <= x, 2 <= R0 <= R. The D exponent uses max(1, k + ell).
SiegelParams make_params(std::uint64_t x, int k, int ell, double eps0, const QualityProxy& eta,
                         const ScaleOverrides& overrides = {});

int lambda_siegel(std::uint64_t n, double R, const QuadChar& chi);
int lambda_siegel(std::span<const PrimePower> f, double R, const QuadChar& chi);

// True iff n has no exceptional prime factor p > R.
bool lambda_agreement_predicate(std::uint64_t n, double R, const QuadChar& chi);

inline constexpr std::uint64_t kDefaultTypeIBound = 10'000'000;

// Throws ConfigError("D-too-large") when D exceeds bound.
TypeICoeffs lambda_sharp_coeffs(double R, double D, const QuadChar& chi,
                                std::uint64_t bound = kDefaultTypeIBound);

double lambda_sharp(std::uint64_t n, const TypeICoeffs& b, const QuadChar& chi);
double lambda_flat(std::uint64_t n, const TypeICoeffs& b, double R, const QuadChar& chi);

// sum_{d | n} (lambda * mu chi)_(<=R)(d) psi_{>D}(d) chi(n/d), by direct
// convolution.
double lambda_flat_convolution(std::uint64_t n, double R, double D, const QuadChar& chi);

double chi_log(std::uint64_t n, const QuadChar& chi);
double chi_log(std::uint64_t n, std::span<const PrimePower> f, const QuadChar& chi);

double Lambda_siegel(std::uint64_t n, double R, const QuadChar& chi);

// (chi * log)^sharp and its coefficient form
//   sum_{d | n} (Psi(n/d) chi(d) + c_d chi(n/d)).
class ChiLogSharp {
 public:
  ChiLogSharp(const SiegelParams& params, const QuadChar& chi, double quad_tol = 0);

  double T() const { return T_; }
  double x() const { return x_; }
  double quad_tol() const { return tol_; }

  // Middle window [T, x/T^2] is empty (T^3 >= x).
  bool middle_window_empty() const { return T_ * T_ * T_ >= x_; }
  // (chi * log)^sharp = chi * log for every n <= 2x.
  bool degenerate() const { return T_ >= x_; }

  double Psi(double y) const;
  double c(std::uint64_t d) const;
  double K() const { return K_; }

  // Fills the c_d and Psi(m) tables up to n. window fills them on demand,
  // which is not thread-safe; call prepare first when sharing.
  void prepare(std::uint64_t n) const;

  // Coefficient-form evaluation. Uses the tables when they reach n and
  // computes the needed coefficients directly otherwise.
  double evaluate(std::uint64_t n) const;
  // Same over [lo, hi], by scattering over multiples.
  std::vector<double> window(std::uint64_t lo, std::uint64_t hi) const;

  // Three-integral form evaluated by quadrature with the divisor sums inside
  // the integrand; an independent route used as the test oracle.
  double evaluate_by_quadrature(std::uint64_t n) const;

  // (chi * log)^flat by quadrature of its defining integral.
  double flat_by_quadrature(std::uint64_t n) const;

  double flat(std::uint64_t n) const;

 private:
  double I1(double d) const;

  QuadChar chi_;
  double x_;
  double T_;
  double tol_;
  double K_ = 0;
  mutable std::vector<double> c_table_, psi_table_;
};

double Lambda_sharp(std::uint64_t n, const ChiLogSharp& sharp, double R);

}  // namespace siegel
