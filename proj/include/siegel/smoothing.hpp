#pragma once

// Fixed smooth cutoffs and the log-space quadrature used for every
// t-integral.
//
//   psi(u): 1 on |u| <= 1/2, 0 on |u| >= 1, and on the band
//           g(1-|u|) / (g(1-|u|) + g(|u|-1/2)) with g(s) = exp(-1/s).
//   phi(u): c exp(-1/(1-u^2)) on (-1, 1), c chosen so that phi has mass one.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

namespace siegel {

double bump_g(double s);

double psi(double u);
double psi_derivative(double u);

double phi(double u);

// Normalizing constant of phi, computed once by quadrature.
double phi_normalization();

// psi(log_z n) and 1 - psi(log_z n).
double psi_le(double z, double n);
double psi_gt(double z, double n);

// Phi_t(n) = phi(log(n / t)), supported on n in [t/e, e t].
double phi_t(double t, double n);

inline constexpr double kDefaultQuadTol = 1e-9;

struct QuadOptions {
  double tol = kDefaultQuadTol;
  int max_depth = 48;
  int initial_panels = 8;
};

// Adaptive Simpson of h(u) over [a, b] with Richardson-corrected panels.
// Throws ComputationError("max-refinement-exceeded") on failure.
double adaptive_simpson(const std::function<double(double)>& h, double a, double b,
                        const QuadOptions& opt = {});

// int_a^b f(t) dt / t, integrated in u = log t.
double quad_log(const std::function<double(double)>& f, double a, double b,
                const QuadOptions& opt = {});

// Same, with the range pre-split at the given t-breakpoints (those outside
// (a, b) are ignored). Integrands with kinks or support edges should pass
// them here.
double quad_log_pieces(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, const QuadOptions& opt = {});

// | int Phi_t(n) log t dt/t - log n |, integrated over t in [n/e, n e].
double log_identity_residual(std::uint64_t n, double quad_tol = kDefaultQuadTol);

// Fourier transform f(t) = (1/2pi) int e^{(1+it)u} psi(u) du.
std::complex<double> psi_fourier(double t);

struct FourierChecks {
  double mass = 0;            // int f(t) dt, should equal psi(0) = 1
  double first_moment_re = 0; // Re int (1+it) f(t) dt, should equal -psi'(0) = 0
  double first_moment_im = 0;
  double cutoff = 0;          // |t| range used
};

FourierChecks fourier_checks(double t_max = 400.0);

// Hash of psi and phi sampled on a fixed grid; identifies the cutoff choice
// in every report.
std::string cutoff_fingerprint();

}  // namespace siegel
