#include "siegel/smoothing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <vector>

#include "siegel/error.hpp"
#include "siegel/summation.hpp"

namespace siegel {

namespace {

double raw_phi(double u) {
  const double s = 1.0 - u * u;
  return s > 0 ? std::exp(-1.0 / s) : 0.0;
}

struct Panel {
  double a, b, fa, fm, fb, whole;
};

double simpson_rec(const std::function<double(double)>& h, const Panel& p, double tol, int depth) {
  const double m = 0.5 * (p.a + p.b);
  const double lm = 0.5 * (p.a + m);
  const double rm = 0.5 * (m + p.b);
  const double flm = h(lm);
  const double frm = h(rm);
  const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double delta = left + right - p.whole;
  const double scale = std::fabs(left) + std::fabs(right);
  if (std::fabs(delta) <= 15.0 * tol ||
      std::fabs(delta) <= 64.0 * std::numeric_limits<double>::epsilon() * scale) {
    return left + right + delta / 15.0;
  }
  if (depth <= 0 || !(m > p.a && m < p.b)) {
    throw ComputationError("max-refinement-exceeded in adaptive quadrature");
  }
  return simpson_rec(h, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1) +
         simpson_rec(h, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1);
}

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
struct GaussLegendre {
  std::vector<double> x, w;

  explicit GaussLegendre(int n) : x(n), w(n) {
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::fabs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre& gl20() {
  static const GaussLegendre rule(20);
  return rule;
}

// Composite Gauss-Legendre nodes/weights on [a, b].
void composite_nodes(double a, double b, int panels, std::vector<double>& nodes,
                     std::vector<double>& weights) {
  const auto& rule = gl20();
  const double width = (b - a) / panels;
  nodes.clear();
  weights.clear();
  for (int k = 0; k < panels; ++k) {
    const double c = a + (k + 0.5) * width;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      nodes.push_back(c + 0.5 * width * rule.x[i]);
      weights.push_back(0.5 * width * rule.w[i]);
    }
  }
}

struct PsiFourierTable {
  std::vector<double> u, weight;  // weight = w_i e^{u_i} psi(u_i) / (2 pi)

  PsiFourierTable() {
    std::vector<double> w;
    composite_nodes(-1.0, 1.0, 400, u, w);
    weight.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      weight[i] = w[i] * std::exp(u[i]) * psi(u[i]) / (2.0 * std::numbers::pi);
    }
  }
};

const PsiFourierTable& psi_fourier_table() {
  static const PsiFourierTable table;
  return table;
}

}  // namespace

double bump_g(double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; }

double psi(double u) {
  const double a = std::fabs(u);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  const double g1 = bump_g(1.0 - a);
  const double g2 = bump_g(a - 0.5);
  return g1 / (g1 + g2);
}

double psi_derivative(double u) {
  const double a = std::fabs(u);
  if (a <= 0.5 || a >= 1.0) return 0.0;
  // d/da of g1/(g1+g2) with g1 = g(1-a), g2 = g(a-1/2), g'(s) = g(s)/s^2
  const double s1 = 1.0 - a, s2 = a - 0.5;
  const double g1 = bump_g(s1), g2 = bump_g(s2);
  const double dg1 = -g1 / (s1 * s1);
  const double dg2 = g2 / (s2 * s2);
  const double denom = g1 + g2;
  const double d = (dg1 * denom - g1 * (dg1 + dg2)) / (denom * denom);
  return u < 0 ? -d : d;
}

double phi_normalization() {
  static const double c = [] {
    QuadOptions opt;
    opt.tol = 1e-16;
    opt.initial_panels = 64;
    opt.max_depth = 40;
    return 1.0 / adaptive_simpson(raw_phi, -1.0, 1.0, opt);
  }();
  return c;
}

double phi(double u) { return phi_normalization() * raw_phi(u); }

double psi_le(double z, double n) { return psi(std::log(n) / std::log(z)); }

double psi_gt(double z, double n) { return 1.0 - psi_le(z, n); }

double phi_t(double t, double n) { return phi(std::log(n / t)); }

double adaptive_simpson(const std::function<double(double)>& h, double a, double b,
                        const QuadOptions& opt) {
  if (!(b > a)) return 0.0;
  const int panels = std::max(1, opt.initial_panels);
  const double width = (b - a) / panels;
  CompensatedSum total;
  double fa = h(a);
  for (int k = 0; k < panels; ++k) {
    const double pa = a + k * width;
    const double pb = (k + 1 == panels) ? b : a + (k + 1) * width;
    const double pm = 0.5 * (pa + pb);
    const double fm = h(pm);
    const double fb = h(pb);
    const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    total.add(simpson_rec(h, {pa, pb, fa, fm, fb, whole}, opt.tol / panels, opt.max_depth));
    fa = fb;
  }
  return total.value();
}

double quad_log(const std::function<double(double)>& f, double a, double b,
                const QuadOptions& opt) {
  if (!(a > 0) || !(b > a)) throw ConfigError("quad_log: need 0 < a < b");
  return adaptive_simpson([&](double u) { return f(std::exp(u)); }, std::log(a), std::log(b), opt);
}

double quad_log_pieces(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, const QuadOptions& opt) {
  if (!(a > 0)) throw ConfigError("quad_log: need 0 < a");
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{std::log(a)};
  for (double t : breakpoints) {
    if (t > a && t < b) cuts.push_back(std::log(t));
  }
  cuts.push_back(std::log(b));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double span_u = cuts.back() - cuts.front();
  auto h = [&](double u) { return f(std::exp(u)); };
  CompensatedSum total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    QuadOptions piece = opt;
    piece.tol = opt.tol * (cuts[i + 1] - cuts[i]) / span_u;
    total.add(adaptive_simpson(h, cuts[i], cuts[i + 1], piece));
  }
  return total.value();
}

double log_identity_residual(std::uint64_t n, double quad_tol) {
  if (n < 1) throw ConfigError("log_identity_residual: n must be >= 1");
  const double nd = static_cast<double>(n);
  const double logn = std::log(nd);
  QuadOptions opt;
  opt.tol = quad_tol;
  const double value = quad_log([&](double t) { return phi_t(t, nd) * std::log(t); },
                                nd / std::numbers::e, nd * std::numbers::e, opt);
  return std::fabs(value - logn);
}

std::complex<double> psi_fourier(double t) {
  const auto& tab = psi_fourier_table();
  double re = 0, im = 0;
  for (std::size_t i = 0; i < tab.u.size(); ++i) {
    re += tab.weight[i] * std::cos(t * tab.u[i]);
    im += tab.weight[i] * std::sin(t * tab.u[i]);
  }
  return {re, im};
}

FourierChecks fourier_checks(double t_max) {
  std::vector<double> nodes, weights;
  composite_nodes(-t_max, t_max, static_cast<int>(std::ceil(t_max)), nodes, weights);
  CompensatedSum mass_re, mom_re, mom_im;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::complex<double> f = psi_fourier(nodes[i]);
    const std::complex<double> g = std::complex<double>(1.0, nodes[i]) * f;
    mass_re.add(weights[i] * f.real());
    mom_re.add(weights[i] * g.real());
    mom_im.add(weights[i] * g.imag());
  }
  return {mass_re.value(), mom_re.value(), mom_im.value(), t_max};
}

std::string cutoff_fingerprint() {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](double v) {
    const auto q = static_cast<std::int64_t>(std::llround(v * 1e12));
    for (int i = 0; i < 8; ++i) {
      h ^= static_cast<std::uint64_t>(q >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (int i = 0; i <= 1000; ++i) {
    const double u = -1.2 + 2.4 * i / 1000.0;
    mix(psi(u));
    mix(phi(u));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace siegel
