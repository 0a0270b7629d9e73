// SPDX-License-Identifier: Apache-2.0
#include "qbm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qbm/errors.hpp"

namespace qbm {

using std::numbers::pi;
namespace {
constexpr cd I{0.0, 1.0};

void require_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t", "must be finite and > 0");
}

// Composite Simpson on uniform samples; a 3/8 panel closes odd interval counts.
template <typename F>
cd simpson(std::size_t n_pts, double h, F f) {
  const std::size_t n = n_pts - 1;
  std::size_t even = (n % 2 == 0) ? n : n - 3;
  cd s{0.0, 0.0};
  if (even > 0) {
    s += f(0) + f(even);
    for (std::size_t i = 1; i < even; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i);
    s *= h / 3.0;
  }
  if (even != n) {
    const std::size_t j = even;
    s += 3.0 * h / 8.0 * (f(j) + 3.0 * f(j + 1) + 3.0 * f(j + 2) + f(j + 3));
  }
  return s;
}

// Running integral from 0 to each node, fourth order (cubic panels).
std::vector<cd> cumulative(const std::vector<cd>& f, double h) {
  const std::size_t n = f.size();
  std::vector<cd> out(n, 0.0);
  if (n == 3) {
    out[1] = h * (5.0 * f[0] + 8.0 * f[1] - f[2]) / 12.0;
    out[2] = h * (f[0] + 4.0 * f[1] + f[2]) / 3.0;
    return out;
  }
  for (std::size_t i = 1; i < n; ++i) {
    cd panel;
    if (i == 1)
      panel = 9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3];
    else if (i == n - 1)
      panel = f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1];
    else
      panel = -f[i - 2] + 13.0 * f[i - 1] + 13.0 * f[i] - f[i + 1];
    out[i] = out[i - 1] + h * panel / 24.0;
  }
  return out;
}
}  // namespace

ScaledValue exp_eval(std::span<const cd> exponents) {
  ScaledValue r;
  if (exponents.empty()) return r;
  double top = -std::numeric_limits<double>::infinity();
  for (const cd& e : exponents) top = std::max(top, e.real());
  if (!std::isfinite(top)) return r;
  r.log_scale = top;
  for (const cd& e : exponents) r.mantissa += std::exp(e - top);
  return r;
}

ScaledValue exp_eval(cd exponent) { return exp_eval(std::span<const cd>(&exponent, 1)); }

cd log_sin(cd w, double t) {
  if (w.imag() < 0.0) {
    const cd z = std::exp(-2.0 * I * w * t);
    return I * w * t + std::log(1.0 - z) - std::log(2.0 * I);
  }
  if (w.imag() > 0.0) {
    const cd z = std::exp(2.0 * I * w * t);
    return -I * w * t + std::log(1.0 - z) - std::log(-2.0 * I);
  }
  return std::log(std::sin(w * t));
}

cd cot_wt(cd w, double t) {
  if (w.imag() < 0.0) {
    const cd z = std::exp(-2.0 * I * w * t);
    return I * (1.0 + z) / (1.0 - z);
  }
  if (w.imag() > 0.0) {
    const cd z = std::exp(2.0 * I * w * t);
    return -I * (1.0 + z) / (1.0 - z);
  }
  return std::cos(w * t) / std::sin(w * t);
}

cd log_oscillator_prefactor(cd w, double t, const DerivedScales& s) {
  return 0.5 * (std::log(s.m) + std::log(w) - std::log(2.0 * pi * s.hbar) - I * (pi / 2.0) - log_sin(w, t));
}

// ---- J ----

JKernel make_j_kernel(double t, const DerivedScales& s) {
  require_time(t);
  return JKernel{t, s};
}

cd j_exponent(const JKernel& k, double xf, double yf, double x0, double y0) {
  require_time(k.t);
  const auto& s = k.scales;
  const double xif = xf - yf, xi0 = x0 - y0;
  const double dx = xf - x0, dy = yf - y0;
  return I * (s.m / (2.0 * s.hbar * k.t)) * (dx * dx - dy * dy) -
         (s.a_sq * k.t / 6.0) * (xif * xif + xif * xi0 + xi0 * xi0);
}

QuadExp<4> j_quadexp(const JKernel& k) {
  require_time(k.t);
  using V = QuadExp<4>::Vec;
  const auto& s = k.scales;
  const V xf = V::Unit(0), yf = V::Unit(1), x0 = V::Unit(2), y0 = V::Unit(3);
  const cd kin = I * (s.m / (2.0 * s.hbar * k.t));
  const double dec = s.a_sq * k.t / 6.0;
  QuadExp<4> f;
  f.add_square(kin, xf - x0);
  f.add_square(-kin, yf - y0);
  f.add_square(-dec, xf - yf);
  f.add_product(-dec, xf - yf, x0 - y0);
  f.add_square(-dec, x0 - y0);
  return f;
}

cd j_normalization(const JKernel& k) {
  const auto& s = k.scales;
  GaussianComponent g;
  g.L = s.m * s.alpha / s.hbar;
  const GaussianDensity ref = density_from_state(GaussianState{{g}}, s.hbar);
  GaussianDensity bare;
  const QuadExp<4> jq = j_quadexp(k);
  for (const auto& term : ref.terms)
    bare.terms.push_back(integrate_tail<2>(jq * embed<4, 2>(term, {2, 3}), "j_normalization"));
  return std::log(ref.trace()) - std::log(bare.trace());
}

double j_normalization_analytic(const JKernel& k) {
  return std::log(k.scales.m / (2.0 * pi * k.scales.hbar * k.t));
}

GaussianDensity apply_j(const GaussianDensity& rho0, const JKernel& k) {
  QuadExp<4> jq = j_quadexp(k);
  jq.c = j_normalization_analytic(k);
  GaussianDensity out;
  out.terms.reserve(rho0.terms.size());
  for (std::size_t i = 0; i < rho0.terms.size(); ++i)
    out.terms.push_back(
        integrate_tail<2>(jq * embed<4, 2>(rho0.terms[i], {2, 3}), "term[" + std::to_string(i) + "]"));
  return out;
}

GaussianDensity evolve_exact(const GaussianState& psi0, double t, const DerivedScales& s) {
  return apply_j(density_from_state(psi0, s.hbar), make_j_kernel(t, s));
}

// ---- K_xbar ----

double DrivingPath::at(double s) const {
  const double u = std::clamp(s / h(), 0.0, static_cast<double>(xbar.size() - 1));
  const std::size_t i = std::min(static_cast<std::size_t>(u), xbar.size() - 2);
  const double w = u - static_cast<double>(i);
  return (1.0 - w) * xbar[i] + w * xbar[i + 1];
}

KernelCoeffs kbar_coeffs_free(double t, const DerivedScales& s) {
  require_time(t);
  KernelCoeffs c;
  c.t = t;
  c.omega = s.omega;
  c.c1 = 0.5 * s.m * s.omega * cot_wt(s.omega, t);
  c.c2 = -s.m * s.omega * std::exp(-log_sin(s.omega, t));
  c.c3 = c.c4 = c.c5 = 0.0;
  return c;
}

KernelCoeffs kbar_coeffs(const DrivingPath& path, const DerivedScales& s) {
  require_time(path.t);
  if (path.xbar.size() < 3) throw DomainError("N", "Simpson quadrature needs at least 3 path samples");
  KernelCoeffs c = kbar_coeffs_free(path.t, s);
  const cd w = s.omega;
  const double t = path.t, h = path.h();
  const std::size_t n = path.xbar.size();
  const cd csc = std::exp(-log_sin(w, t));
  auto sv = [&](std::size_t i) { return h * static_cast<double>(i); };

  c.c3 = 2.0 * s.a_sq * csc * simpson(n, h, [&](std::size_t i) { return path.xbar[i] * std::sin(w * sv(i)); });
  c.c4 = 2.0 * s.a_sq * csc *
         simpson(n, h, [&](std::size_t i) { return path.xbar[i] * std::sin(w * (t - sv(i))); });

  // inner integral over s' < s, then the outer one
  std::vector<cd> inner(n);
  for (std::size_t i = 0; i < n; ++i) inner[i] = path.xbar[i] * std::sin(w * sv(i));
  const std::vector<cd> cum = cumulative(inner, h);
  const cd outer =
      simpson(n, h, [&](std::size_t i) { return path.xbar[i] * std::sin(w * (t - sv(i))) * cum[i]; });
  c.c5 = 4.0 * I * s.hbar * s.a_sq * s.a_sq / (s.m * w) * csc * outer;

  c.xbar_sq_integral = simpson(n, h, [&](std::size_t i) { return cd(path.xbar[i] * path.xbar[i]); }).real();
  return c;
}

GaussianKernel kbar_kernel(const KernelCoeffs& c, const DerivedScales& s) {
  using V = QuadExp<2>::Vec;
  GaussianKernel k;
  k.e.add_square(I * c.c1 / s.hbar, V::Unit(0));
  k.e.add_square(I * c.c1 / s.hbar, V::Unit(1));
  k.e.add_product(I * c.c2 / s.hbar, V::Unit(0), V::Unit(1));
  k.e.b << c.c3, c.c4;
  k.e.c = c.c5 - s.a_sq * c.xbar_sq_integral + log_oscillator_prefactor(c.omega, c.t, s);
  return k;
}

CoherentStateParams pq_from_c3(const KernelCoeffs& c, const DerivedScales& s) {
  return {s.hbar * (c.c3.real() + c.c3.imag()), s.hbar / (s.m * s.alpha) * c.c3.real()};
}

// ---- Wigner kernel ----

double WignerKernel::log_norm() const { return 0.5 * std::log(discriminant()) - std::log(pi); }

double WignerKernel::exponent(double p, double q, double p0, double q0) const {
  const double dp = p - p0;
  const double v = q - q0 - p0 * t / m;
  return -mu * dp * dp - nu * v * v + sig * dp * v;
}

WignerKernel wigner_kernel(double t, const DerivedScales& s) {
  require_time(t);
  if (!(s.D > 0.0)) throw DomainError("D", "Wigner kernel needs a positive diffusion constant");
  WignerKernel k;
  k.t = t;
  k.D = s.D;
  k.m = s.m;
  k.mu = 1.0 / (s.D * t);
  k.nu = 3.0 * s.m * s.m / (s.D * t * t * t);
  k.sig = 3.0 * s.m / (s.D * t * t);
  return k;
}

QuadExp<4> wigner_kernel_quadexp(const WignerKernel& k) {
  using V = QuadExp<4>::Vec;
  const V p = V::Unit(0), q = V::Unit(1), p0 = V::Unit(2), q0 = V::Unit(3);
  const V dp = p - p0;
  const V v = q - q0 - (k.t / k.m) * p0;
  QuadExp<4> f;
  f.add_square(-k.mu, dp);
  f.add_square(-k.nu, v);
  f.add_product(k.sig, dp, v);
  f.c = k.log_norm();
  return f;
}

// ---- f-kernel ----

namespace {
// Re coefficient of -xi^2 in the exact exponent, in units of m alpha / hbar.
double xi_curvature(double u) {
  const double r = 1.0 - 1.0 / u;
  return (2.0 / 3.0) * u - 0.25 * (1.0 + r * r);
}
}  // namespace

double f_kernel_min_alpha_t() {
  static const double root = [] {
    double lo = 0.1, hi = 5.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (xi_curvature(mid) > 0.0 ? hi : lo) = mid;
    }
    return hi;
  }();
  return root;
}

void check_f_kernel_domain(double t, const DerivedScales& s) {
  require_time(t);
  const double u = s.alpha * t;
  if (!(xi_curvature(u) > 0.0))
    throw DivergentIntegral("alpha_t", "xi integral of the f-kernel diverges at alpha t = " + std::to_string(u) +
                                           "; minimal admissible alpha t is " +
                                           std::to_string(f_kernel_min_alpha_t()));
}

QuadExp<5> f_kernel_integrand(double t, const DerivedScales& s, FKernelForm form) {
  check_f_kernel_domain(t, s);
  using V = QuadExp<5>::Vec;
  const V p = V::Unit(0), q = V::Unit(1), x0 = V::Unit(2), y0 = V::Unit(3), xi = V::Unit(4);
  const V xi0 = x0 - y0;
  const V X0 = 0.5 * (x0 + y0);
  const double u = s.alpha * t;
  const double dec = 2.0 * s.m * s.alpha * s.alpha * t / (3.0 * s.hbar);

  QuadExp<5> f;
  f.add_product(-I / s.hbar, p, xi);
  f.add_product(I * s.m / (s.hbar * t), q - X0, xi - xi0);
  f.add_square(-dec, xi);
  f.add_product(-dec, xi, xi0);
  f.add_square(-dec, xi0);
  if (form == FKernelForm::Exact) {
    const double w = s.m * s.alpha / (4.0 * s.hbar);
    f.add_square(w, xi);
    f.add_square(w, (1.0 - 1.0 / u) * xi + (1.0 / u) * xi0);
  }
  f.c = std::log(s.m / (4.0 * pi * pi * s.hbar * s.hbar * t));
  return f;
}

QuadExp<4> f_kernel_quadexp(double t, const DerivedScales& s, FKernelForm form) {
  return integrate_tail<1>(f_kernel_integrand(t, s, form), "alpha_t");
}

cd f_kernel(double p, double q, double x0, double y0, double t, const DerivedScales& s, FKernelForm form) {
  return f_kernel_quadexp(t, s, form).value(Eigen::Vector4d(p, q, x0, y0));
}

}  // namespace qbm
