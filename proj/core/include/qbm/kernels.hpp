// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qbm/gaussian.hpp"
#include "qbm/model.hpp"
#include "qbm/quadexp.hpp"

namespace qbm {

// ---- stable exponentials ---------------------------------------------------

// value = mantissa * exp(log_scale); the largest real part is factored out.
struct ScaledValue {
  cd mantissa{0.0, 0.0};
  double log_scale = 0.0;
  cd value() const { return mantissa * std::exp(log_scale); }
};
ScaledValue exp_eval(std::span<const cd> exponents);
ScaledValue exp_eval(cd exponent);

// ---- complex-frequency helpers ----------------------------------------------

// log sin(w t) on the branch continuous from t = 0+ (where it is log(w t)).
cd log_sin(cd w, double t);
cd cot_wt(cd w, double t);
// log sqrt(m w / (2 pi i hbar sin w t)), same branch convention.
cd log_oscillator_prefactor(cd w, double t, const DerivedScales& s);

// ---- density-matrix propagator J ----------------------------------------------

struct JKernel {
  double t = 1.0;
  DerivedScales scales;
};

JKernel make_j_kernel(double t, const DerivedScales& s);
// (i m / 2 hbar t)[(xf-x0)^2 - (yf-y0)^2] - (a^2 t/6)[xif^2 + xif xi0 + xi0^2]
cd j_exponent(const JKernel& k, double xf, double yf, double x0, double y0);
// Same exponent as a quadratic form in (xf, yf, x0, y0), no prefactor.
QuadExp<4> j_quadexp(const JKernel& k);
// Log of the prefactor that makes J trace preserving, obtained by propagating
// a reference Gaussian with the bare exponent and restoring its trace.
cd j_normalization(const JKernel& k);
// Closed form of the same constant, log(m / (2 pi hbar t)).
double j_normalization_analytic(const JKernel& k);

// Exact propagation of a sum-of-Gaussians density.
GaussianDensity apply_j(const GaussianDensity& rho0, const JKernel& k);
GaussianDensity evolve_exact(const GaussianState& psi0, double t, const DerivedScales& s);

// ---- driven complex oscillator K_xbar ------------------------------------------

struct DrivingPath {
  double t = 1.0;
  std::vector<double> xbar;  // samples at s_i = i t / (N - 1)

  double h() const { return t / static_cast<double>(xbar.size() - 1); }
  double at(double s) const;  // piecewise-linear interpolant
};

struct KernelCoeffs {
  cd c1, c2, c3, c4, c5;
  cd omega;
  double t = 0.0;
  double xbar_sq_integral = 0.0;  // int_0^t xbar^2
};

KernelCoeffs kbar_coeffs(const DrivingPath& path, const DerivedScales& s);
// Closed-form c1, c2 only (x-bar independent).
KernelCoeffs kbar_coeffs_free(double t, const DerivedScales& s);
GaussianKernel kbar_kernel(const KernelCoeffs& c, const DerivedScales& s);
CoherentStateParams pq_from_c3(const KernelCoeffs& c, const DerivedScales& s);

// ---- Wigner-function propagator -------------------------------------------------

struct WignerKernel {
  double t = 1.0;
  double mu = 0.0, nu = 0.0, sig = 0.0;
  double D = 0.0;
  double m = 1.0;

  double discriminant() const { return mu * nu - 0.25 * sig * sig; }
  // log of sqrt(discriminant)/pi, the normalization over (p, q)
  double log_norm() const;
  // exponent at (p, q) from source (p0, q0), without normalization
  double exponent(double p, double q, double p0, double q0) const;
};

WignerKernel wigner_kernel(double t, const DerivedScales& s);
// Normalized kernel as a quadratic form in (p, q, p0, q0).
QuadExp<4> wigner_kernel_quadexp(const WignerKernel& k);

// ---- f-kernel ---------------------------------------------------------------------

enum class FKernelForm { Exact, Approximate };

// Smallest alpha t for which the xi integral of the exact kernel converges.
double f_kernel_min_alpha_t();
// Throws DivergentIntegral (field "alpha_t") below the bound.
void check_f_kernel_domain(double t, const DerivedScales& s);

// f(p, q, t | x0, y0) as a quadratic form in (p, q, x0, y0, xi), normalized so
// that folding against a unit-trace rho0 integrates to one over phase space.
QuadExp<5> f_kernel_integrand(double t, const DerivedScales& s, FKernelForm form);
// xi integrated in closed form: quadratic form in (p, q, x0, y0).
QuadExp<4> f_kernel_quadexp(double t, const DerivedScales& s, FKernelForm form);
cd f_kernel(double p, double q, double x0, double y0, double t, const DerivedScales& s,
            FKernelForm form = FKernelForm::Exact);

}  // namespace qbm
