// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qbm/model.hpp"
#include "qbm/quadexp.hpp"

namespace qbm {

// psi(x) = A exp(-(L/2)(x - q0)^2 + i p0 x / hbar)
struct GaussianComponent {
  cd A{1.0, 0.0};
  double q0 = 0.0;
  cd L{1.0, 0.0};
  double p0 = 0.0;
};

struct GaussianState {
  std::vector<GaussianComponent> components;
};

struct CoherentStateParams {
  double p = 0.0;
  double q = 0.0;
};

QuadExp<1> to_quadexp(const GaussianComponent& g, double hbar);
// Inverse of to_quadexp. Throws DomainError if Re(2a) <= 0.
GaussianComponent from_quadexp(const QuadExp<1>& f, double hbar, const std::string& what = "component");

cd evaluate(const GaussianState& s, double x, double hbar);

// Width (m alpha / hbar)(1 - i), unit norm.
cd coherent_width(const DerivedScales& s);
GaussianComponent coherent_state(const CoherentStateParams& pq, const DerivedScales& s);

// <a|b> = integral of conj(a) b.
cd overlap(const GaussianComponent& a, const GaussianComponent& b, double hbar);
double norm_squared(const GaussianState& s, double hbar);
GaussianState normalized(GaussianState s, double hbar);

// Position moments of |psi|^2 and momentum moments of the state.
struct StateMoments {
  double mean_x = 0, mean_p = 0, var_x = 0, var_p = 0;
};
StateMoments moments(const GaussianState& s, double hbar);

// Two equal-width packets at +-ell/2 with real width `width` (Lambda),
// equal amplitudes, normalized.
GaussianState cat_state(double ell, double width, double hbar, double p0 = 0.0);

// Kernel K(x_f, x_0) = exp(QuadExp<2> in (x_f, x_0)).
struct GaussianKernel {
  QuadExp<2> e;
};

GaussianKernel free_propagator(double t, const DerivedScales& s);
// Closed-system propagator for a harmonic potential with complex frequency w,
// prefactor on the branch continuous from t = 0+.
GaussianKernel oscillator_propagator(cd w, double t, const DerivedScales& s);

// Exact: every component maps to one component.
GaussianState apply_gaussian_kernel(const GaussianState& state, const GaussianKernel& k, double hbar);

// rho(x, y) = sum_jk psi_j(x) conj(psi_k(y)), each term a QuadExp<2> in (x, y).
struct GaussianDensity {
  std::vector<QuadExp<2>> terms;

  cd operator()(double x, double y) const;
  cd trace() const;
  double purity() const;  // Tr rho^2 / (Tr rho)^2
  GaussianDensity& scale(cd factor);
  GaussianDensity& normalize();
};

// Wigner transform of one density term, result in (p, q), and its inverse.
QuadExp<2> wigner_term(const QuadExp<2>& rho_xy, double hbar);
QuadExp<2> density_term(const QuadExp<2>& w_pq, double hbar);

GaussianDensity density_from_state(const GaussianState& s, double hbar);
GaussianDensity operator+(GaussianDensity a, const GaussianDensity& b);

}  // namespace qbm
