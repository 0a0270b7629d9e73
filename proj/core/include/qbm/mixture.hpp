// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qbm/gaussian.hpp"
#include "qbm/grid.hpp"
#include "qbm/kernels.hpp"
#include "qbm/model.hpp"
#include "qbm/quadexp.hpp"

namespace qbm {

// Real phase-space function written as the real part of a sum of complex
// Gaussians in (p, q). Wigner functions of Gaussian-mixture states, their
// exact propagation and the closed-form f distribution all live here.
struct PhaseMixture {
  std::vector<QuadExp<2>> terms;

  double operator()(double p, double q) const;
  double integral() const;
};

struct PhaseMoments {
  double mass = 0.0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();  // (p, q)
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};
PhaseMoments moments(const PhaseMixture& w);

PhaseGrid sample(const PhaseMixture& w, const Axis& p, const Axis& q);

PhaseMixture wigner_mixture(const GaussianDensity& rho, double hbar);
GaussianDensity density_mixture(const PhaseMixture& w, double hbar);

// Exact Wigner-kernel propagation. D = 0 reduces to free streaming.
PhaseMixture propagate(const PhaseMixture& w0, double t, const DerivedScales& s);
// Convolution with a normalized Gaussian of covariance `cov` in (p, q).
PhaseMixture smooth(const PhaseMixture& w, const Eigen::Matrix2d& cov);
// Husimi smoothing: widths sigma_q in q and hbar / (2 sigma_q) in p.
Eigen::Matrix2d husimi_covariance(double sigma_q, double hbar);

// f(p, q, t) folded in closed form against rho0.
PhaseMixture f_mixture(const GaussianDensity& rho0, double t, const DerivedScales& s,
                       FKernelForm form = FKernelForm::Exact);

// The same f reached from rho_t by the inversion formula: X is continued to
// q + iY and the Y integral done in closed form, leaving a quadratic form in
// (p, q, xi) per density term. Only the xi integral is done numerically.
std::vector<QuadExp<3>> inversion_integrand(const GaussianDensity& rho_t, const DerivedScales& s);
double inversion_value(const std::vector<QuadExp<3>>& integrand, double p, double q);

// Wigner covariance of the pure Gaussian with width Lambda, and back.
Eigen::Matrix2d coherent_covariance(cd Lambda, double hbar);
cd width_from_covariance(const Eigen::Matrix2d& cov, double hbar);

// Linear symplectic change of phase-space frame, v' = S (v - center).
// Frames are implemented by metaplectic unitaries, so trace distances and
// sup norms are the same in every frame.
struct Frame {
  Eigen::Matrix2d S = Eigen::Matrix2d::Identity();
  Eigen::Vector2d center = Eigen::Vector2d::Zero();

  Eigen::Vector2d to_frame(const Eigen::Vector2d& v) const { return S * (v - center); }
  Eigen::Vector2d from_frame(const Eigen::Vector2d& v) const { return S.inverse() * v + center; }
};

PhaseMixture transform(const PhaseMixture& w, const Frame& f);
GaussianDensity transform(const GaussianDensity& rho, const Frame& f, double hbar);
cd transform_width(cd Lambda, const Frame& f, double hbar);

// Frame in which the coherent state of width Lambda becomes the real-width
// packet Lambda' = m alpha / hbar and the covariance of `w` is diagonal with
// its long axis along q. Keeps both the state and the projector family
// compact on a grid.
Frame compact_frame(const PhaseMoments& w, cd Lambda, const DerivedScales& s);

}  // namespace qbm
