// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "qbm/gaussian.hpp"
#include "qbm/grid.hpp"
#include "qbm/kernels.hpp"
#include "qbm/mixture.hpp"
#include "qbm/model.hpp"

namespace qbm {

// ---- grid sizing ---------------------------------------------------------------

// Wigner moments of the exactly evolved state at time t (t = 0 allowed).
PhaseMoments state_moments(const GaussianState& psi0, double t, const DerivedScales& s);

// Position axis covering mean_q +- nsig sd_q, fine enough that momenta up to
// |mean_p| + nsig sd_p are resolved (twice as fine when the grid will be
// Wigner transformed, since that samples xi at 2h).
Axis density_axis(const PhaseMoments& w, double hbar, double nsig = 6.0, bool for_wigner = false);

struct PhaseBox {
  Axis p;
  Axis q;
};
PhaseBox phase_box(const PhaseMoments& w, int np, int nq, double nsig = 6.0);

// ---- density matrices ------------------------------------------------------------

// Trapezoid quadrature against J on the grid of rho0, in rotated
// coordinates (O(n^3)); renormalized to unit trace. Emits "boundary_leak"
// and "aliasing" warnings.
DensityGrid evolve_density(const DensityGrid& rho0, double t, const DerivedScales& s);
// Exact calculus, sampled on x.
DensityGrid evolve_density(const GaussianState& psi0, double t, const DerivedScales& s, const Axis& x);

// ---- Wigner and Husimi ---------------------------------------------------------------

// Momentum axis conjugate to the xi step 2h: the p marginal is then exact.
Axis wigner_momentum_axis(const Axis& x, double hbar);

// q runs over every q_stride-th x node. Throws DomainError on non-Hermitian
// input and on an imaginary residue above 1e-8 of the peak.
PhaseGrid wigner_transform(const DensityGrid& rho, double hbar, int q_stride = 1);
PhaseGrid wigner_transform(const DensityGrid& rho, double hbar, const Axis& p, int q_stride = 1);
// Same transform with rho evaluated in closed form at the xi nodes; xi_step
// 0 picks one from the p axis.
PhaseGrid wigner_transform(const GaussianDensity& rho, const Axis& p, const Axis& q, double hbar,
                           double xi_step = 0.0);

// Normalized Gaussian smoothing, widths sigma_q in q and hbar/(2 sigma_q) in p.
PhaseGrid husimi_from_wigner(const PhaseGrid& w, double sigma_q, double hbar);

// Convolution with the Wigner kernel. Output axes must share the input
// steps and the q axis must be aligned with the input q nodes. Kernels
// narrower than a grid step are integrated against the piecewise-linear
// interpolant of w0 instead of sampled.
PhaseGrid evolve_wigner(const PhaseGrid& w0, double t, const DerivedScales& s);
PhaseGrid evolve_wigner(const PhaseGrid& w0, double t, const DerivedScales& s, const Axis& p_out,
                        const Axis& q_out);

// ---- positivity -------------------------------------------------------------------

struct PositivityPoint {
  double t = 0.0;
  double min_w = 0.0;
  double max_w = 0.0;
};

struct PositivityReport {
  std::vector<PositivityPoint> scan;
  double eps_rel = 1e-6;
  std::optional<double> t_first;    // scanned t from which every point has min >= -eps_rel max
  std::optional<double> t_crossing; // bisection-refined crossing, if bracketed
  double t_bound_published = 0.0;       // (sqrt(3)/2)^(1/2) (hbar / gamma kT)^(1/2)
  double t_bound_rederived = 0.0;   // (sqrt(3)/4)^(1/2) (hbar / gamma kT)^(1/2)
};

double positivity_coefficient_published();
double positivity_coefficient_rederived();

PositivityReport positivity_scan(const PhaseGrid& w0, std::span<const double> t_list, const DerivedScales& s);
// Exact propagation of a mixture, sampled on (p, q) at each time.
PositivityReport positivity_scan(const PhaseMixture& w0, const Axis& p, const Axis& q,
                                 std::span<const double> t_list, const DerivedScales& s,
                                 bool refine = true);

// ---- f distribution -----------------------------------------------------------------

struct FDistribution {
  PhaseGrid f;
  // max |f_inversion - f| / max |f| over the check points; NaN if the
  // inversion route was not available.
  double route_deviation = std::numeric_limits<double>::quiet_NaN();
  int route_points = 0;
};

// Closed-form folding of the f kernel, sampled on (p, q) in `frame`; the
// inversion route is evaluated on a check_points x check_points sublattice.
FDistribution f_distribution(const GaussianState& psi0, const Axis& p, const Axis& q, double t,
                             const DerivedScales& s, const Frame& frame = {}, int check_points = 8,
                             FKernelForm form = FKernelForm::Exact);
// Grid quadrature of the f kernel against rho0: the kernel is J with a
// modified xi quadratic form, so this is a rotated-coordinate propagation
// followed by the Wigner transform. Normalized.
FDistribution f_distribution(const DensityGrid& rho0, double t, const DerivedScales& s, int q_stride = 1,
                             FKernelForm form = FKernelForm::Exact);

}  // namespace qbm
