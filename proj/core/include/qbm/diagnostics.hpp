// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qbm/gaussian.hpp"
#include "qbm/grid.hpp"
#include "qbm/model.hpp"

namespace qbm {

struct ResidualReport {
  std::string op;
  double t = 0.0;
  double l2_residual = 0.0;  // || d/dt - rhs || over the interior
  double rhs_norm = 0.0;
  double dt_norm = 0.0;
  double relative = 0.0;  // l2_residual / dt_norm (inf for a static input)
  double ht = 0.0;
  double hx = 0.0;        // x step, or q step for phase grids
  double hp = 0.0;        // p step; 0 for density grids
  int time_order = 2;
  int space_order = 4;
  // f equation only: || cross + q-diffusion terms || / || D d^2/dp^2 term ||
  std::optional<double> extra_term_fraction;
};

// (rho(t - ht), rho(t), rho(t + ht)) against
//   d rho/dt = (i hbar / 2m)(rho_xx - rho_yy) - (a^2 / 2)(x - y)^2 rho,
// central difference in t, five-point stencils in x and y, two-node border
// excluded.
ResidualReport master_residual(const std::array<DensityGrid, 3>& series, double t, double ht, const DerivedScales& s);

enum class FpEquation { W, F };

// W: dW/dt = -(p/m) dW/dq + D d^2W/dp^2.
// F: adds c_pq d^2f/dpdq + (hbar/2m) d^2f/dq^2, with c_pq = fp_cross_coefficient(s).
ResidualReport fokker_planck_residual(const std::array<PhaseGrid, 3>& series, double t, double ht, FpEquation which,
                                      const DerivedScales& s);

// Cross-diffusion coefficient of the f equation for the coherent family of
// width (m alpha / hbar)(1 - i): hbar alpha.
double fp_cross_coefficient(const DerivedScales& s);

struct DecoherenceFit {
  double ell = 0.0;
  double rate = 0.0;            // 1 / time, fitted
  double constant = 0.0;        // rate / (a^2 ell^2)
  double predicted_rate = 0.0;  // from the frozen-position J exponent
  double t_window = 0.0;
  std::vector<double> t;
  std::vector<double> log_coherence;
};

// Normalized coherence |rho(x, y)| / sqrt(rho(x, x) rho(y, y)) at
// (x, y) = (q1, q2) of the first two packets, evolved exactly; least-squares
// slope of its log over t_list. An empty t_list uses 9 points over the
// early window [0, 2 hbar^2 / (ell^2 m gamma kT)]. Throws DomainError for
// a single-component state.
DecoherenceFit decoherence_rate(const GaussianState& cat, std::span<const double> t_list, const DerivedScales& s);

}  // namespace qbm
