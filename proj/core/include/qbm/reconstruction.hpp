// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <span>
#include <vector>

#include "qbm/gaussian.hpp"
#include "qbm/grid.hpp"
#include "qbm/mixture.hpp"
#include "qbm/model.hpp"

namespace qbm {

// rho = sum over the phase grid of w_p w_q f(p, q) |Psi_pq><Psi_pq|, with
// Psi_pq(x) = (Re Lambda / pi)^(1/4) exp(-(Lambda/2)(x - q)^2 + i p x / hbar).
// Warns ("coarse_phase_grid") when a phase step exceeds the coherent-state
// width, with the Poisson-summation aliasing estimate as the value.
DensityGrid assemble(const PhaseGrid& f, cd lambda, const Axis& x, double hbar, bool renormalize = true);

// Trace distance; throws DomainError on mismatched grids.
double reconstruction_error(const DensityGrid& rho_true, const DensityGrid& rho_rec);

struct DiagonalRepresentation {
  PhaseGrid f;
  cd lambda{1.0, 0.0};
  DensityGrid rho;
  DensityGrid rho_true;
  double reconstruction_error = std::numeric_limits<double>::quiet_NaN();
};

enum class PhaseSource { Wigner, F };

struct ReconstructionOptions {
  PhaseSource source = PhaseSource::Wigner;
  bool compact_frame = true;       // work in the frame of compact_frame()
  double nsig = 6.0;               // box half-widths in standard deviations
  double spacing_fraction = 1.0 / 3.0;  // phase step / coherent-state width
};

// Exact rho_t and its phase function (W_t or f) for the Gaussian-mixture
// state psi0, assembled on a grid sized from the moments. Throws the f-kernel
// domain error below its convergence bound, for either source.
DiagonalRepresentation reconstruct(const GaussianState& psi0, double t, const DerivedScales& s,
                                   const ReconstructionOptions& opt = {});

struct LadderPoint {
  double alpha_t = 0.0;
  double trace_distance = 0.0;
  double min_eigenvalue = 0.0;
  double f_min = 0.0;
};

std::vector<LadderPoint> convergence_ladder(const GaussianState& psi0, std::span<const double> t_list,
                                            const DerivedScales& s, const ReconstructionOptions& opt = {});

// Non-increasing up to a relative allowance.
bool is_monotone(const std::vector<LadderPoint>& ladder, double allowance = 0.1);

}  // namespace qbm
