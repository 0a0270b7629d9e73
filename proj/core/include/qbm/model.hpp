// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

namespace qbm {

using cd = std::complex<double>;

struct ModelParams {
  double m = 1.0;
  double gamma = 1.0;
  double kT = 1.0;
  double hbar = 1.0;
};

// Everything downstream takes DerivedScales; it carries m and hbar so that
// kernels never need the raw params.
struct DerivedScales {
  double m = 1.0;
  double hbar = 1.0;
  double gamma = 1.0;
  double kT = 1.0;
  double a_sq = 4.0;   // 4 m gamma kT / hbar^2
  double alpha = 1.0;  // sqrt(gamma kT / hbar)
  double D = 2.0;      // 2 m gamma kT
  double t_loc = 1.0;  // 1 / alpha
  cd omega{1.0, -1.0};
};

// Throws DomainError naming the first non-positive (or non-finite) field.
DerivedScales derive_scales(const ModelParams& p);

// Same params with the environment switched off (a^2 = D = 0). Used for the
// closed-system limit checks; alpha is left at its coupled value so grid
// sizing heuristics keep working.
DerivedScales decoupled(DerivedScales s);

struct TimescaleReport {
  double ell = 1.0;
  double t_decoherence = 1.0;
  double t_loc = 1.0;
  double t_relax = 1.0;
  bool ordered = false;  // t_dec < t_loc < t_relax, as measured
  bool macroscopic = false;  // the sufficient condition on ell and gamma/alpha
};

TimescaleReport timescales(const ModelParams& p, double ell);

// Dimensionless units: time 1/alpha, length sqrt(hbar/(m alpha)),
// momentum sqrt(hbar m alpha). In these units gamma' kT' = 1 and hbar = m = 1.
struct UnitSystem {
  double time = 1.0;
  double length = 1.0;
  double momentum = 1.0;
  double energy = 1.0;
  double gamma_scaled = 1.0;
  double kT_scaled = 1.0;
};

UnitSystem nondimensionalize(const ModelParams& p);

}  // namespace qbm
