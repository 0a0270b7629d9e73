// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qbm/gaussian.hpp"
#include "qbm/grid.hpp"
#include "qbm/model.hpp"

namespace qbm {

// d xi = (u + i v) sqrt(dt / 2) with u, v independent standard normals.
struct WienerIncrement {
  cd dxi{0.0, 0.0};
  double dt = 0.0;

  static WienerIncrement draw(std::mt19937_64& rng, double dt);
};

// Wavefunction on a window of nodes x.at(i). The lab wavefunction is
// exp(i k_gauge x) psi(x): in comoving runs the mean momentum is carried by
// k_gauge and the window is translated along with the packet, so psi itself
// stays slowly varying and centred.
struct TrajectoryState {
  Axis x;
  Eigen::VectorXcd psi;
  double k_gauge = 0.0;  // 1 / length
  double t = 0.0;
  std::uint64_t seed = 0;

  double norm() const;
  Eigen::VectorXcd lab_wavefunction() const;
};

TrajectoryState initial_state(const GaussianState& psi0, const Axis& x, double hbar, std::uint64_t seed = 0);

struct QsdOptions {
  bool comoving = false;
  double leak_limit = 1e-8;  // boundary |psi|^2 relative to the peak
};

// Largest dt accepted by qsd_step: 0.1 / (alpha max(1, a^2 x_max^2 dt)).
bool step_is_stable(const TrajectoryState& s, double dt, const DerivedScales& sc);

// One step: Crank-Nicolson for p^2/2m (second-order central differences,
// Dirichlet ends), then the Ito Euler-Maruyama update
//   psi += [-(1/2)(L - <L>)^2 dt + (L - <L>) dxi] psi,  L = a x,
// then renormalization. `norm_drift`, if given, receives |psi|^2 - 1 before
// renormalization. Throws DomainError on a dt above the stability bound
// (message carries a suggested dt) and on boundary leakage.
TrajectoryState qsd_step(const TrajectoryState& s, const WienerIncrement& w, const DerivedScales& sc,
                         const QsdOptions& opt = {}, double* norm_drift = nullptr);
TrajectoryState qsd_step(const TrajectoryState& s, double dt, const DerivedScales& sc, std::mt19937_64& rng,
                         const QsdOptions& opt = {});

struct TrajectorySample {
  double t = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double dx = 0.0;
  double dp = 0.0;
};
TrajectorySample summarize(const TrajectoryState& s, double hbar);

struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<TrajectorySample> samples;
  TrajectoryState final_state;
};

// Deterministic given the seed. Samples every `record_every` steps and at
// the end.
Trajectory run_trajectory(const GaussianState& psi0, const Axis& x, double t_final, double dt, const DerivedScales& sc,
                          std::uint64_t seed, int record_every = 1, const QsdOptions& opt = {});

struct EnsembleSummary {
  int n = 0;
  std::vector<std::vector<TrajectorySample>> samples;  // per trajectory
  std::vector<std::uint64_t> seeds;
  DensityGrid mean_rho;  // (1/N) sum |psi><psi| on the common lab grid
};

// Projector mean of final states. Throws on N = 0 or mismatched grids
// (comoving trajectories generally do not share a grid).
EnsembleSummary ensemble_mean(const std::vector<Trajectory>& trajectories);

// Runs seeds base_seed + i, i < n, accumulating the mean density matrix on
// the fly unless the run is comoving.
EnsembleSummary run_ensemble(const GaussianState& psi0, const Axis& x, double t_final, double dt, const DerivedScales& sc,
                             std::uint64_t base_seed, int n, int record_every = 1, const QsdOptions& opt = {});

}  // namespace qbm
