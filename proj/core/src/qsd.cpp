// SPDX-License-Identifier: Apache-2.0
#include "qbm/qsd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbm/errors.hpp"

namespace qbm {

WienerIncrement WienerIncrement::draw(std::mt19937_64& rng, double dt) {
  std::normal_distribution<double> n01;
  const double u = n01(rng);
  const double v = n01(rng);
  return {cd(u, v) * std::sqrt(0.5 * dt), dt};
}

double TrajectoryState::norm() const { return std::sqrt(psi.squaredNorm() * x.step()); }

Eigen::VectorXcd TrajectoryState::lab_wavefunction() const {
  Eigen::VectorXcd out(psi.size());
  for (int i = 0; i < x.n; ++i) out(i) = std::polar(1.0, k_gauge * x.at(i)) * psi(i);
  return out;
}

TrajectoryState initial_state(const GaussianState& psi0, const Axis& x, double hbar, std::uint64_t seed) {
  TrajectoryState s;
  s.x = x;
  s.seed = seed;
  s.psi.resize(x.n);
  for (int i = 0; i < x.n; ++i) s.psi(i) = evaluate(psi0, x.at(i), hbar);
  const double nrm = s.norm();
  if (!(nrm > 0.0)) throw DomainError("psi0", "initial state vanishes on the grid");
  s.psi /= nrm;
  return s;
}

namespace {

double half_width(const Axis& x) { return 0.5 * (x.max - x.min); }

double max_stable_dt(const TrajectoryState& s, const DerivedScales& sc) {
  const double xm = half_width(s.x);
  const double b = sc.a_sq * xm * xm;
  const double t1 = 0.1 / sc.alpha;
  if (b * t1 <= 1.0) return t1;
  return std::sqrt(0.1 / (sc.alpha * b));
}

double mean_position(const TrajectoryState& s) {
  double m = 0.0, n = 0.0;
  for (int i = 0; i < s.x.n; ++i) {
    const double w = std::norm(s.psi(i));
    m += w * s.x.at(i);
    n += w;
  }
  return m / n;
}

// psi_new = (1 - i r D2)^-1 (1 + i r D2) psi with r = hbar dt / (4 m h^2)
void crank_nicolson(Eigen::VectorXcd& psi, double r) {
  const int n = static_cast<int>(psi.size());
  const cd off(0.0, -r), diag(1.0, 2.0 * r);
  std::vector<cd> rhs(n), cp(n);
  for (int i = 0; i < n; ++i) {
    const cd l = i > 0 ? psi(i - 1) : cd(0.0);
    const cd u = i < n - 1 ? psi(i + 1) : cd(0.0);
    rhs[i] = psi(i) + cd(0.0, r) * (u - 2.0 * psi(i) + l);
  }
  // Thomas algorithm, constant coefficients
  cp[0] = off / diag;
  rhs[0] /= diag;
  for (int i = 1; i < n; ++i) {
    const cd den = diag - off * cp[i - 1];
    cp[i] = off / den;
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / den;
  }
  psi(n - 1) = rhs[n - 1];
  for (int i = n - 2; i >= 0; --i) psi(i) = rhs[i] - cp[i] * psi(i + 1);
}

void shift_window(TrajectoryState& s, int cells) {
  const int n = s.x.n;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const int src = i + cells;
    if (src >= 0 && src < n) out(i) = s.psi(src);
  }
  s.psi = out;
  const double h = s.x.step();
  s.x.min += cells * h;
  s.x.max += cells * h;
}

}  // namespace

bool step_is_stable(const TrajectoryState& s, double dt, const DerivedScales& sc) {
  return dt > 0.0 && dt <= max_stable_dt(s, sc);
}

TrajectoryState qsd_step(const TrajectoryState& s, const WienerIncrement& w, const DerivedScales& sc,
                         const QsdOptions& opt, double* norm_drift) {
  const double dt = w.dt;
  if (!step_is_stable(s, dt, sc)) {
    std::ostringstream os;
    os << "step " << dt << " violates the stability bound; use dt <= " << max_stable_dt(s, sc);
    throw DomainError("dt", os.str());
  }
  TrajectoryState o = s;
  const double h = o.x.step();
  crank_nicolson(o.psi, sc.hbar * dt / (4.0 * sc.m * h * h));
  if (opt.comoving) {
    // the window moves with the gauge velocity, absorbing the convection term
    const double v = sc.hbar * o.k_gauge / sc.m;
    o.x.min += v * dt;
    o.x.max += v * dt;
  }

  const double a = std::sqrt(sc.a_sq);
  if (a > 0.0) {
    const double xm = mean_position(o);
    for (int i = 0; i < o.x.n; ++i) {
      const double dl = a * (o.x.at(i) - xm);
      o.psi(i) *= 1.0 - 0.5 * dl * dl * dt + dl * w.dxi;
    }
  }
  const double nrm = o.norm();
  if (norm_drift) *norm_drift = nrm * nrm - 1.0;
  o.psi /= nrm;
  o.t += dt;

  const double peak = o.psi.cwiseAbs2().maxCoeff();
  const int n = o.x.n;
  const double edge = std::max({std::norm(o.psi(0)), std::norm(o.psi(1)), std::norm(o.psi(n - 2)), std::norm(o.psi(n - 1))});
  if (edge > opt.leak_limit * peak) {
    std::ostringstream os;
    os << "boundary density " << edge / peak << " of the peak exceeds " << opt.leak_limit << " at t = " << o.t;
    throw DomainError("leak", os.str());
  }

  if (opt.comoving) {
    // re-gauge the mean momentum into k_gauge (exact phase multiplication)
    cd j{0.0, 0.0};
    for (int i = 1; i < n - 1; ++i) j += std::conj(o.psi(i)) * (o.psi(i + 1) - o.psi(i - 1));
    const double dk = 0.5 * j.imag();  // <k> of the normalized psi
    for (int i = 0; i < n; ++i) o.psi(i) *= std::polar(1.0, -dk * o.x.at(i));
    o.k_gauge += dk;
    // recentre by whole cells
    const double centre = 0.5 * (o.x.min + o.x.max);
    const int cells = static_cast<int>(std::lround((mean_position(o) - centre) / h));
    if (std::abs(cells) >= 2) shift_window(o, cells);
  }
  return o;
}

TrajectoryState qsd_step(const TrajectoryState& s, double dt, const DerivedScales& sc, std::mt19937_64& rng,
                         const QsdOptions& opt) {
  return qsd_step(s, WienerIncrement::draw(rng, dt), sc, opt);
}

TrajectorySample summarize(const TrajectoryState& s, double hbar) {
  const int n = s.x.n;
  const double h = s.x.step();
  double w = 0, mx = 0, mxx = 0, kin = 0;
  cd j{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const double d = std::norm(s.psi(i));
    const double x = s.x.at(i);
    w += d;
    mx += d * x;
    mxx += d * x * x;
    if (i + 1 < n) kin += std::norm(s.psi(i + 1) - s.psi(i));
    if (i > 0 && i + 1 < n) j += std::conj(s.psi(i)) * (s.psi(i + 1) - s.psi(i - 1));
  }
  TrajectorySample r;
  r.t = s.t;
  r.mean_x = mx / w;
  r.dx = std::sqrt(std::max(0.0, mxx / w - r.mean_x * r.mean_x));
  const double pphi = hbar * j.imag() / (2.0 * h * w);
  const double pp = hbar * hbar * kin / (h * h * w);
  r.mean_p = hbar * s.k_gauge + pphi;
  r.dp = std::sqrt(std::max(0.0, pp - pphi * pphi));
  return r;
}

Trajectory run_trajectory(const GaussianState& psi0, const Axis& x, double t_final, double dt, const DerivedScales& sc,
                          std::uint64_t seed, int record_every, const QsdOptions& opt) {
  if (!(t_final > 0.0)) throw DomainError("t_final", "must be positive");
  if (record_every < 1) throw DomainError("record_every", "must be >= 1");
  const int steps = static_cast<int>(std::lround(t_final / dt));
  const double h = t_final / steps;
  std::mt19937_64 rng(seed);
  Trajectory tr;
  tr.seed = seed;
  TrajectoryState s = initial_state(psi0, x, sc.hbar, seed);
  tr.samples.push_back(summarize(s, sc.hbar));
  for (int k = 1; k <= steps; ++k) {
    s = qsd_step(s, WienerIncrement::draw(rng, h), sc, opt);
    if (k % record_every == 0 || k == steps) tr.samples.push_back(summarize(s, sc.hbar));
  }
  tr.final_state = std::move(s);
  return tr;
}

EnsembleSummary ensemble_mean(const std::vector<Trajectory>& trajectories) {
  if (trajectories.empty()) throw DomainError("trajectories", "need at least one trajectory");
  const Axis& x = trajectories.front().final_state.x;
  EnsembleSummary e;
  e.n = static_cast<int>(trajectories.size());
  e.mean_rho = DensityGrid{x, Eigen::MatrixXcd::Zero(x.n, x.n)};
  for (const auto& tr : trajectories) {
    if (!tr.final_state.x.matches(x)) throw DomainError("grid", "trajectories do not share a grid");
    const Eigen::VectorXcd v = tr.final_state.lab_wavefunction();
    e.mean_rho.values.noalias() += v * v.adjoint();
    e.samples.push_back(tr.samples);
    e.seeds.push_back(tr.seed);
  }
  e.mean_rho.values /= static_cast<double>(e.n);
  e.mean_rho.normalize();
  return e;
}

EnsembleSummary run_ensemble(const GaussianState& psi0, const Axis& x, double t_final, double dt, const DerivedScales& sc,
                             std::uint64_t base_seed, int n, int record_every, const QsdOptions& opt) {
  if (n < 1) throw DomainError("n_trajectories", "need at least one trajectory");
  EnsembleSummary e;
  e.n = n;
  if (!opt.comoving) e.mean_rho = DensityGrid{x, Eigen::MatrixXcd::Zero(x.n, x.n)};
  for (int i = 0; i < n; ++i) {
    Trajectory tr = run_trajectory(psi0, x, t_final, dt, sc, base_seed + i, record_every, opt);
    if (!opt.comoving) {
      const Eigen::VectorXcd v = tr.final_state.lab_wavefunction();
      e.mean_rho.values.noalias() += v * v.adjoint();
    }
    e.samples.push_back(std::move(tr.samples));
    e.seeds.push_back(base_seed + i);
  }
  if (!opt.comoving) {
    e.mean_rho.values /= static_cast<double>(n);
    e.mean_rho.normalize();
  }
  return e;
}

}  // namespace qbm
