// SPDX-License-Identifier: Apache-2.0
#include "qbm/model.hpp"

#include <cmath>

#include "qbm/errors.hpp"

namespace qbm {

namespace {
void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(name, "must be finite and > 0 (got " + std::to_string(v) + ")");
}
}  // namespace

DerivedScales derive_scales(const ModelParams& p) {
  require_positive(p.m, "m");
  require_positive(p.gamma, "gamma");
  require_positive(p.kT, "kT");
  require_positive(p.hbar, "hbar");

  DerivedScales s;
  s.m = p.m;
  s.hbar = p.hbar;
  s.gamma = p.gamma;
  s.kT = p.kT;
  s.a_sq = 4.0 * p.m * p.gamma * p.kT / (p.hbar * p.hbar);
  s.alpha = std::sqrt(p.gamma * p.kT / p.hbar);
  s.D = 2.0 * p.m * p.gamma * p.kT;
  s.t_loc = 1.0 / s.alpha;
  s.omega = cd(s.alpha, -s.alpha);
  return s;
}

DerivedScales decoupled(DerivedScales s) {
  s.a_sq = 0.0;
  s.D = 0.0;
  return s;
}

TimescaleReport timescales(const ModelParams& p, double ell) {
  if (!(ell > 0.0) || !std::isfinite(ell)) throw DomainError("ell", "separation must be > 0");
  const DerivedScales s = derive_scales(p);
  TimescaleReport r;
  r.ell = ell;
  r.t_decoherence = p.hbar * p.hbar / (ell * ell * p.m * p.gamma * p.kT);
  r.t_loc = s.t_loc;
  r.t_relax = 1.0 / p.gamma;
  r.ordered = r.t_decoherence < r.t_loc && r.t_loc < r.t_relax;
  r.macroscopic = ell * ell > std::pow(p.hbar, 1.5) / (p.m * std::sqrt(p.gamma * p.kT)) &&
                  p.gamma < s.alpha;
  return r;
}

UnitSystem nondimensionalize(const ModelParams& p) {
  const DerivedScales s = derive_scales(p);
  UnitSystem u;
  u.time = 1.0 / s.alpha;
  u.length = std::sqrt(p.hbar / (p.m * s.alpha));
  u.momentum = std::sqrt(p.hbar * p.m * s.alpha);
  u.energy = p.hbar * s.alpha;
  u.gamma_scaled = p.gamma * u.time;
  u.kT_scaled = p.kT / u.energy;
  return u;
}

}  // namespace qbm
