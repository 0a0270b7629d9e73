// SPDX-License-Identifier: Apache-2.0
#include "qbm/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "qbm/errors.hpp"
#include "qbm/kernels.hpp"

namespace qbm {

namespace {

// fourth-order central stencils
template <class F>
auto d1(F f, int i, double h) {
  return (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h);
}
template <class F>
auto d2(F f, int i, double h) {
  return (-f(i - 2) + 16.0 * f(i - 1) - 30.0 * f(i) + 16.0 * f(i + 1) - f(i + 2)) / (12.0 * h * h);
}

void finish(ResidualReport& r) {
  r.l2_residual = std::sqrt(r.l2_residual);
  r.rhs_norm = std::sqrt(r.rhs_norm);
  r.dt_norm = std::sqrt(r.dt_norm);
  r.relative = r.dt_norm > 0.0 ? r.l2_residual / r.dt_norm : std::numeric_limits<double>::infinity();
}

}  // namespace

ResidualReport master_residual(const std::array<DensityGrid, 3>& series, double t, double ht, const DerivedScales& s) {
  require_matching(series[0], series[1]);
  require_matching(series[1], series[2]);
  if (!(ht > 0.0)) throw DomainError("ht", "time step must be positive");
  const Axis& x = series[1].x;
  if (x.n < 8) throw DomainError("grid", "need at least 8 nodes for the five-point stencils");
  const double h = x.step();
  const Eigen::MatrixXcd& r = series[1].values;
  const cd ik(0.0, s.hbar / (2.0 * s.m));

  ResidualReport rep;
  rep.op = "master";
  rep.t = t;
  rep.ht = ht;
  rep.hx = h;
  for (int j = 2; j < x.n - 2; ++j)
    for (int i = 2; i < x.n - 2; ++i) {
      const cd rxx = d2([&](int k) { return r(k, j); }, i, h);
      const cd ryy = d2([&](int k) { return r(i, k); }, j, h);
      const double xi = x.at(i) - x.at(j);
      const cd rhs = ik * (rxx - ryy) - 0.5 * s.a_sq * xi * xi * r(i, j);
      const cd dt = (series[2].values(i, j) - series[0].values(i, j)) / (2.0 * ht);
      rep.l2_residual += std::norm(dt - rhs) * h * h;
      rep.rhs_norm += std::norm(rhs) * h * h;
      rep.dt_norm += std::norm(dt) * h * h;
    }
  finish(rep);
  return rep;
}

double fp_cross_coefficient(const DerivedScales& s) { return s.hbar * s.alpha; }

ResidualReport fokker_planck_residual(const std::array<PhaseGrid, 3>& series, double t, double ht, FpEquation which,
                                      const DerivedScales& s) {
  require_matching(series[0], series[1]);
  require_matching(series[1], series[2]);
  if (!(ht > 0.0)) throw DomainError("ht", "time step must be positive");
  const PhaseGrid& g = series[1];
  if (g.p.n < 8 || g.q.n < 8) throw DomainError("grid", "need at least 8 nodes per axis for the five-point stencils");
  const double hp = g.p.step(), hq = g.q.step();
  const double cpq = fp_cross_coefficient(s), cqq = s.hbar / (2.0 * s.m);

  ResidualReport rep;
  rep.op = which == FpEquation::W ? "fokker_planck_w" : "fokker_planck_f";
  rep.t = t;
  rep.ht = ht;
  rep.hx = hq;
  rep.hp = hp;
  double extra = 0.0, diff = 0.0;
  const double cell = hp * hq;
  for (int i = 2; i < g.p.n - 2; ++i)
    for (int j = 2; j < g.q.n - 2; ++j) {
      const auto& v = g.values;
      const double fq = d1([&](int k) { return v(i, k); }, j, hq);
      const double fpp = d2([&](int k) { return v(k, j); }, i, hp);
      double rhs = -(g.p.at(i) / s.m) * fq + s.D * fpp;
      if (which == FpEquation::F) {
        const double fpq = d1([&](int k) { return d1([&](int l) { return v(k, l); }, j, hq); }, i, hp);
        const double fqq = d2([&](int k) { return v(i, k); }, j, hq);
        const double e = cpq * fpq + cqq * fqq;
        rhs += e;
        extra += e * e * cell;
        diff += s.D * s.D * fpp * fpp * cell;
      }
      const double dt = (series[2].values(i, j) - series[0].values(i, j)) / (2.0 * ht);
      rep.l2_residual += (dt - rhs) * (dt - rhs) * cell;
      rep.rhs_norm += rhs * rhs * cell;
      rep.dt_norm += dt * dt * cell;
    }
  finish(rep);
  if (which == FpEquation::F && diff > 0.0) rep.extra_term_fraction = std::sqrt(extra / diff);
  return rep;
}

DecoherenceFit decoherence_rate(const GaussianState& cat, std::span<const double> t_list, const DerivedScales& s) {
  if (cat.components.size() < 2) throw DomainError("rho0", "decoherence rate needs a superposition of two packets");
  const double x = cat.components[0].q0, y = cat.components[1].q0;
  DecoherenceFit fit;
  fit.ell = std::abs(x - y);
  if (!(fit.ell > 0.0)) throw DomainError("rho0", "packets coincide");
  // frozen-position decoherence exponent of J per unit time
  fit.predicted_rate = -j_exponent(make_j_kernel(1.0, s), x, y, x, y).real();
  // 2 hbar^2 / (ell^2 m gamma kT), written with alpha^2 = gamma kT / hbar so
  // the decoupled limit keeps the coupled window
  fit.t_window = 2.0 * s.hbar / (fit.ell * fit.ell * s.m * s.alpha * s.alpha);

  std::vector<double> ts(t_list.begin(), t_list.end());
  if (ts.empty())
    for (int k = 0; k < 9; ++k) ts.push_back(fit.t_window * k / 8.0);
  if (ts.size() < 2) throw DomainError("t_list", "need at least two times");

  const GaussianDensity rho0 = density_from_state(normalized(cat, s.hbar), s.hbar);
  for (double t : ts) {
    const GaussianDensity r = t > 0.0 ? apply_j(rho0, make_j_kernel(t, s)) : rho0;
    const double c = std::abs(r(x, y)) / std::sqrt(std::abs(r(x, x)) * std::abs(r(y, y)));
    fit.t.push_back(t);
    fit.log_coherence.push_back(std::log(c));
  }
  double tm = 0, lm = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) tm += fit.t[i], lm += fit.log_coherence[i];
  tm /= ts.size();
  lm /= ts.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    num += (fit.t[i] - tm) * (fit.log_coherence[i] - lm);
    den += (fit.t[i] - tm) * (fit.t[i] - tm);
  }
  fit.rate = -num / den;
  fit.constant = s.a_sq > 0.0 ? fit.rate / (s.a_sq * fit.ell * fit.ell) : 0.0;
  return fit;
}

}  // namespace qbm
