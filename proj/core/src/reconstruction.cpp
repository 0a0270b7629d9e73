// SPDX-License-Identifier: Apache-2.0
#include "qbm/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qbm/errors.hpp"
#include "qbm/kernels.hpp"
#include "qbm/phasespace.hpp"
#include "qbm/warnings.hpp"

namespace qbm {

using std::numbers::pi;

namespace {

constexpr double kCut = 40.0;  // drop Gaussian factors below e^-40

void check_spacing(const PhaseGrid& f, cd lambda, double hbar) {
  const Eigen::Matrix2d cc = coherent_covariance(lambda, hbar);
  const double sp = std::sqrt(cc(0, 0)), sq = std::sqrt(cc(1, 1));
  const double dp = f.p.step(), dq = f.q.step();
  if (dp <= sp && dq <= sq) return;
  // sampling a Gaussian of width s at step d aliases at ~ 2 exp(-2 pi^2 s^2 / d^2)
  const double est = std::max(2.0 * std::exp(-2.0 * pi * pi * sp * sp / (dp * dp)),
                              2.0 * std::exp(-2.0 * pi * pi * sq * sq / (dq * dq)));
  std::ostringstream os;
  os << "phase grid steps (" << dp << ", " << dq << ") exceed coherent widths (" << sp << ", " << sq
     << "); estimated aliasing error " << est;
  warn("coarse_phase_grid", os.str(), est);
}

}  // namespace

DensityGrid assemble(const PhaseGrid& f, cd lambda, const Axis& x, double hbar, bool renormalize) {
  const double lr = lambda.real();
  if (!(lr > 0.0)) throw DomainError("lambda", "coherent width needs Re(Lambda) > 0");
  check_spacing(f, lambda, hbar);

  const int np = f.p.n, nq = f.q.n, n = x.n;
  const double h = x.step();
  const double norm2 = std::sqrt(lr / pi);
  const int band = std::min(n - 1, static_cast<int>(std::ceil(std::sqrt(4.0 * kCut / lr) / h)));
  const double reach = std::sqrt(2.0 * kCut / lr);

  // F(d, b) = sum_a w_a w_b f(a, b) exp(i p_a d h / hbar): one GEMM
  Eigen::MatrixXcd E(2 * band + 1, np);
  for (int a = 0; a < np; ++a) {
    const cd z = std::polar(1.0, f.p.at(a) * h / hbar);
    cd zd = std::pow(z, -band);
    for (int d = 0; d <= 2 * band; ++d, zd *= z) E(d, a) = zd;
  }
  Eigen::MatrixXcd C(np, nq);
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < nq; ++b) C(a, b) = f.p.weight(a) * f.q.weight(b) * f.values(a, b);
  const Eigen::MatrixXcd F = E * C;

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  std::vector<cd> g(n);
  for (int b = 0; b < nq; ++b) {
    const double q = f.q.at(b);
    const int lo = std::max(0, static_cast<int>(std::floor((q - reach - x.min) / h)));
    const int hi = std::min(n - 1, static_cast<int>(std::ceil((q + reach - x.min) / h)));
    if (lo > hi) continue;
    for (int i = lo; i <= hi; ++i) {
      const double u = x.at(i) - q;
      g[i] = norm2 * std::exp(-0.5 * lambda * u * u);
    }
    for (int j = lo; j <= hi; ++j) {
      const cd gj = std::conj(g[j]);
      const int i0 = std::max(lo, j - band), i1 = std::min(hi, j + band);
      for (int i = i0; i <= i1; ++i) rho(i, j) += g[i] * gj * F(i - j + band, b);
    }
  }
  DensityGrid out{x, std::move(rho)};
  if (renormalize) out.normalize();
  return out;
}

double reconstruction_error(const DensityGrid& rho_true, const DensityGrid& rho_rec) {
  require_matching(rho_true, rho_rec);
  return trace_distance(rho_true, rho_rec);
}

DiagonalRepresentation reconstruct(const GaussianState& psi0, double t, const DerivedScales& s,
                                   const ReconstructionOptions& opt) {
  check_f_kernel_domain(t, s);
  const GaussianDensity rho0 = density_from_state(normalized(psi0, s.hbar), s.hbar);
  const GaussianDensity rho_t = apply_j(rho0, make_j_kernel(t, s));
  const PhaseMixture w_t = wigner_mixture(rho_t, s.hbar);
  const PhaseMixture phase = opt.source == PhaseSource::Wigner ? w_t : f_mixture(rho0, t, s);
  const cd lam = coherent_width(s);
  const Frame fr = opt.compact_frame ? compact_frame(moments(w_t), lam, s) : Frame{};

  DiagonalRepresentation out;
  out.lambda = transform_width(lam, fr, s.hbar);
  const PhaseMixture ph = transform(phase, fr);
  const PhaseMoments mw = moments(transform(w_t, fr));
  const Eigen::Matrix2d cc = coherent_covariance(out.lambda, s.hbar);

  auto axis = [&](int k) {
    const double half = opt.nsig * std::sqrt(mw.cov(k, k) + cc(k, k));
    const double step = opt.spacing_fraction * std::sqrt(cc(k, k));
    return centered_axis(mw.mean(k), half, static_cast<int>(std::ceil(2.0 * half / step)) + 1);
  };
  const Axis p = axis(0), q = axis(1);
  out.f = sample(ph, p, q);

  PhaseMoments wide = mw;
  wide.cov += cc;
  const Axis x = density_axis(wide, s.hbar, opt.nsig);
  out.rho_true = sample(transform(rho_t, fr, s.hbar), x);
  out.rho_true.normalize();
  out.rho = assemble(out.f, out.lambda, x, s.hbar);
  out.reconstruction_error = reconstruction_error(out.rho_true, out.rho);
  return out;
}

std::vector<LadderPoint> convergence_ladder(const GaussianState& psi0, std::span<const double> t_list,
                                            const DerivedScales& s, const ReconstructionOptions& opt) {
  for (double t : t_list) check_f_kernel_domain(t, s);
  std::vector<LadderPoint> out;
  for (double t : t_list) {
    const DiagonalRepresentation d = reconstruct(psi0, t, s, opt);
    out.push_back({s.alpha * t, d.reconstruction_error, min_eigenvalue(d.rho), d.f.min()});
  }
  return out;
}

bool is_monotone(const std::vector<LadderPoint>& ladder, double allowance) {
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i].trace_distance > (1.0 + allowance) * ladder[i - 1].trace_distance) return false;
  return true;
}

}  // namespace qbm
