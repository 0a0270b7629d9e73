// SPDX-License-Identifier: Apache-2.0
#include "qbm/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qbm/errors.hpp"
#include "qbm/warnings.hpp"

namespace qbm {

using std::numbers::pi;

PhaseMoments state_moments(const GaussianState& psi0, double t, const DerivedScales& s) {
  const GaussianState psi = normalized(psi0, s.hbar);
  const GaussianDensity rho = t > 0.0 ? evolve_exact(psi, t, s) : density_from_state(psi, s.hbar);
  return moments(wigner_mixture(rho, s.hbar));
}

Axis density_axis(const PhaseMoments& w, double hbar, double nsig, bool for_wigner) {
  const double sq = std::sqrt(w.cov(1, 1));
  const double pext = std::abs(w.mean(0)) + nsig * std::sqrt(w.cov(0, 0));
  double h = pi * hbar / (1.2 * pext);
  if (for_wigner) h *= 0.5;
  const int n = static_cast<int>(std::ceil(2.0 * nsig * sq / h)) + 1;
  return centered_axis(w.mean(1), nsig * sq, std::max(n, 16));
}

PhaseBox phase_box(const PhaseMoments& w, int np, int nq, double nsig) {
  return {centered_axis(w.mean(0), nsig * std::sqrt(w.cov(0, 0)), np),
          centered_axis(w.mean(1), nsig * std::sqrt(w.cov(1, 1)), nq)};
}

// ---- density propagation ---------------------------------------------------------

namespace {

// -(ee xi^2 + ed xi xi0 + dd xi0^2) in the exponent
struct XiForm {
  double ee, ed, dd;
};

void check_boundary(const DensityGrid& rho, const char* what) {
  const int n = rho.x.n;
  const double peak = rho.values.cwiseAbs().maxCoeff();
  double edge = 0.0;
  for (int i = 0; i < n; ++i) {
    edge = std::max({edge, std::abs(rho.values(0, i)), std::abs(rho.values(n - 1, i)),
                     std::abs(rho.values(i, 0)), std::abs(rho.values(i, n - 1))});
  }
  const double leak = peak > 0.0 ? edge / peak : 0.0;
  if (leak > 1e-12) {
    std::ostringstream os;
    os << what << ": boundary values reach " << leak << " of the peak (limit 1e-12)";
    warn("boundary_leak", os.str(), leak);
  }
}

// rho_t(k, l) = C sum_{ij} w_i w_j exp(i beta0 [(x_k - x_i)^2 - (x_l - x_j)^2] - Q(xi, xi0)) rho0(i, j)
// In rotated indices e = k - l, d = i - j the phase is beta (e - d)(X_kl - X_ij)
// with beta = m h / (hbar t), so the inner sum over X_ij is a table G(d, e - d).
DensityGrid rotated_propagation(const DensityGrid& rho0, double t, const DerivedScales& s, const XiForm& form) {
  if (!(t > 0.0)) throw DomainError("t", "must be positive");
  const int n = rho0.x.n;
  const double h = rho0.x.step();
  const double x0 = rho0.x.min;
  const double beta = s.m * h / (s.hbar * t);
  const double C = s.m / (2.0 * pi * s.hbar * t);
  check_boundary(rho0, "evolve_density");

  const double peak = rho0.values.cwiseAbs().maxCoeff();
  const double floor = 1e-16 * peak;
  // support of rho0 in d and in x, for pruning and the aliasing estimate
  int lo = n, hi = -1;
  std::vector<char> dlive(2 * n - 1, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(rho0.values(i, j)) > floor) {
        dlive[i - j + n - 1] = 1;
        lo = std::min({lo, i, j});
        hi = std::max({hi, i, j});
      }
  if (hi < 0) throw DomainError("rho0", "density matrix is zero");
  const double reach = std::max(hi, n - 1 - lo) * h;
  const double phase_step = s.m * h * reach / (s.hbar * t);
  if (phase_step > pi) {
    std::ostringstream os;
    os << "evolve_density: kernel phase advances " << phase_step
       << " rad per grid step (needs < pi); refine the grid or increase t";
    warn("aliasing", os.str(), phase_step);
  }

  // prune (e, d) pairs where the xi form is below exp(-40)
  const double cut = 40.0;
  auto qform = [&](int e, int d) { return h * h * (form.ee * e * e + form.ed * double(e) * d + form.dd * double(d) * d); };

  const int E = 2 * n - 1;
  // G[d][delta], delta = e - d in [-(2n-2), 2n-2]
  const int ND = 4 * n - 3;
  std::vector<std::vector<cd>> G(E);
  std::vector<int> eLo(E, 0), eHi(E, -1);
  for (int di = 0; di < E; ++di) {
    if (!dlive[di]) continue;
    const int d = di - (n - 1);
    int el = n, eh = -n;
    for (int e = -(n - 1); e <= n - 1; ++e)
      if (qform(e, d) < cut) {
        el = std::min(el, e);
        eh = std::max(eh, e);
      }
    if (el > eh) continue;
    eLo[di] = el;
    eHi[di] = eh;
    G[di].assign(ND, cd(0.0, 0.0));
    const int i0 = std::max(0, d), i1 = std::min(n - 1, n - 1 + d);
    std::vector<cd> diag(i1 - i0 + 1);
    for (int i = i0; i <= i1; ++i) diag[i - i0] = rho0.x.weight(i) * rho0.x.weight(i - d) * rho0.values(i, i - d);
    const double xs = x0 + (2 * i0 - d) * h / 2.0;
    for (int e = el; e <= eh; ++e) {
      const int delta = e - d;
      const cd z = std::polar(1.0, -beta * delta * h);
      cd acc{0.0, 0.0};
      for (int k = static_cast<int>(diag.size()) - 1; k >= 0; --k) acc = acc * z + diag[k];
      G[di][delta + 2 * (n - 1)] = acc * std::polar(1.0, -beta * delta * xs);
    }
  }

  DensityGrid out{rho0.x, Eigen::MatrixXcd::Zero(n, n)};
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const int e = k - l;
      const double X = x0 + (k + l) * h / 2.0;
      cd acc{0.0, 0.0};
      for (int di = 0; di < E; ++di) {
        if (G[di].empty() || e < eLo[di] || e > eHi[di]) continue;
        const int d = di - (n - 1);
        const int delta = e - d;
        acc += std::exp(-qform(e, d)) * std::polar(1.0, beta * delta * X) * G[di][delta + 2 * (n - 1)];
      }
      out.values(k, l) = C * acc;
    }
  return out;
}

XiForm f_form(double t, const DerivedScales& s, FKernelForm form) {
  const double k0 = s.a_sq * t / 6.0;
  if (form == FKernelForm::Approximate) return {k0, k0, k0};
  const double w = s.m * s.alpha / (4.0 * s.hbar);
  const double u = s.alpha * t;
  const double r = 1.0 - 1.0 / u;
  return {k0 - w * (1.0 + r * r), k0 - 2.0 * w * r / u, k0 - w / (u * u)};
}

}  // namespace

DensityGrid evolve_density(const DensityGrid& rho0, double t, const DerivedScales& s) {
  const double k0 = s.a_sq * t / 6.0;
  DensityGrid out = rotated_propagation(rho0, t, s, {k0, k0, k0});
  out.normalize();
  return out;
}

DensityGrid evolve_density(const GaussianState& psi0, double t, const DerivedScales& s, const Axis& x) {
  if (!(t > 0.0)) throw DomainError("t", "must be positive");
  DensityGrid out = sample(evolve_exact(normalized(psi0, s.hbar), t, s), x);
  out.normalize();
  return out;
}

// ---- Wigner ----------------------------------------------------------------------

Axis wigner_momentum_axis(const Axis& x, double hbar) {
  const int n = x.n;
  const double dp = pi * hbar / (n * x.step());
  return {-(n / 2) * dp, (n - 1 - n / 2) * dp, n};
}

PhaseGrid wigner_transform(const DensityGrid& rho, double hbar, int q_stride) {
  return wigner_transform(rho, hbar, wigner_momentum_axis(rho.x, hbar), q_stride);
}

PhaseGrid wigner_transform(const DensityGrid& rho, double hbar, const Axis& p, int q_stride) {
  if (q_stride < 1) throw DomainError("q_stride", "must be >= 1");
  const double herm = rho.hermiticity_error();
  if (herm > 1e-10) throw DomainError("rho", "input is not Hermitian (relative error " + std::to_string(herm) + ")");
  const int n = rho.x.n;
  const double h = rho.x.step();
  const int nq = (n - 1) / q_stride + 1;
  PhaseGrid w{p, Axis{rho.x.min, rho.x.at((nq - 1) * q_stride), nq}, PhaseGrid::Matrix::Zero(p.n, nq)};
  const double pref = 2.0 * h / (2.0 * pi * hbar);
  double imag_peak = 0.0;
  std::vector<cd> acc(p.n);
  for (int jq = 0; jq < nq; ++jq) {
    const int i = jq * q_stride;
    std::fill(acc.begin(), acc.end(), rho.values(i, i));
    const int kmax = std::min(i, n - 1 - i);
    for (int k = 1; k <= kmax; ++k) {
      const cd a = rho.values(i + k, i - k), b = rho.values(i - k, i + k);
      cd z = std::polar(1.0, -2.0 * p.min * k * h / hbar);
      const cd dz = std::polar(1.0, -2.0 * p.step() * k * h / hbar);
      for (int j = 0; j < p.n; ++j) {
        acc[j] += a * z + b * std::conj(z);
        z *= dz;
      }
    }
    for (int j = 0; j < p.n; ++j) {
      w.values(j, jq) = pref * acc[j].real();
      imag_peak = std::max(imag_peak, pref * std::abs(acc[j].imag()));
    }
  }
  const double peak = w.values.cwiseAbs().maxCoeff();
  if (imag_peak > 1e-8 * peak)
    throw DomainError("rho", "Wigner transform has imaginary residue " + std::to_string(imag_peak / peak));
  return w;
}

PhaseGrid wigner_transform(const GaussianDensity& rho, const Axis& p, const Axis& q, double hbar, double xi_step) {
  const double pext = std::max(std::abs(p.min), std::abs(p.max));
  const double dxi = xi_step > 0.0 ? xi_step : pi * hbar / (1.2 * pext);
  // xi range from the off-diagonal decay of each term at the q-box centre
  double xmax = 0.0;
  for (const auto& t : rho.terms) {
    // exponent in xi at fixed X: -(A00 - 2 A01 + A11)/4 xi^2 + ...
    const double a = 0.25 * (t.A(0, 0) - 2.0 * t.A(0, 1) + t.A(1, 1)).real();
    if (!(a > 0.0)) throw DivergentIntegral("rho", "no off-diagonal decay");
    const double qm = std::max(std::abs(q.min), std::abs(q.max));
    const double bl = (std::abs(0.5 * (t.b(0) - t.b(1)).real()) + qm * std::abs((t.A(1, 1) - t.A(0, 0)).real())) / (2.0 * a);
    xmax = std::max(xmax, bl + 9.0 / std::sqrt(a));
  }
  const int nk = static_cast<int>(std::ceil(xmax / dxi));
  PhaseGrid w{p, q, PhaseGrid::Matrix::Zero(p.n, q.n)};
  std::vector<cd> vals(2 * nk + 1);
  for (int jq = 0; jq < q.n; ++jq) {
    const double qv = q.at(jq);
    for (int k = -nk; k <= nk; ++k) vals[k + nk] = rho(qv + 0.5 * k * dxi, qv - 0.5 * k * dxi);
    for (int j = 0; j < p.n; ++j) {
      cd acc{0.0, 0.0};
      const cd dz = std::polar(1.0, -p.at(j) * dxi / hbar);
      cd z = std::polar(1.0, p.at(j) * nk * dxi / hbar);
      for (int k = 0; k < 2 * nk + 1; ++k) {
        acc += vals[k] * z;
        z *= dz;
      }
      w.values(j, jq) = (acc * dxi).real() / (2.0 * pi * hbar);
    }
  }
  return w;
}

PhaseGrid husimi_from_wigner(const PhaseGrid& w, double sigma_q, double hbar) {
  if (!(sigma_q > 0.0)) throw DomainError("sigma_q", "must be positive");
  const int np = w.p.n, nq = w.q.n;
  const double cp = 2.0 * sigma_q * sigma_q / (hbar * hbar);
  const double cq = 1.0 / (2.0 * sigma_q * sigma_q);
  PhaseGrid::Matrix tmp = PhaseGrid::Matrix::Zero(np, nq);
  for (int i = 0; i < np; ++i)
    for (int k = 0; k < np; ++k) {
      const double dp = w.p.at(i) - w.p.at(k);
      const double g = w.p.weight(k) * std::exp(-cp * dp * dp);
      if (g < 1e-300) continue;
      tmp.row(i) += g * w.values.row(k);
    }
  PhaseGrid out{w.p, w.q, PhaseGrid::Matrix::Zero(np, nq)};
  Eigen::MatrixXd gq(nq, nq);
  for (int j = 0; j < nq; ++j)
    for (int l = 0; l < nq; ++l) {
      const double dq = w.q.at(j) - w.q.at(l);
      gq(l, j) = w.q.weight(l) * std::exp(-cq * dq * dq);
    }
  out.values = tmp * gq;
  out.values /= pi * hbar;
  return out;
}

// ---- Wigner propagation --------------------------------------------------------------

namespace {

// integral of exp(-a (x - c)^2) against the unit hat of half-width h at 0
double gauss_hat_weight(double a, double c, double h) {
  const double sa = std::sqrt(a);
  auto half = [&](double cc) {  // integral over [0, h] of (1 - x/h) exp(-a (x - cc)^2)
    const double i0 = 0.5 * std::sqrt(pi / a) * (std::erf(sa * (h - cc)) - std::erf(-sa * cc));
    const double i1 = cc * i0 + (std::exp(-a * cc * cc) - std::exp(-a * (h - cc) * (h - cc))) / (2.0 * a);
    return i0 - i1 / h;
  };
  return half(c) + half(-c);
}

// weight of node offset c for a Gaussian of curvature a sampled with step h
double kernel_weight(double a, double c, double h) {
  if (1.0 / std::sqrt(2.0 * a) >= 0.8 * h) return h * std::exp(-a * c * c);
  return gauss_hat_weight(a, c, h);
}

}  // namespace

PhaseGrid evolve_wigner(const PhaseGrid& w0, double t, const DerivedScales& s) {
  return evolve_wigner(w0, t, s, w0.p, w0.q);
}

PhaseGrid evolve_wigner(const PhaseGrid& w0, double t, const DerivedScales& s, const Axis& p_out, const Axis& q_out) {
  if (!(t > 0.0)) throw DomainError("t", "must be positive");
  if (!(s.D > 0.0)) throw DomainError("D", "Wigner kernel needs D > 0");
  const double hp = w0.p.step(), hq = w0.q.step();
  if (std::abs(p_out.step() - hp) > 1e-9 * hp || std::abs(q_out.step() - hq) > 1e-9 * hq)
    throw DomainError("axes", "output steps must equal the input steps");
  const double off = (q_out.min - w0.q.min) / hq;
  const int j0 = static_cast<int>(std::lround(off));
  if (std::abs(off - j0) > 1e-6) throw DomainError("axes", "output q nodes must align with input q nodes");
  {
    // boundary mass
    const double peak = w0.values.cwiseAbs().maxCoeff();
    double edge = std::max(w0.values.row(0).cwiseAbs().maxCoeff(), w0.values.row(w0.p.n - 1).cwiseAbs().maxCoeff());
    edge = std::max({edge, w0.values.col(0).cwiseAbs().maxCoeff(), w0.values.col(w0.q.n - 1).cwiseAbs().maxCoeff()});
    if (peak > 0.0 && edge / peak > 1e-12)
      warn("boundary_leak", "evolve_wigner: boundary values reach " + std::to_string(edge / peak) + " of the peak",
           edge / peak);
  }

  const WignerKernel k = wigner_kernel(t, s);
  // exp(-mu dp^2 - nu v^2 + sig dp v) = exp(-mu' dp^2) exp(-nu (v - sig dp / 2 nu)^2)
  const double mup = k.mu - k.sig * k.sig / (4.0 * k.nu);
  const double norm = std::exp(k.log_norm());
  const double cut = 40.0;
  const double wp_half = std::sqrt(cut / mup) + hp;
  const double wq_half = std::sqrt(cut / k.nu) + hq;
  const int nq0 = w0.q.n;

  // q support of each input row; rows below 1e-16 of the peak are skipped
  const double floor = 1e-16 * w0.values.cwiseAbs().maxCoeff();
  std::vector<int> lmin(w0.p.n, nq0), lmax(w0.p.n, -1);
  for (int kp = 0; kp < w0.p.n; ++kp)
    for (int l = 0; l < nq0; ++l)
      if (std::abs(w0.values(kp, l)) > floor) {
        lmin[kp] = std::min(lmin[kp], l);
        lmax[kp] = l;
      }

  PhaseGrid out{p_out, q_out, PhaseGrid::Matrix::Zero(p_out.n, q_out.n)};
  std::vector<double> wq;
  for (int i = 0; i < p_out.n; ++i) {
    const double p = p_out.at(i);
    for (int kp = 0; kp < w0.p.n; ++kp) {
      if (lmax[kp] < 0) continue;
      const double p0 = w0.p.at(kp);
      const double dp = p - p0;
      if (std::abs(dp) > wp_half) continue;
      const double wp = kernel_weight(mup, dp, hp);
      if (wp < 1e-300) continue;
      const double shift = p0 * t / s.m + k.sig * dp / (2.0 * k.nu);
      // offsets d = (j + j0) - l, kernel at d hq - shift
      const int dlo = static_cast<int>(std::floor((shift - wq_half) / hq));
      const int dhi = static_cast<int>(std::ceil((shift + wq_half) / hq));
      wq.assign(dhi - dlo + 1, 0.0);
      for (int d = dlo; d <= dhi; ++d) wq[d - dlo] = wp * kernel_weight(k.nu, d * hq - shift, hq);
      const auto row = w0.values.row(kp);
      const int j_lo = std::max(0, lmin[kp] + dlo - j0), j_hi = std::min(q_out.n - 1, lmax[kp] + dhi - j0);
      for (int j = j_lo; j <= j_hi; ++j) {
        const int jj = j + j0;
        const int l_hi = std::min(lmax[kp], jj - dlo), l_lo = std::max(lmin[kp], jj - dhi);
        double acc = 0.0;
        for (int l = l_lo; l <= l_hi; ++l) acc += wq[jj - l - dlo] * row(l);
        out.values(i, j) += acc;
      }
    }
  }
  out.values *= norm;
  const double mass = out.integral();
  if (mass > 0.0) out.values /= mass;
  return out;
}

// ---- positivity ------------------------------------------------------------------------

double positivity_coefficient_published() { return std::sqrt(std::sqrt(3.0) / 2.0); }
double positivity_coefficient_rederived() { return std::sqrt(std::sqrt(3.0) / 4.0); }

namespace {

void check_times(std::span<const double> ts) {
  if (ts.empty()) throw DomainError("t_list", "empty");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0.0)) throw DomainError("t_list", "times must be positive");
    if (i > 0 && !(ts[i] > ts[i - 1])) throw DomainError("t_list", "times must be increasing");
  }
}

template <typename Eval>
PositivityReport scan_with(Eval eval, std::span<const double> t_list, const DerivedScales& s, bool refine) {
  check_times(t_list);
  PositivityReport r;
  const double tl = std::sqrt(s.hbar / (s.gamma * s.kT));
  r.t_bound_published = positivity_coefficient_published() * tl;
  r.t_bound_rederived = positivity_coefficient_rederived() * tl;
  auto ok = [&](const PositivityPoint& pt) { return pt.min_w >= -r.eps_rel * pt.max_w; };
  std::optional<double> last_bad;
  for (double t : t_list) {
    const PositivityPoint pt = eval(t);
    r.scan.push_back(pt);
    if (ok(pt)) {
      if (!r.t_first) r.t_first = t;
    } else {
      last_bad = t;
      r.t_first.reset();
    }
  }
  if (refine && r.t_first && last_bad && *last_bad < *r.t_first) {
    double lo = *last_bad, hi = *r.t_first;
    for (int it = 0; it < 40 && hi - lo > 1e-6 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(eval(mid)) ? hi : lo) = mid;
    }
    r.t_crossing = hi;
  }
  return r;
}

}  // namespace

PositivityReport positivity_scan(const PhaseGrid& w0, std::span<const double> t_list, const DerivedScales& s) {
  auto eval = [&](double t) {
    const PhaseGrid w = evolve_wigner(w0, t, s);
    return PositivityPoint{t, w.min(), w.max()};
  };
  return scan_with(eval, t_list, s, false);
}

PositivityReport positivity_scan(const PhaseMixture& w0, const Axis& p, const Axis& q, std::span<const double> t_list,
                                 const DerivedScales& s, bool refine) {
  auto eval = [&](double t) {
    const PhaseGrid w = sample(propagate(w0, t, s), p, q);
    return PositivityPoint{t, w.min(), w.max()};
  };
  return scan_with(eval, t_list, s, refine);
}

// ---- f distribution --------------------------------------------------------------------

FDistribution f_distribution(const GaussianState& psi0, const Axis& p, const Axis& q, double t, const DerivedScales& s,
                             const Frame& frame, int check_points, FKernelForm form) {
  if (form == FKernelForm::Exact) check_f_kernel_domain(t, s);
  const GaussianState psi = normalized(psi0, s.hbar);
  const GaussianDensity rho0 = density_from_state(psi, s.hbar);
  FDistribution out;
  out.f = sample(transform(f_mixture(rho0, t, s, form), frame), p, q);
  if (check_points > 0 && form == FKernelForm::Exact) {
    const auto integrand = inversion_integrand(apply_j(rho0, make_j_kernel(t, s)), s);
    const double peak = out.f.values.cwiseAbs().maxCoeff();
    const int sp = std::max(1, (p.n - 1) / std::max(1, check_points - 1));
    const int sq = std::max(1, (q.n - 1) / std::max(1, check_points - 1));
    double dev = 0.0;
    int count = 0;
    for (int i = 0; i < p.n; i += sp)
      for (int j = 0; j < q.n; j += sq) {
        const Eigen::Vector2d u = frame.from_frame(Eigen::Vector2d(p.at(i), q.at(j)));
        dev = std::max(dev, std::abs(inversion_value(integrand, u(0), u(1)) - out.f.values(i, j)) / peak);
        ++count;
      }
    out.route_deviation = dev;
    out.route_points = count;
  }
  return out;
}

FDistribution f_distribution(const DensityGrid& rho0, double t, const DerivedScales& s, int q_stride, FKernelForm form) {
  if (form == FKernelForm::Exact) check_f_kernel_domain(t, s);
  DensityGrid r0 = rho0;
  r0.normalize();
  const DensityGrid tilde = rotated_propagation(r0, t, s, f_form(t, s, form));
  FDistribution out;
  out.f = wigner_transform(tilde, s.hbar, q_stride);
  out.f.normalize();
  return out;
}

}  // namespace qbm
