// SPDX-License-Identifier: Apache-2.0
#include "qbm/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qbm/errors.hpp"

namespace qbm {

using std::numbers::pi;
using Mat2c = Eigen::Matrix<cd, 2, 2>;

double PhaseMixture::operator()(double p, double q) const {
  const Eigen::Vector2d v(p, q);
  cd s{0.0, 0.0};
  for (const auto& t : terms) s += t.value(v);
  return s.real();
}

double PhaseMixture::integral() const {
  cd s{0.0, 0.0};
  for (const auto& t : terms) s += std::exp(integrate_all(t, "phase_mixture"));
  return s.real();
}

PhaseMoments moments(const PhaseMixture& w) {
  cd mass{0.0, 0.0};
  Eigen::Vector2cd first = Eigen::Vector2cd::Zero();
  Mat2c second = Mat2c::Zero();
  for (const auto& t : w.terms) {
    const auto m = raw_moments(t, "phase_mixture");
    mass += m.mass;
    first += m.first;
    second += m.second;
  }
  PhaseMoments r;
  r.mass = mass.real();
  if (!(r.mass > 0.0)) throw DomainError("phase_mixture", "total mass is not positive");
  r.mean = first.real() / r.mass;
  r.cov = second.real() / r.mass - r.mean * r.mean.transpose();
  return r;
}

PhaseGrid sample(const PhaseMixture& w, const Axis& p, const Axis& q) {
  PhaseGrid g{p, q, PhaseGrid::Matrix::Zero(p.n, q.n)};
  const auto ps = p.points();
  const auto qs = q.points();
  for (const auto& t : w.terms) {
    for (int i = 0; i < p.n; ++i) {
      const double pv = ps[i];
      const cd ep = -t.A(0, 0) * pv * pv + t.b(0) * pv + t.c;
      const cd lin = t.b(1) - 2.0 * t.A(0, 1) * pv;
      for (int j = 0; j < q.n; ++j) {
        const double qv = qs[j];
        const cd e = ep + qv * (lin - t.A(1, 1) * qv);
        if (e.real() > -700.0) g.values(i, j) += std::exp(e).real();
      }
    }
  }
  return g;
}

PhaseMixture wigner_mixture(const GaussianDensity& rho, double hbar) {
  PhaseMixture w;
  for (const auto& t : rho.terms) w.terms.push_back(wigner_term(t, hbar));
  return w;
}

GaussianDensity density_mixture(const PhaseMixture& w, double hbar) {
  GaussianDensity rho;
  for (const auto& t : w.terms) rho.terms.push_back(density_term(t, hbar));
  return rho;
}

PhaseMixture propagate(const PhaseMixture& w0, double t, const DerivedScales& s) {
  if (!(t > 0.0)) throw DomainError("t", "must be positive");
  PhaseMixture out;
  if (s.D == 0.0) {
    Mat2c shear = Mat2c::Identity();
    shear(1, 0) = -t / s.m;
    for (const auto& term : w0.terms) out.terms.push_back(substitute<2, 2>(term, shear));
    return out;
  }
  const QuadExp<4> k = wigner_kernel_quadexp(wigner_kernel(t, s));
  for (const auto& term : w0.terms)
    out.terms.push_back(integrate_tail<2>(k * embed<4, 2>(term, {2, 3}), "wigner_propagation"));
  return out;
}

PhaseMixture smooth(const PhaseMixture& w, const Eigen::Matrix2d& cov) {
  const Eigen::Matrix2d prec = cov.inverse();
  // kernel exp(-(v - v')^T prec (v - v') / 2) / (2 pi sqrt det) over (p, q, p', q')
  QuadExp<4> k;
  Eigen::Matrix<double, 2, 4> d;
  d << 1, 0, -1, 0, 0, 1, 0, -1;
  k.A = (0.5 * d.transpose() * prec * d).cast<cd>();
  k.c = -std::log(2.0 * pi * std::sqrt(cov.determinant()));
  PhaseMixture out;
  for (const auto& term : w.terms)
    out.terms.push_back(integrate_tail<2>(k * embed<4, 2>(term, {2, 3}), "smoothing"));
  return out;
}

Eigen::Matrix2d husimi_covariance(double sigma_q, double hbar) {
  if (!(sigma_q > 0.0)) throw DomainError("sigma_q", "must be positive");
  Eigen::Matrix2d c = Eigen::Matrix2d::Zero();
  c(0, 0) = hbar * hbar / (4.0 * sigma_q * sigma_q);
  c(1, 1) = sigma_q * sigma_q;
  return c;
}

PhaseMixture f_mixture(const GaussianDensity& rho0, double t, const DerivedScales& s, FKernelForm form) {
  const QuadExp<4> k = f_kernel_quadexp(t, s, form);
  PhaseMixture out;
  for (const auto& term : rho0.terms)
    out.terms.push_back(integrate_tail<2>(k * embed<4, 2>(term, {2, 3}), "f_distribution"));
  return out;
}

std::vector<QuadExp<3>> inversion_integrand(const GaussianDensity& rho_t, const DerivedScales& s) {
  using Vec4 = QuadExp<4>::Vec;
  const double ma = s.m * s.alpha / s.hbar;
  // variables (p, q, xi, Y); x = q + xi/2 + iY, y = q - xi/2 + iY
  Eigen::Matrix<cd, 2, 4> T;
  T << 0.0, 1.0, 0.5, cd(0, 1), 0.0, 1.0, -0.5, cd(0, 1);
  const Vec4 ep = QuadExp<4>::unit(0), exi = QuadExp<4>::unit(2), ey = QuadExp<4>::unit(3);
  std::vector<QuadExp<3>> out;
  for (const auto& term : rho_t.terms) {
    QuadExp<4> g = substitute<2, 4>(term, T);
    g.add_square(-ma, ey);
    g.add_square(0.25 * ma, exi);
    g.add_product(ma, exi, ey);
    g.add_product(cd(0.0, -1.0 / s.hbar), ep, exi);
    g.c += std::log(std::sqrt(ma / pi) / (2.0 * pi * s.hbar));
    out.push_back(integrate_tail<1>(g, "inversion"));
  }
  return out;
}

double inversion_value(const std::vector<QuadExp<3>>& integrand, double p, double q) {
  cd total{0.0, 0.0};
  for (const auto& g : integrand) {
    // exponent in xi: -a xi^2 + b xi + c
    const cd a = g.A(2, 2);
    if (!(a.real() > 0.0)) throw DivergentIntegral("xi", "inversion integrand does not decay in xi");
    const cd b = g.b(2) - 2.0 * (g.A(0, 2) * p + g.A(1, 2) * q);
    const cd c = -g.A(0, 0) * p * p - 2.0 * g.A(0, 1) * p * q - g.A(1, 1) * q * q + g.b(0) * p + g.b(1) * q + g.c;
    const double center = (b / (2.0 * a)).real();
    const double half = 10.0 / std::sqrt(a.real());
    const int n = std::min(20001, static_cast<int>(200 * (1.0 + std::abs(a.imag() / a.real()))) | 1);
    const double h = 2.0 * half / (n - 1);
    cd s{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
      const double xi = center - half + k * h;
      const cd e = -a * xi * xi + b * xi + c;
      s += ((k == 0 || k == n - 1) ? 0.5 : 1.0) * std::exp(e);
    }
    total += s * h;
  }
  return total.real();
}

Eigen::Matrix2d coherent_covariance(cd Lambda, double hbar) {
  if (!(Lambda.real() > 0.0)) throw DomainError("Lambda", "non-normalizable width (Re <= 0)");
  const double lr = Lambda.real();
  Eigen::Matrix2d c;
  c(0, 0) = hbar * hbar * std::norm(Lambda) / (2.0 * lr);
  c(0, 1) = c(1, 0) = -hbar * Lambda.imag() / (2.0 * lr);
  c(1, 1) = 1.0 / (2.0 * lr);
  return c;
}

cd width_from_covariance(const Eigen::Matrix2d& cov, double hbar) {
  if (!(cov(1, 1) > 0.0)) throw DomainError("cov", "position variance must be positive");
  return {1.0 / (2.0 * cov(1, 1)), -cov(0, 1) / (hbar * cov(1, 1))};
}

namespace {
// g(v') = f(S^-1 v' + center)
QuadExp<2> pull_back(const QuadExp<2>& f, const Frame& fr) {
  const Mat2c T = fr.S.inverse().cast<cd>();
  const Eigen::Vector2cd c = fr.center.cast<cd>();
  return substitute<2, 2>(f, T, c);
}
}  // namespace

PhaseMixture transform(const PhaseMixture& w, const Frame& f) {
  if (std::abs(f.S.determinant() - 1.0) > 1e-9) throw DomainError("frame", "map is not symplectic");
  PhaseMixture out;
  for (const auto& t : w.terms) out.terms.push_back(pull_back(t, f));
  return out;
}

GaussianDensity transform(const GaussianDensity& rho, const Frame& f, double hbar) {
  return density_mixture(transform(wigner_mixture(rho, hbar), f), hbar);
}

cd transform_width(cd Lambda, const Frame& f, double hbar) {
  return width_from_covariance(f.S * coherent_covariance(Lambda, hbar) * f.S.transpose(), hbar);
}

Frame compact_frame(const PhaseMoments& w, cd Lambda, const DerivedScales& s) {
  const Eigen::Matrix2d sp = coherent_covariance(Lambda, s.hbar);
  const Eigen::Matrix2d L = sp.llt().matrixL();
  const Eigen::Matrix2d T0 = std::sqrt(0.5 * s.hbar) * L.inverse();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(T0 * w.cov * T0.transpose());
  Eigen::Matrix2d R;
  R.row(0) = es.eigenvectors().col(0).transpose();  // short axis -> p
  R.row(1) = es.eigenvectors().col(1).transpose();  // long axis -> q
  if (R.determinant() < 0.0) R.row(0) *= -1.0;
  const double ma = s.m * s.alpha;
  const Eigen::Matrix2d Uinv = Eigen::Vector2d(std::sqrt(ma), 1.0 / std::sqrt(ma)).asDiagonal();
  Frame f;
  f.S = Uinv * R * T0;
  f.center = w.mean;
  return f;
}

}  // namespace qbm
