// SPDX-License-Identifier: Apache-2.0
#include "qbm/grid.hpp"

#include <cmath>

#include "qbm/errors.hpp"

namespace qbm {

std::vector<double> Axis::points() const {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = at(i);
  return v;
}

bool Axis::matches(const Axis& o) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(max - min));
  return n == o.n && std::abs(min - o.min) <= tol && std::abs(max - o.max) <= tol;
}

Axis centered_axis(double center, double half_width, int n) {
  if (n < 2) throw DomainError("n", "an axis needs at least two points");
  if (!(half_width > 0.0)) throw DomainError("half_width", "must be positive");
  return {center - half_width, center + half_width, n};
}

cd DensityGrid::trace() const {
  cd s{0.0, 0.0};
  for (int i = 0; i < x.n; ++i) s += x.weight(i) * values(i, i);
  return s;
}

double DensityGrid::purity() const {
  const Eigen::MatrixXcd w = weighted();
  const double tr = w.diagonal().real().sum();
  return w.cwiseAbs2().sum() / (tr * tr);
}

double DensityGrid::hermiticity_error() const {
  const double peak = values.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  return (values - values.adjoint()).cwiseAbs().maxCoeff() / peak;
}

DensityGrid& DensityGrid::normalize() {
  const cd tr = trace();
  if (!(tr.real() > 0.0)) throw DomainError("rho", "trace is not positive");
  values /= tr.real();
  return *this;
}

Eigen::MatrixXcd DensityGrid::weighted() const {
  Eigen::VectorXd w(x.n);
  for (int i = 0; i < x.n; ++i) w(i) = std::sqrt(x.weight(i));
  return w.asDiagonal() * values * w.asDiagonal();
}

double PhaseGrid::integral() const {
  double s = 0.0;
  for (int i = 0; i < p.n; ++i) {
    double r = 0.0;
    for (int j = 0; j < q.n; ++j) r += q.weight(j) * values(i, j);
    s += p.weight(i) * r;
  }
  return s;
}

PhaseGrid& PhaseGrid::normalize() {
  const double s = integral();
  if (!(s > 0.0)) throw DomainError("phase_grid", "integral is not positive");
  values /= s;
  return *this;
}

void require_matching(const DensityGrid& a, const DensityGrid& b) {
  if (!a.x.matches(b.x)) throw DomainError("grid", "density grids do not match");
}

void require_matching(const PhaseGrid& a, const PhaseGrid& b) {
  if (!a.p.matches(b.p) || !a.q.matches(b.q)) throw DomainError("grid", "phase grids do not match");
}

namespace {
Eigen::VectorXd hermitian_eigenvalues(Eigen::MatrixXcd m) {
  m = 0.5 * (m + m.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw DomainError("rho", "eigen-decomposition failed");
  return es.eigenvalues();
}
}  // namespace

double trace_distance(const DensityGrid& a, const DensityGrid& b) {
  require_matching(a, b);
  DensityGrid d{a.x, a.values - b.values};
  return 0.5 * hermitian_eigenvalues(d.weighted()).cwiseAbs().sum();
}

double min_eigenvalue(const DensityGrid& rho) { return hermitian_eigenvalues(rho.weighted()).minCoeff(); }

DensityGrid sample(const GaussianDensity& rho, const Axis& x) {
  DensityGrid g{x, Eigen::MatrixXcd::Zero(x.n, x.n)};
  const auto pts = x.points();
  for (const auto& t : rho.terms) {
    // exponent = -A00 x^2 - 2 A01 x y - A11 y^2 + b0 x + b1 y + c
    for (int j = 0; j < x.n; ++j) {
      const double y = pts[j];
      const cd ey = -t.A(1, 1) * y * y + t.b(1) * y + t.c;
      const cd lin = t.b(0) - 2.0 * t.A(0, 1) * y;
      for (int i = 0; i < x.n; ++i) {
        const double xv = pts[i];
        const cd e = ey + xv * (lin - t.A(0, 0) * xv);
        if (e.real() > -700.0) g.values(i, j) += std::exp(e);
      }
    }
  }
  return g;
}

DensityGrid sample(const GaussianState& psi, const Axis& x, double hbar) {
  return sample(density_from_state(psi, hbar), x);
}

double sup_relative_deviation(const PhaseGrid& a, const PhaseGrid& b) {
  require_matching(a, b);
  return (a.values - b.values).cwiseAbs().maxCoeff() / b.values.cwiseAbs().maxCoeff();
}

}  // namespace qbm
