// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qbm/gaussian.hpp"
#include "qbm/model.hpp"

namespace qbm {

// Uniform axis including both endpoints.
struct Axis {
  double min = -1.0;
  double max = 1.0;
  int n = 2;

  double step() const { return (max - min) / (n - 1); }
  double at(int i) const { return min + i * step(); }
  std::vector<double> points() const;
  // Trapezoid weight of node i.
  double weight(int i) const { return (i == 0 || i == n - 1) ? 0.5 * step() : step(); }
  bool matches(const Axis& o) const;
};

Axis centered_axis(double center, double half_width, int n);

// rho(x_i, x_j), row index x, column index y, same axis in both.
struct DensityGrid {
  Axis x;
  Eigen::MatrixXcd values;

  cd trace() const;
  double purity() const;
  // max |rho - rho^dagger| / max |rho|
  double hermiticity_error() const;
  DensityGrid& normalize();
  // W^(1/2) rho W^(1/2) with trapezoid weights W: the matrix whose eigenvalues
  // approximate the operator spectrum.
  Eigen::MatrixXcd weighted() const;
};

// g(p_i, q_j), row index p, column index q, stored row-major (C order).
struct PhaseGrid {
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Axis p;
  Axis q;
  Matrix values;

  double integral() const;
  double min() const { return values.minCoeff(); }
  double max() const { return values.maxCoeff(); }
  PhaseGrid& normalize();
};

void require_matching(const DensityGrid& a, const DensityGrid& b);
void require_matching(const PhaseGrid& a, const PhaseGrid& b);

// 1/2 || a - b ||_1 from the eigenvalues of the Hermitian weighted difference.
double trace_distance(const DensityGrid& a, const DensityGrid& b);
double min_eigenvalue(const DensityGrid& rho);

DensityGrid sample(const GaussianDensity& rho, const Axis& x);
DensityGrid sample(const GaussianState& psi, const Axis& x, double hbar);

// Relative sup-norm deviation sup|a - b| / sup|b|.
double sup_relative_deviation(const PhaseGrid& a, const PhaseGrid& b);

}  // namespace qbm
