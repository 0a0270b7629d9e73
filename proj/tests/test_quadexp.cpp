// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qbm/quadexp.hpp"

using namespace qbm;
using oracle::cd;

namespace {
QuadExp<2> random_form(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  QuadExp<2> f;
  // real part positive definite, arbitrary symmetric imaginary part
  Eigen::Matrix2d R;
  R << 1.0 + 0.5 * u(rng), 0.3 * u(rng), 0.0, 0.8 + 0.5 * u(rng);
  R(1, 0) = R(0, 1);
  Eigen::Matrix2d Im;
  Im << 2.0 * u(rng), u(rng), 0.0, 2.0 * u(rng);
  Im(1, 0) = Im(0, 1);
  f.A = R.cast<cd>() + cd(0, 1) * Im.cast<cd>();
  f.b << cd(u(rng), u(rng)), cd(u(rng), u(rng));
  f.c = cd(0.2 * u(rng), u(rng));
  return f;
}
}  // namespace

TEST(QuadExp, TailIntegralMatchesQuadrature) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_form(rng);
    const auto g = integrate_tail<1>(f);
    for (double x : {-0.7, 0.1, 1.3}) {
      const cd ref = oracle::gauss_legendre(-14.0, 14.0, 200,
                                            [&](double y) { return f.value(Eigen::Vector2d(x, y)); });
      const cd got = g.value(Eigen::Matrix<double, 1, 1>::Constant(x));
      EXPECT_NEAR(std::abs(got - ref) / std::abs(ref), 0.0, 1e-10);
    }
  }
}

TEST(QuadExp, FullIntegralBranchIsContinuous) {
  // A = R + i s S: as s grows the determinant winds; the integral must still
  // match a direct 2-D quadrature.
  QuadExp<2> f;
  for (double s : {0.0, 1.0, 3.0, 7.0, 15.0}) {
    f.A << cd(1.0, 0.3 * s), cd(0.2, -0.5 * s), cd(0.2, -0.5 * s), cd(0.7, 1.1 * s);
    const cd got = std::exp(integrate_all(f));
    const cd ref = oracle::gauss_legendre(-10, 10, 120, [&](double x) {
      return oracle::gauss_legendre(-10, 10, 120, [&](double y) { return f.value(Eigen::Vector2d(x, y)); });
    });
    EXPECT_NEAR(std::abs(got - ref) / std::abs(ref), 0.0, 1e-8) << "s=" << s;
  }
}

TEST(QuadExp, DivergentIntegralThrows) {
  QuadExp<1> f;
  f.A(0, 0) = cd(-0.1, 1.0);
  EXPECT_THROW(integrate_all(f, "x"), DivergentIntegral);
}

TEST(QuadExp, SubstitutionIsComposition) {
  std::mt19937_64 rng(9);
  const auto f = random_form(rng);
  Eigen::Matrix<cd, 2, 2> T;
  T << 1.0, 0.5, -0.3, 2.0;
  Eigen::Matrix<cd, 2, 1> s(0.4, -1.1);
  const auto g = substitute<2, 2>(f, T, s);
  const Eigen::Vector2d w(0.3, -0.2);
  const Eigen::Matrix<cd, 2, 1> v = T * w.cast<cd>() + s;
  EXPECT_NEAR(std::abs(g.exponent(w) - f.exponent(v)), 0.0, 1e-13);
}

TEST(QuadExp, MomentsMatchQuadrature) {
  QuadExp<1> f;
  f.A(0, 0) = cd(0.7, 0.4);
  f.b(0) = cd(0.3, -0.8);
  const auto m = raw_moments(f);
  auto q = [&](int k) {
    return oracle::gauss_legendre(-15, 15, 200, [&](double x) {
      return std::pow(x, k) * f.value(Eigen::Matrix<double, 1, 1>::Constant(x));
    });
  };
  EXPECT_NEAR(std::abs(m.mass - q(0)), 0.0, 1e-11);
  EXPECT_NEAR(std::abs(m.first(0) - q(1)), 0.0, 1e-11);
  EXPECT_NEAR(std::abs(m.second(0, 0) - q(2)), 0.0, 1e-11);
}
