// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qbm/errors.hpp"
#include "qbm/kernels.hpp"

using namespace qbm;

namespace {
const DerivedScales unit = derive_scales({1, 1, 1, 1});

DrivingPath sample_path(double t, int n, double (*f)(double)) {
  DrivingPath p;
  p.t = t;
  p.xbar.resize(n);
  for (int i = 0; i < n; ++i) p.xbar[i] = f(t * i / (n - 1));
  return p;
}
double smooth_path(double s) { return 0.6 * std::sin(1.3 * s) + 0.2 * s - 0.1 * s * s + 0.3; }
}  // namespace

// ---- J ----

TEST(JKernel, HandValue) {
  const auto k = make_j_kernel(1.0, unit);
  const cd e = j_exponent(k, 1, 0, 0, 0);
  EXPECT_NEAR(e.real(), -2.0 / 3.0, 1e-15);
  EXPECT_NEAR(e.imag(), 0.5, 1e-15);
}

TEST(JKernel, DiagonalIsPurePhase) {
  const auto k = make_j_kernel(0.7, unit);
  EXPECT_DOUBLE_EQ(j_exponent(k, 1.3, 1.3, -0.4, -0.4).real(), 0.0);
}

TEST(JKernel, HermiticityAndDecay) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5, 5);
  const auto k = make_j_kernel(1.7, derive_scales({0.5, 2.0, 0.3, 1.5}));
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng), y = u(rng), x0 = u(rng), y0 = u(rng);
    const cd a = j_exponent(k, x, y, x0, y0);
    EXPECT_NEAR(std::abs(a - std::conj(j_exponent(k, y, x, y0, x0))), 0.0, 1e-12);
    EXPECT_LE(a.real(), 0.0);
    EXPECT_NEAR(std::abs(a - j_quadexp(k).exponent(Eigen::Vector4d(x, y, x0, y0))), 0.0, 1e-11);
  }
  EXPECT_THROW(make_j_kernel(0.0, unit), DomainError);
}

TEST(JKernel, NormalizationRecoveredByTracePreservation) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  for (int i = 0; i < 20; ++i) {
    const auto s = derive_scales({u(rng), u(rng), u(rng), u(rng)});
    const auto k = make_j_kernel(u(rng), s);
    const cd n = j_normalization(k);
    EXPECT_NEAR(n.real(), j_normalization_analytic(k), 1e-12);
    EXPECT_NEAR(n.imag(), 0.0, 1e-12);
  }
}

TEST(JKernel, MatchesDirectQuadrature) {
  // rho_t(x, y) from a 2-D quadrature of J against a Gaussian rho0.
  const auto psi0 = cat_state(2.0, 1.0, 1.0);
  const auto rho0 = density_from_state(psi0, 1.0);
  const double t = 0.6;
  const auto k = make_j_kernel(t, unit);
  const auto rt = apply_j(rho0, k);
  const double pref = 1.0 / (2.0 * oracle::pi * t);
  for (auto [x, y] : {std::pair{0.3, -0.2}, std::pair{1.1, 0.9}, std::pair{-1.0, 0.5}}) {
    const cd ref = oracle::gauss_legendre(-9, 9, 90, [&](double x0) {
      return oracle::gauss_legendre(-9, 9, 90, [&](double y0) {
        return pref * std::exp(j_exponent(k, x, y, x0, y0)) * rho0(x0, y0);
      });
    });
    EXPECT_NEAR(std::abs(rt(x, y) - ref), 0.0, 1e-9 * std::max(1.0, std::abs(ref)));
  }
  EXPECT_NEAR(std::abs(rt.trace() - 1.0), 0.0, 1e-12);
}

TEST(JKernel, SemigroupExact) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  for (int i = 0; i < 10; ++i) {
    const auto rho0 = density_from_state(cat_state(1.0 + 3.0 * u(rng), u(rng), 1.0), 1.0);
    const double t1 = u(rng), t2 = u(rng);
    const auto a = apply_j(apply_j(rho0, make_j_kernel(t1, unit)), make_j_kernel(t2, unit));
    const auto b = apply_j(rho0, make_j_kernel(t1 + t2, unit));
    for (std::size_t j = 0; j < a.terms.size(); ++j) {
      EXPECT_NEAR((a.terms[j].A - b.terms[j].A).norm(), 0.0, 1e-12);
      EXPECT_NEAR((a.terms[j].b - b.terms[j].b).norm(), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(std::exp(a.terms[j].c - b.terms[j].c) - 1.0), 0.0, 1e-12);
    }
  }
}

// ---- K_xbar ----

TEST(KbarCoeffs, ZeroPathGivesZeroDriving) {
  DrivingPath p;
  p.t = 2.0;
  p.xbar.assign(33, 0.0);
  const auto c = kbar_coeffs(p, unit);
  EXPECT_EQ(c.c3, cd(0));
  EXPECT_EQ(c.c4, cd(0));
  EXPECT_EQ(c.c5, cd(0));
  p.xbar.resize(2);
  EXPECT_THROW(kbar_coeffs(p, unit), DomainError);
}

TEST(KbarCoeffs, LateTimeLimits) {
  for (auto s : {unit, derive_scales({2.0, 0.5, 1.5, 0.8})}) {
    const double t = 10.0 / s.alpha;
    const auto c = kbar_coeffs_free(t, s);
    const double ma = s.m * s.alpha;
    EXPECT_LT(std::abs(c.c1 - 0.5 * ma * cd(1, 1)), 1e-3 * ma);
    EXPECT_LT(std::abs(c.c2) / ma, 4.0 * std::exp(-10.0));
  }
}

TEST(KbarCoeffs, PqFromC3) {
  KernelCoeffs c;
  c.c3 = 0.0;
  auto pq = pq_from_c3(c, unit);
  EXPECT_EQ(pq.p, 0.0);
  EXPECT_EQ(pq.q, 0.0);
  c.c3 = 1.0;
  pq = pq_from_c3(c, unit);
  EXPECT_DOUBLE_EQ(pq.q, 1.0);
  EXPECT_DOUBLE_EQ(pq.p, 1.0);
  c.c3 = cd(0, 1);
  pq = pq_from_c3(c, unit);
  EXPECT_DOUBLE_EQ(pq.q, 0.0);
  EXPECT_DOUBLE_EQ(pq.p, 1.0);
}

TEST(KbarCoeffs, LateTimeKernelEmitsCoherentState) {
  // For alpha t >> 1 the x_f dependence is exp((i/hbar) c1 x^2 + c3 x), i.e. a
  // coherent state at (pbar, qbar) up to a constant.
  const double t = 12.0;
  const auto c = kbar_coeffs(sample_path(t, 401, smooth_path), unit);
  const auto pq = pq_from_c3(c, unit);
  const auto g = to_quadexp(coherent_state(pq, unit), 1.0);
  auto gap = [&](double x) {
    return cd(0, 1) * c.c1 * x * x + c.c3 * x - g.exponent(Eigen::Matrix<double, 1, 1>::Constant(x));
  };
  // exponents differ by an x-independent constant (mod 2 pi i)
  for (double x : {-1.0, 0.5, 2.0}) EXPECT_NEAR(std::abs(std::exp(gap(x) - gap(0.0)) - 1.0), 0.0, 1e-8);
}

TEST(KbarCoeffs, QuadratureConvergesAtFourthOrder) {
  const double t = 3.0;
  const auto ref = kbar_coeffs(sample_path(t, 4097, smooth_path), unit);
  double prev[3] = {0, 0, 0};
  for (int n : {17, 33, 65, 129}) {
    const auto c = kbar_coeffs(sample_path(t, n, smooth_path), unit);
    const double e[3] = {std::abs(c.c3 - ref.c3), std::abs(c.c4 - ref.c4), std::abs(c.c5 - ref.c5)};
    if (n > 17)
      for (int k = 0; k < 3; ++k) EXPECT_GE(prev[k] / e[k], 8.0) << "n=" << n << " coeff " << k + 3;
    std::copy(e, e + 3, prev);
  }
}

TEST(KbarCoeffs, MatchIndependentQuadrature) {
  const double t = 2.0;
  const auto c = kbar_coeffs(sample_path(t, 2049, smooth_path), unit);
  const cd w = unit.omega;
  const double a2 = unit.a_sq;
  const cd sn = std::sin(w * t);
  const cd c3 = 2.0 * a2 / sn *
                oracle::gauss_legendre(0, t, 40, [&](double s) { return smooth_path(s) * std::sin(w * s); });
  const cd c4 = 2.0 * a2 / sn *
                oracle::gauss_legendre(0, t, 40, [&](double s) { return smooth_path(s) * std::sin(w * (t - s)); });
  const cd c5 = 4.0 * cd(0, 1) * a2 * a2 / (w * sn) * oracle::gauss_legendre(0, t, 40, [&](double s) {
                  return smooth_path(s) * std::sin(w * (t - s)) *
                         oracle::gauss_legendre(0, s, 10, [&](double sp) { return smooth_path(sp) * std::sin(w * sp); });
                });
  EXPECT_NEAR(std::abs(c.c3 - c3) / std::abs(c3), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(c.c4 - c4) / std::abs(c4), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(c.c5 - c5) / std::abs(c5), 0.0, 1e-10);
}

TEST(KbarKernel, IsForcedComplexOscillatorPropagator) {
  // With force F(s) = -2 i hbar a^2 xbar(s), the Schroedinger propagator for
  // frequency omega reproduces c3, c4 and the a^4 in c5.
  const double t = 1.5;
  const auto path = sample_path(t, 2049, smooth_path);
  const auto c = kbar_coeffs(path, unit);
  GaussianComponent g;
  g.L = cd(1.1, 0.3);
  g.q0 = -0.3;
  g.p0 = 0.5;
  const auto out = apply_gaussian_kernel(GaussianState{{g}}, kbar_kernel(c, unit), 1.0);
  const auto f0 = to_quadexp(g, 1.0);
  const auto ref = oracle::riccati_evolve(
      {f0.A(0, 0), f0.b(0), f0.c}, unit.omega,
      [&](double s) { return cd(0, -2.0) * unit.a_sq * smooth_path(s); }, t, 1.0, 1.0, 40000);
  const auto f1 = to_quadexp(out.components[0], 1.0);
  EXPECT_NEAR(std::abs(f1.A(0, 0) - ref.a), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(f1.b(0) - ref.b) / std::abs(ref.b), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(std::exp(f1.c + unit.a_sq * c.xbar_sq_integral - ref.c) - 1.0), 0.0, 1e-7);
}

// ---- Wigner kernel ----

TEST(WignerKernel, UnitValues) {
  const auto k = wigner_kernel(1.0, unit);
  EXPECT_DOUBLE_EQ(k.mu, 0.5);
  EXPECT_DOUBLE_EQ(k.nu, 1.5);
  EXPECT_DOUBLE_EQ(k.sig, 1.5);
  EXPECT_NEAR(k.discriminant(), 0.1875, 1e-15);
  EXPECT_NEAR(k.exponent(0.7, 0.4 + 0.7, 0.7, 0.4), 0.0, 1e-15);
  EXPECT_THROW(wigner_kernel(-1.0, unit), DomainError);
}

TEST(WignerKernel, DiscriminantFormula) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 500; ++i) {
    const auto s = derive_scales({u(rng), u(rng), u(rng), u(rng)});
    const double t = u(rng);
    const auto k = wigner_kernel(t, s);
    const double ref = 3.0 * s.m * s.m / (4.0 * s.D * s.D * std::pow(t, 4));
    EXPECT_NEAR(k.discriminant() / ref, 1.0, 1e-12);
  }
}

TEST(WignerKernel, NormalizedOverPhaseSpace) {
  const auto k = wigner_kernel(0.8, unit);
  const double p0 = 0.4, q0 = -0.2;
  const double z = oracle::gauss_legendre(-15, 15, 60, [&](double p) {
    return oracle::gauss_legendre(-15, 15, 60, [&](double q) { return std::exp(k.exponent(p, q, p0, q0) + k.log_norm()); });
  });
  EXPECT_NEAR(z, 1.0, 1e-10);
}

// ---- f-kernel ----

TEST(FKernel, DomainBound) {
  const double u = f_kernel_min_alpha_t();
  EXPECT_GT(u, 0.5);
  EXPECT_LT(u, 0.7);
  EXPECT_THROW(f_kernel(0, 0, 0, 0, 0.9 * u, unit), DivergentIntegral);
  try {
    f_kernel(0, 0, 0, 0, 0.3, unit);
  } catch (const DomainError& e) {
    EXPECT_EQ(e.field(), "alpha_t");
    EXPECT_NE(std::string(e.what()).find("minimal admissible"), std::string::npos);
  }
  EXPECT_NO_THROW(f_kernel(0, 0, 0, 0, 1.1 * u, unit));
}

TEST(FKernel, ClosedFormMatchesXiQuadrature) {
  const double t = 3.0;
  const double u = unit.alpha * t;
  for (auto form : {FKernelForm::Exact, FKernelForm::Approximate}) {
    for (auto v : {Eigen::Vector4d(0.3, 0.2, 0.5, -0.4), Eigen::Vector4d(-1.0, 1.2, 0.1, 0.1)}) {
      const double p = v(0), q = v(1), X0 = 0.5 * (v(2) + v(3)), xi0 = v(2) - v(3);
      const cd ref = oracle::gauss_legendre(-8, 8, 200, [&](double xi) {
        cd e = -cd(0, 1) * p * xi + cd(0, 1) / t * (q - X0) * (xi - xi0) -
               (2.0 * t / 3.0) * (xi * xi + xi * xi0 + xi0 * xi0);
        if (form == FKernelForm::Exact) {
          const double r = xi - (xi - xi0) / u;
          e += 0.25 * (xi * xi + r * r);
        }
        return std::exp(e) / (4.0 * oracle::pi * oracle::pi * t);
      });
      EXPECT_NEAR(std::abs(f_kernel(p, q, v(2), v(3), t, unit, form) - ref), 0.0, 1e-12);
    }
  }
}

TEST(FKernel, PeakOnFreeStreamingLine) {
  const double t = 4.0, x0 = 0.6, q = 1.4;
  const double p_star = (q - x0) / t;
  double best_p = 0, best = -1;
  for (double p = -2; p <= 2; p += 1e-3) {
    const double v = std::abs(f_kernel(p, q, x0, x0, t, unit));
    if (v > best) best = v, best_p = p;
  }
  EXPECT_NEAR(best_p, p_star, 1e-3);
}

TEST(FKernel, PhaseSpaceIntegralEqualsTraceOfPropagatedSource) {
  // Gaussian source in (x0, y0); compare the analytic phase-space integral of
  // f folded with it against the trace of J applied to the same source.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  const double t = 5.0;
  for (int i = 0; i < 5; ++i) {
    GaussianDensity src;
    QuadExp<2> term;
    term.A << cd(0.8 + 0.2 * u(rng), 0.3 * u(rng)), cd(0.1 * u(rng), 0.1 * u(rng)), cd(0, 0),
        cd(0.8 + 0.2 * u(rng), 0.3 * u(rng));
    term.A(1, 0) = term.A(0, 1);
    term.b << cd(u(rng), u(rng)), cd(u(rng), u(rng));
    src.terms.push_back(term);
    const cd trace = apply_j(src, make_j_kernel(t, unit)).trace();
    // fold the source in (x0, y0, xi), leaving a Gaussian in (p, q)
    const auto f = integrate_tail<3>(f_kernel_integrand(t, unit, FKernelForm::Exact) * embed<5, 2>(term, {2, 3}));
    const cd total = oracle::trapezoid(-40, 40, 801, [&](double p) {
      return oracle::trapezoid(-120, 120, 2401, [&](double q) { return f.value(Eigen::Vector2d(p, q)); });
    });
    EXPECT_NEAR(std::abs(total / trace - 1.0), 0.0, 1e-6);
    EXPECT_NEAR(std::abs(std::exp(integrate_all(f)) / trace - 1.0), 0.0, 1e-10);
  }
}

TEST(FKernel, ApproximateFormApproachesExact) {
  // Relative sup-norm gap over (p, q) at fixed source shrinks like 1/(alpha t).
  auto gap = [](double t) {
    double num = 0, den = 0;
    for (double p = -3; p <= 3; p += 0.05)
      for (double q = -3; q <= 3; q += 0.05) {
        const cd a = f_kernel(p, q, 0.2, 0.2, t, unit, FKernelForm::Exact);
        const cd b = f_kernel(p, q, 0.2, 0.2, t, unit, FKernelForm::Approximate);
        num = std::max(num, std::abs(a - b));
        den = std::max(den, std::abs(b));
      }
    return num / den;
  };
  const double g10 = gap(10.0), g20 = gap(20.0);
  EXPECT_LT(g10, 0.05);
  EXPECT_NEAR(g10 / g20, 2.0, 0.3);
}
