// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qbm/errors.hpp"
#include "qbm/phasespace.hpp"
#include "qbm/warnings.hpp"

using namespace qbm;

namespace {
const DerivedScales unit = derive_scales({1, 1, 1, 1});

std::vector<oracle::Comp> comps(const GaussianState& s) {
  std::vector<oracle::Comp> cs;
  for (const auto& g : s.components) cs.push_back({g.A, g.L, g.q0, g.p0});
  return cs;
}

// W(p, q) of a pure state by direct quadrature over xi
double wigner_oracle(const GaussianState& s, double p, double q) {
  const auto cs = comps(s);
  return oracle::gauss_legendre(-24.0, 24.0, 300, [&](double xi) {
           return (std::exp(-oracle::I * p * xi) * oracle::psi(cs, q + xi / 2, 1.0) *
                   std::conj(oracle::psi(cs, q - xi / 2, 1.0)))
               .real();
         }) /
         (2.0 * oracle::pi);
}

double l1_distance(const PhaseGrid& a, const PhaseGrid& b) {
  double s = 0;
  for (int i = 0; i < a.p.n; ++i)
    for (int j = 0; j < a.q.n; ++j) s += a.p.weight(i) * a.q.weight(j) * std::abs(a.values(i, j) - b.values(i, j));
  return s;
}

GaussianState standard_cat() { return cat_state(4.0, 1.0, 1.0); }
}  // namespace

TEST(Grid, TraceDistanceAgreesWithGeneralEigensolver) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const Axis x{-3, 3, 40};
  Eigen::MatrixXcd a(40, 40), b(40, 40);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) {
      a(i, j) = cd(g(rng), g(rng));
      b(i, j) = cd(g(rng), g(rng));
    }
  a = (a * a.adjoint()).eval();
  b = (b * b.adjoint()).eval();
  DensityGrid A{x, a}, B{x, b};
  // uniform interior weights: compare against the oracle on the weighted matrices
  const double ref = oracle::trace_distance(A.weighted(), B.weighted(), 1.0);
  EXPECT_NEAR(trace_distance(A, B), ref, 1e-10 * ref);
  EXPECT_EQ(trace_distance(A, A), 0.0);
  EXPECT_THROW(trace_distance(A, DensityGrid{Axis{-3, 3, 41}, Eigen::MatrixXcd::Zero(41, 41)}), DomainError);
}

TEST(Grid, OrthogonalProjectorsAreDistanceOne) {
  const Axis x{-15, 15, 301};
  const auto a = sample(GaussianState{{coherent_state({0, -6}, unit)}}, x, 1.0);
  const auto b = sample(GaussianState{{coherent_state({0, 6}, unit)}}, x, 1.0);
  EXPECT_NEAR(trace_distance(a, b), 1.0, 1e-9);
  EXPECT_NEAR(a.trace().real(), 1.0, 1e-12);
}

TEST(EvolveDensity, GridMatchesExactCalculus) {
  const auto cat = standard_cat();
  const Axis x{-12, 12, 256};
  const auto rho0 = sample(cat, x, 1.0);
  drain_warnings();
  const auto grid = evolve_density(rho0, 1.0, unit);
  const auto exact = evolve_density(cat, 1.0, unit, x);
  EXPECT_LE(trace_distance(grid, exact), 1e-3);
  EXPECT_NEAR(grid.trace().real(), 1.0, 1e-12);
  EXPECT_LT(grid.hermiticity_error(), 1e-10);
}

TEST(EvolveDensity, ClosedSystemKeepsPurity) {
  const auto cat = standard_cat();
  const Axis x{-16, 16, 256};
  const auto rho = evolve_density(sample(cat, x, 1.0), 1.0, decoupled(unit));
  EXPECT_NEAR(rho.purity(), 1.0, 1e-6);
}

TEST(EvolveDensity, CoherencesDecayDiagonalPersists) {
  const auto cat = standard_cat();
  const Axis x{-12, 12, 241};
  const int ip = 140, im = 100;  // x = +2, -2
  ASSERT_NEAR(x.at(ip), 2.0, 1e-12);
  double prev_off = 1e9;
  for (double t : {0.05, 0.1, 0.2}) {
    const auto rho = evolve_density(cat, t, unit, x);
    const double off = std::abs(rho.values(ip, im));
    const double diag = std::abs(rho.values(ip, ip));
    EXPECT_LT(off, prev_off);
    EXPECT_GT(diag, 0.5 * std::abs(sample(cat, x, 1.0).values(ip, ip)));
    prev_off = off;
  }
  EXPECT_LT(prev_off, 0.05 * std::abs(sample(cat, x, 1.0).values(ip, im)));
}

TEST(EvolveDensity, PreconditionsAndWarnings) {
  const auto cat = standard_cat();
  EXPECT_THROW(evolve_density(cat, 0.0, unit, Axis{-5, 5, 32}), DomainError);
  const Axis narrow{-3, 3, 64};
  drain_warnings();
  (void)evolve_density(sample(cat, narrow, 1.0), 1.0, unit);
  const auto w = drain_warnings();
  bool leak = false;
  for (const auto& x : w) leak = leak || (x.code == "boundary_leak" && x.value > 1e-12);
  EXPECT_TRUE(leak);
}

TEST(Wigner, MatchesDirectQuadrature) {
  const auto cat = standard_cat();
  const Axis x{-10, 10, 201};
  const auto w = wigner_transform(sample(cat, x, 1.0), 1.0, 10);
  double err = 0;
  for (int i = 0; i < w.p.n; i += 17)
    for (int j = 0; j < w.q.n; ++j) err = std::max(err, std::abs(w.values(i, j) - wigner_oracle(cat, w.p.at(i), w.q.at(j))));
  EXPECT_LT(err, 1e-10);
}

TEST(Wigner, Marginals) {
  GaussianState s = standard_cat();
  s.components[0].p0 = 0.7;
  s = normalized(s, 1.0);
  const Axis x{-10, 10, 200};
  const auto rho = sample(s, x, 1.0);
  const auto w = wigner_transform(rho, 1.0);
  const auto cs = comps(s);
  double ex = 0, ep = 0;
  for (int j = 0; j < w.q.n; ++j) {
    double m = 0;
    for (int i = 0; i < w.p.n; ++i) m += w.p.weight(i) * w.values(i, j);
    ex = std::max(ex, std::abs(m - rho.values(j, j).real()));
  }
  for (int i = 0; i < w.p.n; i += 5) {
    double m = 0;
    for (int j = 0; j < w.q.n; ++j) m += w.q.weight(j) * w.values(i, j);
    const double p = w.p.at(i);
    const cd phi = oracle::gauss_legendre(-12.0, 12.0, 200, [&](double y) {
      return std::exp(-oracle::I * p * y) * oracle::psi(cs, y, 1.0);
    });
    ep = std::max(ep, std::abs(m - std::norm(phi) / (2 * oracle::pi)));
  }
  EXPECT_LT(ex, 1e-6);
  EXPECT_LT(ep, 1e-6);
}

TEST(Wigner, CoherentPositiveCatNegative) {
  const Axis x{-10, 10, 200};
  const auto coh = GaussianState{{coherent_state({0.5, 1.0}, unit)}};
  const auto wc = wigner_transform(sample(coh, x, 1.0), 1.0);
  EXPECT_GE(wc.min(), -1e-12 * wc.max());
  // peak at (p, q) = (0.5, 1.0)
  Eigen::Index ip, iq;
  wc.values.maxCoeff(&ip, &iq);
  EXPECT_NEAR(wc.p.at(ip), 0.5, wc.p.step());
  EXPECT_NEAR(wc.q.at(iq), 1.0, wc.q.step());

  const auto wcat = wigner_transform(sample(standard_cat(), x, 1.0), 1.0);
  EXPECT_LT(wcat.min(), -0.1 * wcat.max());
}

TEST(Wigner, RejectsNonHermitian) {
  const Axis x{-5, 5, 32};
  auto rho = sample(standard_cat(), x, 1.0);
  rho.values(3, 7) += cd(0.0, 0.1);
  EXPECT_THROW(wigner_transform(rho, 1.0), DomainError);
}

TEST(Wigner, ClosedFormDensityRouteMatchesGrid) {
  const auto cat = standard_cat();
  const Axis x{-10, 10, 200};
  const auto wg = wigner_transform(sample(cat, x, 1.0), 1.0, 4);
  const auto wc = wigner_transform(density_from_state(cat, 1.0), wg.p, wg.q, 1.0);
  EXPECT_LT((wg.values - wc.values).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Husimi, NonNegativeForFringedCats) {
  for (double ell : {4.0, 8.0}) {
    for (double p0 : {0.0, 2.0}) {
      const auto cat = cat_state(ell, 1.0, 1.0, p0);
      const Axis x{-14, 14, 280};
      const auto w = wigner_transform(sample(cat, x, 1.0), 1.0);
      ASSERT_LT(w.min(), 0.0);
      const auto h = husimi_from_wigner(w, std::sqrt(0.5), 1.0);
      EXPECT_GE(h.min(), -1e-9) << ell << " " << p0;
      EXPECT_NEAR(h.integral(), 1.0, 1e-6);
    }
  }
}

TEST(Husimi, GaussianWidthsAddInQuadrature) {
  GaussianComponent g;
  g.L = 2.0;
  g.A = std::pow(2.0 / oracle::pi, 0.25);
  const auto st = GaussianState{{g}};
  const Axis x{-10, 10, 200};
  const auto w = wigner_transform(sample(st, x, 1.0), 1.0);
  const double sq = 0.6;
  const auto h = husimi_from_wigner(w, sq, 1.0);
  auto var = [](const PhaseGrid& f, bool along_p) {
    double m = 0, s2 = 0;
    for (int i = 0; i < f.p.n; ++i)
      for (int j = 0; j < f.q.n; ++j) {
        const double wt = f.p.weight(i) * f.q.weight(j) * f.values(i, j);
        const double v = along_p ? f.p.at(i) : f.q.at(j);
        m += wt;
        s2 += wt * v * v;
      }
    return s2 / m;
  };
  EXPECT_NEAR(var(h, false), 0.25 + sq * sq, 1e-8);
  EXPECT_NEAR(var(h, true), 1.0 + 1.0 / (4 * sq * sq), 1e-8);
  EXPECT_THROW(husimi_from_wigner(w, 0.0, 1.0), DomainError);
}

TEST(Husimi, NarrowLimitIsMomentumSmearingOnly) {
  const auto cat = standard_cat();
  const Axis x{-10, 10, 200};
  const auto w = wigner_transform(sample(cat, x, 1.0), 1.0);
  const double sq = w.q.step();
  const auto h = husimi_from_wigner(w, sq, 1.0);
  // reference: smear in p only, kernel normalized over p
  PhaseGrid ref = w;
  const double cp = 2 * sq * sq;
  for (int i = 0; i < w.p.n; ++i)
    for (int j = 0; j < w.q.n; ++j) {
      double s = 0;
      for (int k = 0; k < w.p.n; ++k) s += w.p.weight(k) * std::exp(-cp * std::pow(w.p.at(i) - w.p.at(k), 2)) * w.values(k, j);
      ref.values(i, j) = s * std::sqrt(cp / oracle::pi);
    }
  const double rel = (h.values - ref.values).cwiseAbs().maxCoeff() / ref.values.cwiseAbs().maxCoeff();
  EXPECT_LT(rel, 0.1);
}

TEST(EvolveWigner, RouteEquivalenceWithDensityPath) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double t : {0.5, 1.0, 2.0}) {
    const auto cat = normalized(cat_state(3.0 + u(rng), 1.0 + 0.3 * u(rng), 1.0, 0.5 * u(rng)), 1.0);
    const auto mt = state_moments(cat, t, unit);
    const Axis x = density_axis(mt, 1.0, 6.5, true);
    const auto w0 = wigner_transform(sample(cat, x, 1.0), 1.0);
    const auto wt = evolve_wigner(w0, t, unit);
    const auto wd = wigner_transform(evolve_density(sample(cat, x, 1.0), t, unit), 1.0);
    EXPECT_LT(l1_distance(wt, wd), 1e-3) << t;
  }
}

TEST(EvolveWigner, MomentumVarianceGrowsBy2Dt) {
  GaussianComponent g;
  g.L = 4.0;
  g.p0 = 1.0;
  g.A = std::pow(4.0 / oracle::pi, 0.25);
  const auto st = GaussianState{{g}};
  const double t = 0.3;
  const auto m0 = state_moments(st, 0.0, unit);
  const Axis pa{-12, 12, 241}, qa{-8, 8, 161};
  const auto w0 = sample(wigner_mixture(density_from_state(st, 1.0), 1.0), pa, qa);
  const auto wt = evolve_wigner(w0, t, unit);
  double m = 0, mp = 0, mq = 0, pp = 0;
  for (int i = 0; i < pa.n; ++i)
    for (int j = 0; j < qa.n; ++j) {
      const double wt_ = pa.weight(i) * qa.weight(j) * wt.values(i, j);
      m += wt_;
      mp += wt_ * pa.at(i);
      mq += wt_ * qa.at(j);
      pp += wt_ * pa.at(i) * pa.at(i);
    }
  mp /= m;
  mq /= m;
  EXPECT_NEAR(mp, 1.0, 1e-7);
  EXPECT_NEAR(mq, t, 1e-7);  // free streaming p0 t / m
  EXPECT_NEAR(pp / m - mp * mp - m0.cov(0, 0), 2.0 * unit.D * t, 1e-6);
}

TEST(EvolveWigner, IdentityLimit) {
  const auto st = GaussianState{{coherent_state({0.3, 0.2}, unit)}};
  const Axis pa{-8, 8, 161}, qa{-8, 8, 161};
  const auto w0 = sample(wigner_mixture(density_from_state(st, 1.0), 1.0), pa, qa);
  double prev = 1e9;
  for (double t : {1e-2, 1e-3, 1e-4}) {
    const auto wt = evolve_wigner(w0, t, unit);
    const double err = (wt.values - w0.values).cwiseAbs().maxCoeff() / w0.max();
    EXPECT_LT(err, prev);
    prev = err;
  }
  // remaining error is linear interpolation, O(h^2)
  EXPECT_LT(prev, 0.01);
}

TEST(EvolveWigner, ExactMixturePropagationMatchesGrid) {
  const auto cat = standard_cat();
  const double t = 1.0;
  const auto mt = state_moments(cat, t, unit);
  const auto box = phase_box(mt, 161, 161, 7.0);
  const auto w0m = wigner_mixture(density_from_state(cat, 1.0), 1.0);
  const auto wt = evolve_wigner(sample(w0m, box.p, box.q), t, unit);
  const auto ref = sample(propagate(w0m, t, unit), box.p, box.q);
  EXPECT_LT(l1_distance(wt, ref), 1e-3);
}

TEST(Positivity, CoherentStateNeverNegative) {
  const auto w0 = wigner_mixture(density_from_state(GaussianState{{coherent_state({0, 0}, unit)}}, 1.0), 1.0);
  const std::vector<double> ts{0.1, 0.5, 1.0};
  const auto r = positivity_scan(w0, Axis{-8, 8, 81}, Axis{-8, 8, 81}, ts, unit);
  ASSERT_TRUE(r.t_first);
  EXPECT_EQ(*r.t_first, 0.1);
  for (const auto& pt : r.scan) EXPECT_GE(pt.min_w, -1e-6 * pt.max_w);
  EXPECT_THROW(positivity_scan(w0, Axis{-8, 8, 81}, Axis{-8, 8, 81}, {}, unit), DomainError);
}

TEST(Positivity, CatCrossingTimeAndTemperatureOrdering) {
  const auto w0 = wigner_mixture(density_from_state(standard_cat(), 1.0), 1.0);
  std::vector<double> ts;
  for (int i = 1; i <= 30; ++i) ts.push_back(0.05 * i);
  double prev = 1e9;
  for (double kT : {1.0, 2.0, 4.0}) {
    const auto s = derive_scales({1, 1, kT, 1});
    const auto r = positivity_scan(w0, Axis{-6, 6, 241}, Axis{-6, 6, 241}, ts, s);
    ASSERT_TRUE(r.t_crossing) << kT;
    const double tl = std::sqrt(1.0 / kT);
    EXPECT_GE(*r.t_crossing, 0.5 * tl);
    EXPECT_LE(*r.t_crossing, 1.5 * tl);
    EXPECT_LE(*r.t_crossing, prev);
    prev = *r.t_crossing;
  }
}

TEST(Positivity, GridScanAgreesWithMixtureScan) {
  const auto w0m = wigner_mixture(density_from_state(standard_cat(), 1.0), 1.0);
  const Axis pa{-6, 6, 121}, qa{-8, 8, 161};
  const std::vector<double> ts{0.2, 0.4, 0.6, 0.8, 1.0};
  const auto g = positivity_scan(sample(w0m, pa, qa), ts, unit);
  const auto e = positivity_scan(w0m, pa, qa, ts, unit, false);
  for (std::size_t k = 0; k < ts.size(); ++k) EXPECT_NEAR(g.scan[k].min_w, e.scan[k].min_w, 2e-4);
  EXPECT_EQ(g.t_first, e.t_first);
}

TEST(FDistribution, InversionRouteAgreesAndNormalized) {
  const auto cat = standard_cat();
  for (double at : {2.0, 5.0}) {
    const auto mt = state_moments(cat, at, unit);
    const auto box = phase_box(mt, 101, 101, 6.0);
    const auto fd = f_distribution(cat, box.p, box.q, at, unit);
    EXPECT_LT(fd.route_deviation, 1e-8) << at;
    EXPECT_EQ(fd.route_points, 64);
    EXPECT_NEAR(fd.f.integral(), 1.0, 1e-6);
  }
}

TEST(FDistribution, BelowConvergenceBoundThrows) {
  EXPECT_THROW(f_distribution(standard_cat(), Axis{-5, 5, 11}, Axis{-5, 5, 11}, 0.5, unit), DivergentIntegral);
}

TEST(FDistribution, GridQuadratureMatchesClosedForm) {
  const auto cat = standard_cat();
  const double t = 2.0;
  const auto mt = state_moments(cat, t, unit);
  const Axis x = density_axis(mt, 1.0, 6.5, true);
  const auto fg = f_distribution(sample(cat, x, 1.0), t, unit, 4);
  const auto fc = f_distribution(cat, fg.f.p, fg.f.q, t, unit, Frame{}, 0);
  EXPECT_LT(sup_relative_deviation(fg.f, fc.f), 1e-4);
}

TEST(FDistribution, ApproachesWignerAsAlphaTGrows) {
  const auto cat = standard_cat();
  double prev = 1e9;
  for (double at : {2.0, 3.0, 5.0, 10.0}) {
    const auto mt = state_moments(cat, at, unit);
    const auto box = phase_box(mt, 121, 121, 6.0);
    const auto f = f_distribution(cat, box.p, box.q, at, unit, Frame{}, 0).f;
    const auto w = sample(wigner_mixture(evolve_exact(cat, at, unit), 1.0), box.p, box.q);
    const double dev = sup_relative_deviation(f, w);
    EXPECT_LT(dev, prev) << at;
    prev = dev;
  }
}

TEST(Frame, CompactFrameIsSymplecticAndPreservesTraceDistance) {
  const auto cat = standard_cat();
  const double t = 2.0;
  const auto rho = evolve_exact(cat, t, unit);
  const auto other = evolve_exact(GaussianState{{coherent_state({0, 2}, unit)}}, t, unit);
  const Frame fr = compact_frame(moments(wigner_mixture(rho, 1.0)), coherent_width(unit), unit);
  EXPECT_NEAR(fr.S.determinant(), 1.0, 1e-12);
  const cd lw = transform_width(coherent_width(unit), fr, 1.0);
  EXPECT_NEAR(lw.real(), 1.0, 1e-12);
  EXPECT_NEAR(lw.imag(), 0.0, 1e-12);

  auto td_in = [&](const GaussianDensity& a, const GaussianDensity& b) {
    const auto m = moments(wigner_mixture(a, 1.0));
    const Axis x = density_axis(m, 1.0, 7.0);
    return trace_distance(sample(a, x), sample(b, x));
  };
  const double d0 = td_in(rho, other);
  const double d1 = td_in(transform(rho, fr, 1.0), transform(other, fr, 1.0));
  EXPECT_NEAR(d0, d1, 1e-5);
  // moments are diagonal with the long axis on q in the frame
  const auto mf = moments(transform(wigner_mixture(rho, 1.0), fr));
  EXPECT_NEAR(mf.cov(0, 1), 0.0, 1e-10);
  EXPECT_GE(mf.cov(1, 1), mf.cov(0, 0) * 0.999);
}
