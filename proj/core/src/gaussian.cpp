// SPDX-License-Identifier: Apache-2.0
#include "qbm/gaussian.hpp"

#include <cmath>
#include <numbers>

#include "qbm/errors.hpp"
#include "qbm/kernels.hpp"

namespace qbm {

using std::numbers::pi;

QuadExp<1> to_quadexp(const GaussianComponent& g, double hbar) {
  QuadExp<1> f;
  f.A(0, 0) = 0.5 * g.L;
  f.b(0) = g.L * g.q0 + cd(0.0, g.p0 / hbar);
  f.c = std::log(g.A) - 0.5 * g.L * g.q0 * g.q0;
  return f;
}

GaussianComponent from_quadexp(const QuadExp<1>& f, double hbar, const std::string& what) {
  GaussianComponent g;
  g.L = 2.0 * f.A(0, 0);
  if (!(g.L.real() > 0.0)) throw DomainError(what, "non-normalizable width (Re L <= 0)");
  g.q0 = f.b(0).real() / g.L.real();
  g.p0 = hbar * (f.b(0).imag() - g.L.imag() * g.q0);
  g.A = std::exp(f.c + 0.5 * g.L * g.q0 * g.q0);
  return g;
}

cd evaluate(const GaussianState& s, double x, double hbar) {
  cd v{0.0, 0.0};
  Eigen::Matrix<double, 1, 1> xv;
  xv << x;
  for (const auto& g : s.components) v += to_quadexp(g, hbar).value(xv);
  return v;
}

cd coherent_width(const DerivedScales& s) { return cd(1.0, -1.0) * (s.m * s.alpha / s.hbar); }

GaussianComponent coherent_state(const CoherentStateParams& pq, const DerivedScales& s) {
  GaussianComponent g;
  g.L = coherent_width(s);
  g.q0 = pq.q;
  g.p0 = pq.p;
  g.A = std::pow(g.L.real() / pi, 0.25);
  return g;
}

cd overlap(const GaussianComponent& a, const GaussianComponent& b, double hbar) {
  if (!(a.L.real() > 0.0) || !(b.L.real() > 0.0))
    throw DomainError("component", "non-normalizable width (Re L <= 0)");
  const QuadExp<1> f = to_quadexp(a, hbar).conj() * to_quadexp(b, hbar);
  return std::exp(integrate_all(f, "overlap"));
}

double norm_squared(const GaussianState& s, double hbar) {
  if (s.components.empty()) throw DomainError("components", "state has no components");
  cd n{0.0, 0.0};
  for (const auto& a : s.components)
    for (const auto& b : s.components) n += overlap(a, b, hbar);
  return n.real();
}

GaussianState normalized(GaussianState s, double hbar) {
  const double n = std::sqrt(norm_squared(s, hbar));
  for (auto& g : s.components) g.A /= n;
  return s;
}

StateMoments moments(const GaussianState& s, double hbar) {
  const GaussianDensity rho = density_from_state(s, hbar);
  cd mass{0}, x1{0}, x2{0}, p1{0}, p2{0};
  for (const auto& t : rho.terms) {
    const auto m = raw_moments(wigner_term(t, hbar), "moments");
    mass += m.mass;
    p1 += m.first(0);
    x1 += m.first(1);
    p2 += m.second(0, 0);
    x2 += m.second(1, 1);
  }
  StateMoments r;
  r.mean_x = (x1 / mass).real();
  r.mean_p = (p1 / mass).real();
  r.var_x = (x2 / mass).real() - r.mean_x * r.mean_x;
  r.var_p = (p2 / mass).real() - r.mean_p * r.mean_p;
  return r;
}

GaussianState cat_state(double ell, double width, double hbar, double p0) {
  if (!(width > 0.0)) throw DomainError("width", "must be > 0");
  GaussianState s;
  for (double sgn : {1.0, -1.0}) {
    GaussianComponent g;
    g.L = width;
    g.q0 = 0.5 * sgn * ell;
    g.p0 = p0;
    g.A = 1.0;
    s.components.push_back(g);
  }
  return normalized(s, hbar);
}

GaussianKernel free_propagator(double t, const DerivedScales& s) {
  if (!(t > 0.0)) throw DomainError("t", "propagation time must be > 0");
  GaussianKernel k;
  const QuadExp<2>::Vec d{1.0, -1.0};
  k.e.add_square(cd(0.0, s.m / (2.0 * s.hbar * t)), d);
  k.e.c = 0.5 * std::log(s.m / (2.0 * pi * s.hbar * t)) - cd(0.0, pi / 4.0);
  return k;
}

GaussianKernel oscillator_propagator(cd w, double t, const DerivedScales& s) {
  if (!(t > 0.0)) throw DomainError("t", "propagation time must be > 0");
  const cd lsin = log_sin(w, t);
  const cd cot = cot_wt(w, t);
  const cd csc = std::exp(-lsin);
  GaussianKernel k;
  const cd i(0.0, 1.0);
  // (i/hbar)[c1 (xf^2 + x0^2) + c2 xf x0]
  const cd c1 = 0.5 * s.m * w * cot;
  const cd c2 = -s.m * w * csc;
  k.e.add_square(i * c1 / s.hbar, QuadExp<2>::unit(0));
  k.e.add_square(i * c1 / s.hbar, QuadExp<2>::unit(1));
  k.e.add_product(i * c2 / s.hbar, QuadExp<2>::unit(0), QuadExp<2>::unit(1));
  k.e.c = log_oscillator_prefactor(w, t, s);
  return k;
}

GaussianState apply_gaussian_kernel(const GaussianState& state, const GaussianKernel& k, double hbar) {
  GaussianState out;
  out.components.reserve(state.components.size());
  for (std::size_t j = 0; j < state.components.size(); ++j) {
    const std::string what = "component[" + std::to_string(j) + "]";
    QuadExp<2> f = k.e * embed<2, 1>(to_quadexp(state.components[j], hbar), {1});
    out.components.push_back(from_quadexp(integrate_tail<1>(f, what), hbar, what));
  }
  return out;
}

cd GaussianDensity::operator()(double x, double y) const {
  Eigen::Vector2d v(x, y);
  cd r{0.0, 0.0};
  for (const auto& t : terms) r += t.value(v);
  return r;
}

cd GaussianDensity::trace() const {
  const Eigen::Matrix<cd, 2, 1> diag{1.0, 1.0};
  cd tr{0.0, 0.0};
  for (const auto& t : terms) tr += std::exp(integrate_all(substitute<2, 1>(t, diag), "trace"));
  return tr;
}

double GaussianDensity::purity() const {
  // Tr rho^2 = int rho(x, y) rho(y, x)
  Eigen::Matrix<cd, 2, 2> swap;
  swap << 0.0, 1.0, 1.0, 0.0;
  cd p{0.0, 0.0};
  for (const auto& u : terms)
    for (const auto& v : terms) p += std::exp(integrate_all(u * substitute<2, 2>(v, swap), "purity"));
  const cd tr = trace();
  return (p / (tr * tr)).real();
}

GaussianDensity& GaussianDensity::scale(cd factor) {
  const cd l = std::log(factor);
  for (auto& t : terms) t.c += l;
  return *this;
}

GaussianDensity& GaussianDensity::normalize() { return scale(1.0 / trace().real()); }

GaussianDensity density_from_state(const GaussianState& s, double hbar) {
  if (s.components.empty()) throw DomainError("components", "state has no components");
  GaussianDensity rho;
  for (const auto& a : s.components) {
    const QuadExp<1> fa = to_quadexp(a, hbar);
    for (const auto& b : s.components) {
      const QuadExp<1> fb = to_quadexp(b, hbar).conj();
      QuadExp<2> t;
      t.A(0, 0) = fa.A(0, 0);
      t.A(1, 1) = fb.A(0, 0);
      t.b << fa.b(0), fb.b(0);
      t.c = fa.c + fb.c;
      rho.terms.push_back(t);
    }
  }
  return rho;
}

QuadExp<2> wigner_term(const QuadExp<2>& rho_xy, double hbar) {
  // variables (p, q, xi): x = q + xi/2, y = q - xi/2
  Eigen::Matrix<cd, 2, 3> T;
  T << 0.0, 1.0, 0.5, 0.0, 1.0, -0.5;
  QuadExp<3> f = substitute<2, 3>(rho_xy, T);
  f.add_product(cd(0.0, -1.0 / hbar), QuadExp<3>::unit(0), QuadExp<3>::unit(2));
  f.c -= std::log(2.0 * pi * hbar);
  return integrate_tail<1>(f, "wigner");
}

QuadExp<2> density_term(const QuadExp<2>& w_pq, double hbar) {
  // variables (x, y, p): q = (x + y)/2, weight exp(i p (x - y)/hbar)
  Eigen::Matrix<cd, 2, 3> T;
  T << 0.0, 0.0, 1.0, 0.5, 0.5, 0.0;
  QuadExp<3> f = substitute<2, 3>(w_pq, T);
  f.add_product(cd(0.0, 1.0 / hbar), QuadExp<3>::unit(0) - QuadExp<3>::unit(1), QuadExp<3>::unit(2));
  return integrate_tail<1>(f, "inverse wigner");
}

GaussianDensity operator+(GaussianDensity a, const GaussianDensity& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

}  // namespace qbm
