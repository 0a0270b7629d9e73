// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "qbm/errors.hpp"

namespace qbm {

// exp(-v^T A v + b^T v + c) with complex symmetric A. Every closed-form
// kernel, state and phase-space function in the library is a sum of these.
template <int N>
struct QuadExp {
  using Mat = Eigen::Matrix<std::complex<double>, N, N>;
  using Vec = Eigen::Matrix<std::complex<double>, N, 1>;

  Mat A = Mat::Zero();
  Vec b = Vec::Zero();
  std::complex<double> c{0.0, 0.0};

  template <typename V>
  std::complex<double> exponent(const V& v) const {
    const Vec w = v.template cast<std::complex<double>>();
    return -(w.transpose() * A * w)(0, 0) + (b.transpose() * w)(0, 0) + c;
  }
  template <typename V>
  std::complex<double> value(const V& v) const {
    return std::exp(exponent(v));
  }

  // Adds coef * (u.v)^2 to the exponent.
  void add_square(std::complex<double> coef, const Vec& u) { A -= coef * (u * u.transpose()); }
  // Adds coef * (u.v)(w.v) to the exponent.
  void add_product(std::complex<double> coef, const Vec& u, const Vec& w) {
    A -= 0.5 * coef * (u * w.transpose() + w * u.transpose());
  }
  void add_linear(std::complex<double> coef, const Vec& u) { b += coef * u; }

  QuadExp& operator*=(const QuadExp& o) {
    A += o.A;
    b += o.b;
    c += o.c;
    return *this;
  }
  friend QuadExp operator*(QuadExp l, const QuadExp& r) { return l *= r; }

  QuadExp conj() const {
    QuadExp r;
    r.A = A.conjugate();
    r.b = b.conjugate();
    r.c = std::conj(c);
    return r;
  }

  static Vec unit(int i) {
    Vec u = Vec::Zero();
    u(i) = 1.0;
    return u;
  }
};

namespace detail {

// log sqrt(det M) with the branch given by the principal roots of the
// eigenvalues. For Re M positive definite every eigenvalue has Re > 0, so
// this is the analytic continuation from the real positive case.
template <int K>
std::complex<double> half_log_det(const Eigen::Matrix<std::complex<double>, K, K>& M) {
  if constexpr (K == 1) {
    return 0.5 * std::log(M(0, 0));
  } else {
    Eigen::ComplexEigenSolver<Eigen::Matrix<std::complex<double>, K, K>> es(M, false);
    std::complex<double> s{0.0, 0.0};
    for (int i = 0; i < K; ++i) s += 0.5 * std::log(es.eigenvalues()(i));
    return s;
  }
}

template <int K>
bool real_part_positive_definite(const Eigen::Matrix<std::complex<double>, K, K>& M) {
  const Eigen::Matrix<double, K, K> R = 0.5 * (M.real() + M.real().transpose());
  if constexpr (K == 1) {
    return R(0, 0) > 0.0;
  } else {
    Eigen::LLT<Eigen::Matrix<double, K, K>> llt(R);
    return llt.info() == Eigen::Success;
  }
}

}  // namespace detail

// Integrates the last K variables over the real line.
template <int K, int N>
QuadExp<N - K> integrate_tail(const QuadExp<N>& f, const std::string& what = "gaussian") {
  constexpr int M = N - K;
  using MK = Eigen::Matrix<std::complex<double>, K, K>;
  const MK A22 = f.A.template bottomRightCorner<K, K>();
  if (!detail::real_part_positive_definite<K>(A22))
    throw DivergentIntegral(what, "integrand does not decay (Re of quadratic form not positive definite)");

  const MK inv = A22.inverse();
  const Eigen::Matrix<std::complex<double>, K, 1> b2 = f.b.template tail<K>();
  QuadExp<M> r;
  if constexpr (M > 0) {
    const Eigen::Matrix<std::complex<double>, M, K> A12 = f.A.template topRightCorner<M, K>();
    r.A = f.A.template topLeftCorner<M, M>() - A12 * inv * A12.transpose();
    r.b = f.b.template head<M>() - A12 * inv * b2;
  }
  r.c = f.c + 0.25 * (b2.transpose() * inv * b2)(0, 0) +
        0.5 * K * std::log(std::numbers::pi) - detail::half_log_det<K>(A22);
  return r;
}

template <int N>
std::complex<double> integrate_all(const QuadExp<N>& f, const std::string& what = "gaussian") {
  return integrate_tail<N>(f, what).c;  // log of the integral
}

// g(w) = f(T w + s).
template <int N, int M>
QuadExp<M> substitute(const QuadExp<N>& f, const Eigen::Matrix<std::complex<double>, N, M>& T,
                      const Eigen::Matrix<std::complex<double>, N, 1>& s =
                          Eigen::Matrix<std::complex<double>, N, 1>::Zero()) {
  QuadExp<M> g;
  g.A = T.transpose() * f.A * T;
  g.b = T.transpose() * (f.b - 2.0 * f.A * s);
  g.c = f.c - (s.transpose() * f.A * s)(0, 0) + (f.b.transpose() * s)(0, 0);
  return g;
}

// Zeroth, first and second raw moments of the (complex) Gaussian measure.
template <int N>
struct GaussMoments {
  std::complex<double> mass;  // integral, not its log
  Eigen::Matrix<std::complex<double>, N, 1> first;
  Eigen::Matrix<std::complex<double>, N, N> second;
};

template <int N>
GaussMoments<N> raw_moments(const QuadExp<N>& f, const std::string& what = "gaussian") {
  GaussMoments<N> m;
  m.mass = std::exp(integrate_all(f, what));
  const auto inv = f.A.inverse().eval();
  const auto mu = (0.5 * inv * f.b).eval();
  m.first = m.mass * mu;
  m.second = m.mass * (0.5 * inv + mu * mu.transpose());
  return m;
}

// Embeds an M-variable function into N variables: g(v) = f(v[idx]).
template <int N, int M>
QuadExp<N> embed(const QuadExp<M>& f, const int (&idx)[M]) {
  Eigen::Matrix<std::complex<double>, M, N> P = Eigen::Matrix<std::complex<double>, M, N>::Zero();
  for (int i = 0; i < M; ++i) P(i, idx[i]) = 1.0;
  return substitute<M, N>(f, P);
}

}  // namespace qbm
