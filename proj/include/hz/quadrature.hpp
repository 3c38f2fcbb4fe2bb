#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace hz::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // empty for pure collocation node sets
};

/// Chebyshev points of the first kind, cos((2k+1) pi / 2n), descending.
inline Rule chebyshev(int n) {
  Rule r;
  for (int k = 0; k < n; ++k) r.nodes.push_back(std::cos((2.0 * k + 1.0) * std::numbers::pi / (2.0 * n)));
  return r;
}

/// Gauss-Legendre nodes (ascending) and weights.
inline Rule gauss_legendre(int n) {
  Rule r;
  const auto pos = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> all;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it)
    if (*it != 0.0) all.push_back(-*it);
  for (double x : pos) all.push_back(x);
  for (double x : all) {
    const double dp = boost::math::legendre_p_prime<double>(n, x);
    r.nodes.push_back(x);
    r.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  return r;
}

/// Fixed Gauss-Legendre rule applied on [a, b].
template <class F>
auto fixed(F&& f, const Rule& rule, double a, double b) {
  const double h = 0.5 * (b - a), m = 0.5 * (b + a);
  decltype(f(m)) sum{};
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(m + h * rule.nodes[k]);
  return sum * h;
}

template <class T>
struct Estimate {
  T value{};
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) on [a, b].
template <class F>
auto adaptive(F&& f, double a, double b, double tol = 1e-13, unsigned depth = 24) {
  double err = 0.0;
  auto v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, depth, tol, &err);
  return Estimate<decltype(v)>{v, err};
}

/// Adaptive Gauss-Kronrod over consecutive panels of at most `width`.
template <class F>
auto panels(F&& f, double a, double b, double width, double tol = 1e-13, unsigned depth = 16) {
  using T = decltype(f(a));
  Estimate<T> total;
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
  const double h = (b - a) / n;
  for (int k = 0; k < n; ++k) {
    const auto e = adaptive(f, a + k * h, a + (k + 1) * h, tol, depth);
    total.value += e.value;
    total.error += e.error;
  }
  return total;
}

}  // namespace hz::quad
