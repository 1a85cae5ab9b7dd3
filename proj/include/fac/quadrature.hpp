#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>

namespace fac {

// Adaptive Gauss-Kronrod on [a,b] to absolute tolerance `tol`.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-9) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0;
  double v = GK::integrate(std::forward<F>(f), a, b, 12, tol, &err);
  return v;
}

// Composite Simpson on n+1 uniformly spaced samples of f over [a,b]; n even.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace fac
