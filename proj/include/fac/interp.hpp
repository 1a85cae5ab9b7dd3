#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fac {

// Shape-preserving (Fritsch-Carlson) cubic Hermite interpolant on a
// strictly increasing grid.  Monotone data yields a monotone interpolant.
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 3 || y_.size() != n) throw std::invalid_argument("Pchip: bad sizes");
    m_.assign(n, 0.0);
    std::vector<double> d(n - 1), h(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    m_[0] = end_slope(h[0], h[1], d[0], d[1]);
    m_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    for (size_t i = 1; i + 1 < n; ++i) {
      if (d[i - 1] * d[i] <= 0.0) {
        m_[i] = 0.0;
      } else {
        double w1 = 2.0 * h[i] + h[i - 1];
        double w2 = h[i] + 2.0 * h[i - 1];
        m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
      }
    }
  }

  double xmin() const { return x_.front(); }
  double xmax() const { return x_.back(); }

  // order: 0 value, 1 first derivative, 2 second derivative (C^0 only).
  double operator()(double x, int order = 0) const {
    size_t i = locate(x);
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double y0 = y_[i], y1 = y_[i + 1], m0 = m_[i] * h, m1 = m_[i + 1] * h;
    switch (order) {
      case 0: {
        double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
      }
      case 1: {
        double t2 = t * t;
        return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
                (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / h;
      }
      case 2: {
        return ((12 * t - 6) * y0 + (6 * t - 4) * m0 + (-12 * t + 6) * y1 +
                (6 * t - 2) * m1) / (h * h);
      }
      default:
        throw std::invalid_argument("Pchip: order must be 0..2");
    }
  }

 private:
  static double end_slope(double h0, double h1, double d0, double d1) {
    double m = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  }

  size_t locate(double x) const {
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
    return i - 1;
  }

  std::vector<double> x_, y_, m_;
};

// Natural cubic spline (C^2), used where smoothness matters more than
// shape preservation (residual evaluation of non-monotone grid functions).
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 3 || y_.size() != n) throw std::invalid_argument("CubicSpline: bad sizes");
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    b[0] = 1.0;
    b[n - 1] = 1.0;
    for (size_t i = 1; i + 1 < n; ++i) {
      double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
      a[i] = hl / 6.0;
      b[i] = (hl + hr) / 3.0;
      c[i] = hr / 6.0;
      r[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
    }
    ypp_.assign(n, 0.0);
    // Thomas solve.
    for (size_t i = 1; i < n; ++i) {
      double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    ypp_[n - 1] = r[n - 1] / b[n - 1];
    for (size_t i = n - 1; i-- > 0;) ypp_[i] = (r[i] - c[i] * ypp_[i + 1]) / b[i];
  }

  double operator()(double x, int order = 0) const {
    size_t i = locate(x);
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - x) / h, B = (x - x_[i]) / h;
    switch (order) {
      case 0:
        return A * y_[i] + B * y_[i + 1] +
               ((A * A * A - A) * ypp_[i] + (B * B * B - B) * ypp_[i + 1]) * h * h / 6.0;
      case 1:
        return (y_[i + 1] - y_[i]) / h -
               (3 * A * A - 1) / 6.0 * h * ypp_[i] + (3 * B * B - 1) / 6.0 * h * ypp_[i + 1];
      case 2:
        return A * ypp_[i] + B * ypp_[i + 1];
      default:
        throw std::invalid_argument("CubicSpline: order must be 0..2");
    }
  }

 private:
  size_t locate(double x) const {
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
    return i - 1;
  }

  std::vector<double> x_, y_, ypp_;
};

}  // namespace fac
