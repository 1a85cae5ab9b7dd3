#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fac/constants.hpp"

namespace fac {

// 1-periodic multi-well potential, zero exactly on the integers.  The
// default amplitude A = Cn/(4*pi) makes the arctan layer an exact standing
// wave, giving a closed-form oracle for every downstream consumer.
class Potential {
 public:
  enum class Kind { calibrated_cosine, user_table };

  static Potential calibrated_cosine(int n = 2) {
    Potential p;
    p.kind_ = Kind::calibrated_cosine;
    p.A_ = compute_Cn(n) / (4.0 * pi);
    return p;
  }

  // Two-column samples of W on [0,1]; periodic cubic interpolation.
  static Potential user_table(const std::vector<double>& u,
                              const std::vector<double>& W) {
    if (u.size() != W.size() || u.size() < 8)
      throw std::invalid_argument("Potential::user_table: bad table");
    Potential p;
    p.kind_ = Kind::user_table;
    p.tu_ = u;
    p.tW_ = W;
    return p;
  }

  Kind kind() const { return kind_; }
  double amplitude() const { return A_; }

  double W(double u) const {
    if (kind_ == Kind::calibrated_cosine) return A_ * (1.0 - std::cos(2.0 * pi * u));
    return table_eval(u, 0);
  }
  double Wp(double u) const {
    if (kind_ == Kind::calibrated_cosine) return 2.0 * pi * A_ * std::sin(2.0 * pi * u);
    return table_eval(u, 1);
  }
  double Wpp(double u) const {
    if (kind_ == Kind::calibrated_cosine)
      return 4.0 * pi * pi * A_ * std::cos(2.0 * pi * u);
    return table_eval(u, 2);
  }
  double Wppp(double u) const {
    if (kind_ == Kind::calibrated_cosine)
      return -8.0 * pi * pi * pi * A_ * std::sin(2.0 * pi * u);
    return table_eval(u, 3);
  }

  double max_abs_Wpp() const {
    if (kind_ == Kind::calibrated_cosine) return 4.0 * pi * pi * A_;
    double m = 0.0;
    for (int i = 0; i <= 1000; ++i) m = std::max(m, std::abs(Wpp(i / 1000.0)));
    return m;
  }

 private:
  // Periodic cubic interpolation on the [0,1) table (uniform spacing assumed
  // for user tables resampled at load time).
  double table_eval(double u, int order) const {
    const int m = static_cast<int>(tu_.size()) - 1;  // tu_[m] == 1.0
    double x = u - std::floor(u);
    double s = x * m;
    int j = static_cast<int>(std::floor(s));
    if (j >= m) j = m - 1;
    double t = s - j;
    auto val = [&](int idx) {
      int k = ((idx % m) + m) % m;
      return tW_[k];
    };
    double p0 = val(j - 1), p1 = val(j), p2 = val(j + 1), p3 = val(j + 2);
    // Catmull-Rom in t, scaled derivatives by grid spacing h = 1/m.
    double h = 1.0 / m;
    double a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    double b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    double c = 0.5 * (p2 - p0);
    double d = p1;
    switch (order) {
      case 0: return ((a * t + b) * t + c) * t + d;
      case 1: return ((3 * a * t + 2 * b) * t + c) / h;
      case 2: return (6 * a * t + 2 * b) / (h * h);
      case 3: return 6 * a / (h * h * h);
      default: throw std::invalid_argument("Potential: order > 3");
    }
  }

  Kind kind_ = Kind::calibrated_cosine;
  double A_ = 0.0;
  std::vector<double> tu_, tW_;
};

}  // namespace fac
