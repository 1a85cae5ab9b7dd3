#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "fac/quadrature.hpp"

namespace fac {

inline constexpr double pi = std::numbers::pi;

// C_n = \int_{R^{n-1}} (|y|^2 + 1)^{-(n+1)/2} dy, the 1-D reduction constant
// of the n-dimensional half-Laplacian kernel.  n=2 -> 2, n=3 -> pi.
inline double compute_Cn(int n) {
  if (n == 2) {
    // 1-D integrand, even; map [0,inf) with substitution y = t/(1-t).
    auto f = [](double t) {
      double y = t / (1.0 - t);
      double ds = 1.0 / ((1.0 - t) * (1.0 - t));
      return 2.0 * std::pow(y * y + 1.0, -1.5) * ds;
    };
    return integrate(f, 0.0, 1.0, 1e-13);
  }
  if (n == 3) {
    // radial 2-D: \int_0^inf 2*pi*r (r^2+1)^{-2} dr
    auto f = [](double t) {
      double r = t / (1.0 - t);
      double ds = 1.0 / ((1.0 - t) * (1.0 - t));
      double q = r * r + 1.0;
      return 2.0 * pi * r / (q * q) * ds;
    };
    return integrate(f, 0.0, 1.0, 1e-13);
  }
  throw std::invalid_argument("compute_Cn: n must be 2 or 3");
}

// Shell integrals of the kernel |z|^{-(n+1)} in R^n:
//   inner: \int_{|z|<R} |z|^{-(n-1)} dz = C1 * R
//   outer: \int_{|z|>R} |z|^{-(n+1)} dz = C2 / R
// n=2: C1 = C2 = 2*pi; n=1: C1 = C2 = 2.
inline std::pair<double, double> kernel_shell_integrals(double R, int n = 2) {
  if (R <= 0.0) throw std::invalid_argument("kernel_shell_integrals: R must be positive");
  if (n == 2) return {2.0 * pi * R, 2.0 * pi / R};
  if (n == 1) return {2.0 * R, 2.0 / R};
  throw std::invalid_argument("kernel_shell_integrals: n must be 1 or 2");
}

// Fourier multiplier constant: symbol of I_n is -kappa_n |k|, kappa_n = pi * C_n.
inline double compute_kappa(int n) {
  if (n == 1) return pi;
  return pi * compute_Cn(n);
}

// All scalar constants consumed by the dynamics, recomputed (never literal
// in the compute path).  alpha and c0 are filled in by the layer module.
struct DerivedConstants {
  int n = 2;
  double Cn = 0.0;      // kernel reduction constant
  double kappa = 0.0;   // spectral multiplier
  double A = 0.0;       // potential amplitude Cn/(4*pi)
  double Wpp0 = 0.0;    // curvature of the potential at its wells
  double alpha = 0.0;   // Wpp0 / Cn, tail coefficient of the profile
  double c0 = 0.0;      // 1 / \int phi'^2
  double mu = 0.0;      // (c0/2) |S^{n-2}| / (n-1)
};

inline double sphere_measure(int m) {
  // |S^m|: |S^0| = 2, |S^1| = 2*pi.
  if (m == 0) return 2.0;
  if (m == 1) return 2.0 * pi;
  throw std::invalid_argument("sphere_measure: unsupported dimension");
}

// Constants derivable from the dimension alone (calibrated well assumed);
// c0 and mu require the layer profile and stay zero here.
inline DerivedConstants derived_constants(int n) {
  DerivedConstants dc;
  dc.n = n;
  dc.Cn = compute_Cn(n);
  dc.kappa = compute_kappa(n);
  dc.A = dc.Cn / (4.0 * pi);
  dc.Wpp0 = pi * dc.Cn;
  dc.alpha = dc.Wpp0 / dc.Cn;
  return dc;
}

}  // namespace fac
