#pragma once

#include <fftw3.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "fac/constants.hpp"
#include "fac/quadrature.hpp"

namespace fac {

// ------------------------------------------------------------------ fields

// Real scalar field on the uniform periodic square [-L/2, L/2)^2,
// row-major v[i*M + j] with x = -L/2 + i*h, y = -L/2 + j*h.
struct PeriodicField {
  int M = 0;
  double L = 0.0;
  std::vector<double> v;

  static PeriodicField zeros(int M, double L) {
    PeriodicField f;
    f.M = M;
    f.L = L;
    f.v.assign(static_cast<size_t>(M) * M, 0.0);
    return f;
  }

  double h() const { return L / M; }
  double x(int i) const { return -0.5 * L + i * h(); }

  double& at(int i, int j) { return v[static_cast<size_t>(i) * M + j]; }
  double at(int i, int j) const { return v[static_cast<size_t>(i) * M + j]; }

  template <class F>
  void fill(F&& f) {
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) at(i, j) = f(x(i), x(j));
  }

  bool finite() const {
    for (double a : v)
      if (!std::isfinite(a)) return false;
    return true;
  }

  std::pair<double, double> minmax() const {
    double lo = v[0], hi = v[0];
    for (double a : v) {
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    return {lo, hi};
  }
};

inline bool is_pow2(int m) { return m > 0 && (m & (m - 1)) == 0; }

// Cached FFTW plans and the integer wavenumber magnitudes for one grid size.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(int M) : M_(M), Mc_(M / 2 + 1) {
    if (!is_pow2(M)) throw std::invalid_argument("SpectralWorkspace: M must be a power of two");
    re_.resize(static_cast<size_t>(M_) * M_);
    cx_.resize(static_cast<size_t>(M_) * Mc_);
    fwd_ = fftw_plan_dft_r2c_2d(M_, M_, re_.data(),
                                reinterpret_cast<fftw_complex*>(cx_.data()), FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_2d(M_, M_, reinterpret_cast<fftw_complex*>(cx_.data()),
                                re_.data(), FFTW_ESTIMATE);
    kmag_.resize(static_cast<size_t>(M_) * Mc_);
    for (int i = 0; i < M_; ++i) {
      int mi = (i <= M_ / 2) ? i : i - M_;
      for (int j = 0; j < Mc_; ++j) {
        kmag_[static_cast<size_t>(i) * Mc_ + j] = std::hypot(double(mi), double(j));
      }
    }
  }
  ~SpectralWorkspace() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  static SpectralWorkspace& get(int M) {
    static std::map<int, std::unique_ptr<SpectralWorkspace>> reg;
    auto it = reg.find(M);
    if (it == reg.end()) it = reg.emplace(M, std::make_unique<SpectralWorkspace>(M)).first;
    return *it->second;
  }

  // out = multiplier(|k|) applied to f in Fourier space; |k| physical (2*pi*m/L).
  void apply_multiplier(const PeriodicField& f, PeriodicField& out,
                        const std::function<double(double)>& mult) {
    const double kscale = 2.0 * pi / f.L;
    std::copy(f.v.begin(), f.v.end(), re_.begin());
    fftw_execute(fwd_);
    const double norm = 1.0 / (static_cast<double>(M_) * M_);
    for (size_t q = 0; q < cx_.size(); ++q) cx_[q] *= mult(kscale * kmag_[q]) * norm;
    fftw_execute(bwd_);
    out.M = M_;
    out.L = f.L;
    out.v.assign(re_.begin(), re_.end());
  }

  // One semi-implicit step of  eps u_t = (1/(eps*lne)) (eps I_n u - W'(u)):
  // explicit reaction, implicit nonlocal diagonal solve.
  void imex_step(PeriodicField& u, double dt, double eps, double lne, double kappa,
                 const std::function<double(double)>& Wp, const double* ramp = nullptr) {
    const double react = dt / (eps * eps * lne);
    const double kscale = 2.0 * pi / u.L;
    const size_t n2 = u.v.size();
    if (ramp) {
      for (size_t q = 0; q < n2; ++q) re_[q] = u.v[q] - react * Wp(u.v[q] + ramp[q]);
    } else {
      for (size_t q = 0; q < n2; ++q) re_[q] = u.v[q] - react * Wp(u.v[q]);
    }
    fftw_execute(fwd_);
    const double norm = 1.0 / (static_cast<double>(M_) * M_);
    const double fac = dt * kappa / (eps * lne);
    for (size_t q = 0; q < cx_.size(); ++q)
      cx_[q] *= norm / (1.0 + fac * (kscale * kmag_[q]));
    fftw_execute(bwd_);
    std::copy(re_.begin(), re_.end(), u.v.begin());
  }

 private:
  int M_, Mc_;
  fftw_plan fwd_, bwd_;
  std::vector<double> re_;
  std::vector<std::complex<double>> cx_;
  std::vector<double> kmag_;
};

// I_n f on the periodic box via the symbol -kappa_n |k|; zero mode untouched.
inline PeriodicField frac_lap_spectral(const PeriodicField& f, double kappa) {
  if (!f.finite()) throw std::domain_error("frac_lap_spectral: non-finite input");
  PeriodicField out;
  SpectralWorkspace::get(f.M).apply_multiplier(f, out, [kappa](double k) { return -kappa * k; });
  return out;
}

// ------------------------------------------------------------ 1-D operator

// A line function with a declared far-field so the principal-value integral
// can be closed analytically beyond the numeric window.
struct LineField {
  std::function<double(double)> f;
  enum class Tail { layer, zero } tail = Tail::zero;
  double alpha = 0.0;  // layer tail: f ~ H(xi) - 1/(alpha xi)
  double Xi = 0.0;     // zero tail: f == 0 for |xi| >= Xi
};

namespace detail {
// \int_Y^inf dy / (y^2 (y+s)), valid for Y > |s|.
inline double tail_aux(double s, double Y) {
  if (std::abs(s) < 1e-7 * Y) return 1.0 / (2.0 * Y * Y) - s / (3.0 * Y * Y * Y);
  return 1.0 / (s * Y) - std::log1p(s / Y) / (s * s);
}
}  // namespace detail

// I_1[v](xi) = P.V. \int (v(xi+y) - v(xi)) / y^2 dy via the symmetric
// second-difference form plus analytic tails.
inline double frac_lap_1d(const LineField& v, double xi, double tol = 1e-9) {
  const double vc = v.f(xi);
  auto sd = [&](double y) { return (v.f(xi + y) + v.f(xi - y) - 2.0 * vc) / (y * y); };
  const double delta = 1e-4;
  double Y;
  if (v.tail == LineField::Tail::layer) {
    Y = 2.0 * std::abs(xi) + 60.0;
  } else {
    Y = std::abs(xi) + std::max(v.Xi, 1.0) + 1.0;
  }
  double inner = delta * sd(delta);
  double zone1 = integrate(sd, delta, 1.0, tol);
  double zone2 = integrate(sd, 1.0, Y, tol);
  double tail;
  if (v.tail == LineField::Tail::layer) {
    const double a = v.alpha;
    double t_right = (1.0 - vc) / Y - detail::tail_aux(xi, Y) / a;
    double t_left = -vc / Y + detail::tail_aux(-xi, Y) / a;
    tail = t_right + t_left;
  } else {
    tail = -2.0 * vc / Y;
  }
  return inner + zone1 + zone2 + tail;
}

// ----------------------------------------------------- 1-D collocation

// Dense collocation of I_1 on an arbitrary strictly increasing grid:
// (A v)_i + c_i ~ I_1[v](xi_i).  Off-grid samples use 4-point Lagrange
// interpolation; the far field is closed per the declared tail.
struct I1Matrix {
  Eigen::MatrixXd A;
  Eigen::VectorXd c;
};

namespace detail {

inline void lagrange4(const std::vector<double>& x, double xq, int* idx, double* w) {
  const int n = static_cast<int>(x.size());
  int j = static_cast<int>(std::upper_bound(x.begin(), x.end(), xq) - x.begin()) - 1;
  j = std::max(1, std::min(n - 3, j));
  int base = j - 1;
  for (int k = 0; k < 4; ++k) {
    idx[k] = base + k;
    double num = 1.0, den = 1.0;
    for (int l = 0; l < 4; ++l) {
      if (l == k) continue;
      num *= xq - x[base + l];
      den *= x[base + k] - x[base + l];
    }
    w[k] = num / den;
  }
}

struct QuadNode {
  double y, w;
};

// Simpson nodes on [a,b] (ny panels) plus log-Simpson on [b,c] (nz panels).
inline std::vector<QuadNode> sd_quadrature(double a, double b, double c, int ny, int nz) {
  std::vector<QuadNode> q;
  if (ny % 2) ++ny;
  double h1 = (b - a) / ny;
  for (int i = 0; i <= ny; ++i) {
    double w = (i == 0 || i == ny) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    q.push_back({a + i * h1, w * h1 / 3.0});
  }
  if (nz % 2) ++nz;
  double s0 = std::log(b), s1 = std::log(c), hs = (s1 - s0) / nz;
  for (int i = 0; i <= nz; ++i) {
    double w = (i == 0 || i == nz) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double y = std::exp(s0 + i * hs);
    q.push_back({y, w * hs / 3.0 * y});
  }
  return q;
}

}  // namespace detail

// Panel counts set the quadrature floor (composite Simpson, h^4): 96/240
// keeps it below the 4-point interpolation error for m >= 480 on sinh grids.
inline I1Matrix build_i1_matrix(const std::vector<double>& xi, LineField::Tail tail,
                                double alpha = 0.0, int ny = 96, int nz = 240) {
  const int n = static_cast<int>(xi.size());
  const double Xi = xi.back();
  I1Matrix out;
  out.A = Eigen::MatrixXd::Zero(n, n);
  out.c = Eigen::VectorXd::Zero(n);
  const double delta = 1e-3;

  for (int i = 0; i < n; ++i) {
    const double x0 = xi[i];
    const double Y = (tail == LineField::Tail::layer) ? 2.0 * std::abs(x0) + 60.0 + 2.0 * Xi
                                                      : std::abs(x0) + Xi + 1.0;
    auto nodes = detail::sd_quadrature(delta, 1.0, Y, ny, nz);
    // innermost sliver [0, delta]: second difference at y = delta
    nodes.push_back({delta, delta});
    double diag = 0.0;
    for (const auto& nd : nodes) {
      const double wk = nd.w / (nd.y * nd.y);
      for (double sgn : {1.0, -1.0}) {
        const double xq = x0 + sgn * nd.y;
        if (xq >= xi.front() && xq <= Xi) {
          int idx[4];
          double w[4];
          detail::lagrange4(xi, xq, idx, w);
          for (int k = 0; k < 4; ++k) out.A(i, idx[k]) += wk * w[k];
        } else if (tail == LineField::Tail::layer) {
          // H(xq) - 1/(alpha*xq) is data, not an unknown
          double hv = (xq > 0.0) ? 1.0 : 0.0;
          out.c(i) += wk * (hv - 1.0 / (alpha * xq));
        }
        // zero tail: contributes nothing
      }
      diag += -2.0 * wk;
    }
    out.A(i, i) += diag;
    // analytic closure beyond Y
    if (tail == LineField::Tail::layer) {
      out.c(i) += 1.0 / Y - (detail::tail_aux(x0, Y) - detail::tail_aux(-x0, Y)) / alpha;
      out.A(i, i) += -2.0 / Y;
    } else {
      out.A(i, i) += -2.0 / Y;
    }
  }
  return out;
}

// ------------------------------------------------------ 2-D quadrature oracle

// Truncated-kernel quadrature of I_2[u](x) for a free callable, paired
// antipodally to remove the apparent singularity, with the far field closed
// by the outer shell integral against `far_value`.
struct Quad2dOpts {
  double r_max = 16.0;
  int n_theta = 64;       // half-circle directions
  double tol = 1e-9;      // radial tolerance
  double far_value = 0.0; // angular-mean far field
  int max_refine = 4;
  double rel_tol = 1e-7;
};

inline double quad_frac_lap_2d(const std::function<double(double, double)>& u, double x,
                               double y, const Quad2dOpts& opt = {}) {
  const double uc = u(x, y);
  auto eval = [&](int ntheta) {
    double acc = 0.0;
    const double dth = pi / ntheta;
    for (int l = 0; l < ntheta; ++l) {
      const double th = (l + 0.5) * dth;
      const double cx = std::cos(th), sy = std::sin(th);
      auto sd = [&](double r) {
        return (u(x + r * cx, y + r * sy) + u(x - r * cx, y - r * sy) - 2.0 * uc) / (r * r);
      };
      const double delta = 1e-3;
      double v = delta * sd(delta);
      v += integrate(sd, delta, 1.0, opt.tol);
      v += integrate(sd, 1.0, opt.r_max, opt.tol);
      acc += v * dth;
    }
    return acc;
  };
  double prev = eval(opt.n_theta);
  int nt = opt.n_theta;
  for (int it = 0; it < opt.max_refine; ++it) {
    nt *= 2;
    double cur = eval(nt);
    if (std::abs(cur - prev) <= opt.rel_tol * std::max(1.0, std::abs(cur))) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  // outer shell: \int_{|z|>R} (far - u(x)) |z|^{-3} dz = 2 pi (far - u(x)) / R
  return prev + 2.0 * pi * (opt.far_value - uc) / opt.r_max;
}

}  // namespace fac
