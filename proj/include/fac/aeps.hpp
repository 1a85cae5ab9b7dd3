#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fac/constants.hpp"
#include "fac/fracops.hpp"
#include "fac/geometry.hpp"
#include "fac/layer.hpp"
#include "fac/quadrature.hpp"

namespace fac {

// Gap between the n-dimensional and transversal 1-D nonlocal operators of the
// layer ansatz, integrated over the truncated kernel ball |z| < gamma/eps.
struct AepsParams {
  double eps = 0.05;
  double gamma = 0.5;
  const LayerProfile* profile = nullptr;
  const DistanceEval* dist = nullptr;
  int n = 2;

  void check() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("a_eps: gamma must be in (0,1)");
    if (!(eps > 0.0 && eps < gamma)) throw std::invalid_argument("a_eps: requires 0 < eps < gamma");
    if (!profile || !dist) throw std::invalid_argument("a_eps: profile and distance required");
  }
};

struct AepsQuadOpts {
  int n_theta = 64;     // half-circle directions per refinement level
  double tol = 1e-9;    // radial tolerance
  double rel_tol = 1e-7;
  int max_refine = 3;
  double r_inner = 1e-3;
};

// a_eps(xi; x) = \int_{|z|<gamma/eps} [phi(xi + (d(x+eps z)-d(x))/eps)
//                                      - phi(xi + grad d(x).z)] / |z|^{n+1} dz
inline double a_eps(const AepsParams& prm, double xi, Vec2 x, const AepsQuadOpts& opt = {}) {
  prm.check();
  const LayerProfile& phi = *prm.profile;
  const DistanceEval& de = *prm.dist;
  const double eps = prm.eps;
  const double Z = prm.gamma / eps;
  const Vec2 p = de.grad(x);

  auto eval = [&](int ntheta) {
    double acc = 0.0;
    const double dth = pi / ntheta;
    for (int l = 0; l < ntheta; ++l) {
      const double th = (l + 0.5) * dth;
      const double cz = std::cos(th), sz = std::sin(th);
      // antipodal pair: integrand at +r omega and -r omega
      auto pair_sd = [&](double r) {
        double f = 0.0;
        for (double sgn : {1.0, -1.0}) {
          double zx = sgn * r * cz, zy = sgn * r * sz;
          double D = de.d_diff(x, {eps * zx, eps * zy}) / eps;
          double lin = p.x * zx + p.y * zy;
          double dlt = D - lin;
          // midpoint-derivative form: in the flat limit the direct difference
          // of two O(1) profile values is pure rounding noise
          if (std::abs(dlt) < 1e-5)
            f += dlt * phi.eval(xi + lin + 0.5 * dlt, 1);
          else
            f += phi.eval(xi + D) - phi.eval(xi + lin);
        }
        return f / (r * r);
      };
      double v = opt.r_inner * pair_sd(opt.r_inner);
      v += integrate(pair_sd, opt.r_inner, std::min(1.0, Z), opt.tol);
      if (Z > 1.0) v += integrate(pair_sd, 1.0, Z, opt.tol);
      acc += v * dth;
    }
    return acc;
  };

  double prev = eval(opt.n_theta);
  int nt = opt.n_theta;
  for (int it = 0; it < opt.max_refine; ++it) {
    nt *= 2;
    double cur = eval(nt);
    if (std::abs(cur - prev) <= opt.rel_tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

// Graded transversal quadrature nodes/weights shared by a-bar and the
// corrector constraint, so the two integrals use identical discrete measures.
struct XiQuadrature {
  std::vector<double> nodes, weights;

  static XiQuadrature graded(double Xi = 100.0, int m = 240, double beta = 5.3) {
    XiQuadrature q;
    q.nodes = sinh_grid(Xi, m, beta);
    const int n = static_cast<int>(q.nodes.size());
    q.weights.assign(n, 0.0);
    for (int j = 0; j < n; ++j) {
      double lo = (j == 0) ? q.nodes[0] : 0.5 * (q.nodes[j - 1] + q.nodes[j]);
      double hi = (j == n - 1) ? q.nodes[n - 1] : 0.5 * (q.nodes[j] + q.nodes[j + 1]);
      q.weights[j] = hi - lo;
    }
    return q;
  }
};

// a-bar_eps(x) = (eps |ln eps|)^{-1} \int a_eps(xi; x) phid(xi) dxi.
// Per-node tolerances are matched to the 1e-3 scale of the averaged quantity;
// the smooth periodic angular integrand converges spectrally from 32 rays.
inline double a_bar_eps(const AepsParams& prm, Vec2 x, const XiQuadrature& q,
                        const AepsQuadOpts& opt = {32, 1e-8, 1e-5, 2, 1e-3}) {
  double acc = 0.0;
  for (size_t j = 0; j < q.nodes.size(); ++j) {
    double w = q.weights[j] * prm.profile->eval(q.nodes[j], 1);
    if (std::abs(w) < 1e-15) continue;
    acc += w * a_eps(prm, q.nodes[j], x, opt);
  }
  return acc / (prm.eps * std::abs(std::log(prm.eps)));
}

inline double a_bar_eps(const AepsParams& prm, Vec2 x) {
  return a_bar_eps(prm, x, XiQuadrature::graded());
}

// |a_eps(d(x)/eps; x) - (eps I_n[phi(d/eps)](x) - C_n I_1[phi](d(x)/eps))|
struct IdentityCheck {
  double residual = 0.0;
  double a_val = 0.0, In_term = 0.0, I1_term = 0.0;
};

inline IdentityCheck a_eps_identity_check(const AepsParams& prm, Vec2 x, double Cn,
                                          double r_max = 48.0) {
  prm.check();
  const double eps = prm.eps;
  const DistanceEval& de = *prm.dist;
  const LayerProfile& phi = *prm.profile;
  const double xi0 = de.d(x) / eps;

  IdentityCheck out;
  out.a_val = a_eps(prm, xi0, x);

  // far field of the ansatz: the clamp saturates at -2 rho outside
  double far = phi.eval(-2.0 * de.rho() / eps);
  Quad2dOpts qo;
  qo.r_max = r_max;
  qo.far_value = far;
  qo.n_theta = 64;
  double In = quad_frac_lap_2d(
      [&](double px, double py) { return phi.eval(de.d({px, py}) / eps); }, x.x, x.y, qo);
  out.In_term = eps * In;

  out.I1_term = Cn * frac_lap_1d(phi.as_line_field(), xi0, 1e-10);
  out.residual = std::abs(out.a_val - (out.In_term - out.I1_term));
  return out;
}

// Least-squares fit of log|err| = log C + p*log(rate): returns (C, p).
struct RateFit {
  double C = 0.0, p = 0.0;
};

inline RateFit fit_rate(const std::vector<double>& rate, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t k = 0; k < rate.size(); ++k) {
    if (err[k] <= 0.0 || rate[k] <= 0.0) continue;
    double lx = std::log(rate[k]), ly = std::log(err[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw std::runtime_error("fit_rate: need at least two positive samples");
  RateFit f;
  f.p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.C = std::exp((sy - f.p * sx) / n);
  return f;
}

}  // namespace fac
