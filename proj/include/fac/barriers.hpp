#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fac/aeps.hpp"
#include "fac/constants.hpp"
#include "fac/corrector.hpp"
#include "fac/evolve.hpp"
#include "fac/fracops.hpp"
#include "fac/geometry.hpp"
#include "fac/interp.hpp"
#include "fac/layer.hpp"
#include "fac/potential.hpp"

namespace fac {

// Concentric shrinking-circle subsolution family
//   v(t,x) = sum_i phi((d_i - s~)/eps) + eps|ln eps| sum_i psi_i - s~ eps|ln eps|
// with radius law R_i(t) = R_i(0) - C t.
struct BarrierSpec {
  std::vector<double> R0;  // outermost first
  Vec2 center{0.0, 0.0};
  double eps = 0.025;
  double gamma = 0.5;
  double sigma_tilde = 0.05;
  double sigma = 0.0;
  double C_shrink = 0.0;
  double rho = 0.0;  // clamp radius of the distance extension
  const LayerProfile* profile = nullptr;
  const Potential* pot = nullptr;
  DerivedConstants dc;

  int N() const { return static_cast<int>(R0.size()); }
  double lne() const { return std::abs(std::log(eps)); }
  double radius(int i, double t) const { return R0[i] - C_shrink * t; }

  void validate() const {
    if (R0.empty()) throw std::invalid_argument("barrier: no fronts");
    for (size_t i = 0; i + 1 < R0.size(); ++i) {
      if (R0[i] <= R0[i + 1]) throw std::invalid_argument("barrier: radii must decrease");
      if (R0[i] - R0[i + 1] <= 4.0 * sigma_tilde)
        throw std::invalid_argument("barrier: sigma-bands of fronts " + std::to_string(i) +
                                    "," + std::to_string(i + 1) + " overlap");
    }
    if (!(eps > 0.0 && eps < gamma)) throw std::invalid_argument("barrier: need 0 < eps < gamma");
    if (!profile || !pot) throw std::invalid_argument("barrier: profile/potential required");
    if (std::abs(sigma_tilde * pot->Wpp(0.0) - sigma) > 1e-12)
      throw std::invalid_argument("barrier: sigma != sigma_tilde W''(0)");
  }
};

inline BarrierSpec make_barrier_spec(std::vector<double> radii, double eps, double sigma_tilde,
                                     const LayerProfile& profile, const Potential& pot,
                                     const DerivedConstants& dc, double gamma = 0.5) {
  BarrierSpec sp;
  sp.R0 = std::move(radii);
  sp.eps = eps;
  sp.gamma = gamma;
  sp.sigma_tilde = sigma_tilde;
  sp.sigma = sigma_tilde * pot.Wpp(0.0);
  sp.profile = &profile;
  sp.pot = &pot;
  sp.dc = dc;
  // shrink speed large enough that each front strictly outruns its curvature
  sp.C_shrink = 4.0 * dc.mu * (dc.n - 1) / sp.R0.back() + dc.c0 * sp.sigma;
  double m = sp.R0.back();
  for (size_t i = 0; i + 1 < sp.R0.size(); ++i) m = std::min(m, sp.R0[i] - sp.R0[i + 1]);
  sp.rho = 0.4 * m;
  sp.validate();
  return sp;
}

// One-time assembly: distance evaluators plus radially tabulated correctors
// psi_i(xi; r) for every front at a frozen time.
class BarrierAssembly {
 public:
  BarrierAssembly(const CorrectorOperator& op, const BarrierSpec& spec, double t,
                  int n_radial = 32, int coarse_m = 96, bool with_psi = true)
      : spec_(spec), t_(t) {
    spec.validate();
    const int N = spec.N();
    dist_.reserve(N);
    for (int i = 0; i < N; ++i) {
      double R = spec.radius(i, t);
      if (R <= 2.0 * spec.rho)
        throw std::invalid_argument("barrier: front " + std::to_string(i) +
                                    " shrank into the clamp radius");
      LoopShape c;
      c.center = spec.center;
      c.R0 = R;
      dist_.emplace_back(c, spec.rho);
    }
    if (!with_psi) return;

    xi_grid_ = op.grid();
    psi_r_.assign(N, {});
    psi_tab_.assign(N, {});
    for (int i = 0; i < N; ++i) {
      const double R = spec.radius(i, t);
      std::vector<double> rn = sinh_grid(0.8, n_radial, 2.0);
      for (double& r : rn) r += R;
      // keep nodes strictly positive and off the center
      std::vector<double> rr;
      for (double r : rn)
        if (r > 0.02) rr.push_back(r);
      psi_r_[i] = rr;
      AepsParams ap;
      ap.eps = spec.eps;
      ap.gamma = spec.gamma;
      ap.profile = spec.profile;
      ap.dist = &dist_[i];
      AepsQuadOpts aq;
      aq.n_theta = 48;
      aq.tol = 1e-8;
      aq.rel_tol = 1e-6;
      aq.max_refine = 2;
      for (double r : rr) {
        CorrectorProblem prob = make_frozen_problem_opts(op, spec, ap, {spec.center.x + r,
                                                          spec.center.y}, coarse_m, aq);
        CorrectorSolution sol = op.solve(g_vector(prob));
        psi_tab_[i].emplace_back(xi_grid_, sol.psi);
      }
    }
  }

  double time() const { return t_; }
  const DistanceEval& dist(int i) const { return dist_[i]; }
  bool has_psi() const { return !psi_tab_.empty(); }

  // clamped radial blend of the tabulated correctors; 1/xi continuation
  // beyond the transversal window
  double psi(int i, double xi, double r) const {
    const auto& rn = psi_r_[i];
    const auto& tab = psi_tab_[i];
    double rc = std::clamp(r, rn.front(), rn.back());
    size_t k = std::upper_bound(rn.begin(), rn.end(), rc) - rn.begin();
    k = std::min(std::max<size_t>(k, 1), rn.size() - 1);
    double w = (rc - rn[k - 1]) / (rn[k] - rn[k - 1]);
    auto eval1 = [&](const CubicSpline& s) {
      double Xi = xi_grid_.back();
      if (xi > Xi) return s(Xi) * Xi / xi;
      if (xi < -Xi) return s(-Xi) * (-Xi) / xi;
      return s(xi);
    };
    return (1.0 - w) * eval1(tab[k - 1]) + w * eval1(tab[k]);
  }

  double value(Vec2 x) const {
    const double eps = spec_.eps, lne = spec_.lne(), st = spec_.sigma_tilde;
    double v = -st * eps * lne;
    for (int i = 0; i < spec_.N(); ++i) {
      double xi = (dist_[i].d(x) - st) / eps;
      v += spec_.profile->eval(xi);
      if (has_psi()) v += eps * lne * psi(i, xi, norm(x - spec_.center));
    }
    return v;
  }

  PeriodicField assemble(int M, double L) const {
    PeriodicField f = PeriodicField::zeros(M, L);
    f.fill([&](double x, double y) { return value({x, y}); });
    return f;
  }

 private:
  static CorrectorProblem make_frozen_problem_opts(const CorrectorOperator& op,
                                                   const BarrierSpec& spec,
                                                   const AepsParams& ap, Vec2 x, int coarse_m,
                                                   const AepsQuadOpts& aq) {
    CorrectorProblem prob;
    prob.eps = spec.eps;
    prob.sigma = spec.sigma;
    prob.sigma_tilde = spec.sigma_tilde;
    prob.lne = spec.lne();
    prob.profile = spec.profile;
    prob.pot = spec.pot;
    prob.Cn = spec.dc.Cn;
    prob.c0 = spec.dc.c0;
    prob.xi = op.grid();
    std::vector<double> cx = sinh_grid(prob.xi.back(), coarse_m);
    std::vector<double> ca(cx.size());
    for (size_t j = 0; j < cx.size(); ++j) ca[j] = a_eps(ap, cx[j], x, aq);
    CubicSpline sa(cx, ca);
    prob.a_vals.resize(prob.xi.size());
    for (size_t j = 0; j < prob.xi.size(); ++j) prob.a_vals[j] = sa(prob.xi[j]);
    prob.abar = abar_from_nodes(prob.xi, prob.a_vals, *spec.profile, spec.eps);
    return prob;
  }

  const BarrierSpec& spec_;
  double t_;
  std::vector<DistanceEval> dist_;
  std::vector<std::vector<double>> psi_r_;
  std::vector<std::vector<CubicSpline>> psi_tab_;
  std::vector<double> xi_grid_;
};

// ------------------------------------------------------- subsolution check

struct SlackSample {
  double t = 0.0;
  Vec2 x;
  int band = -1;  // front index, or -1 for the coarse lattice
  double J = 0.0;
};

struct SlackReport {
  double worst = -1e300;
  double threshold = 0.0;  // -sigma/4
  size_t n_samples = 0;
  double band_halfwidth = 0.0;
  bool band_capped = false;  // |ln eps|^{-1/2} exceeded the clamp scale
  bool pass = false;
  std::vector<SlackSample> worst_rows;  // a few most offending samples
};

// J[v] = eps v_t - (eps |ln eps|)^{-1} (eps I_2 v - W'(v)) at stratified
// samples: dense near each front band plus a coarse global lattice.
inline SlackReport check_subsolution(const CorrectorOperator& op, const BarrierSpec& spec,
                                     double t, int M, double L, double dt_fd = 1e-5,
                                     int lattice_stride = 8) {
  spec.validate();
  BarrierAssembly Am(op, spec, t - dt_fd), A0(op, spec, t), Ap(op, spec, t + dt_fd);
  PeriodicField vm = Am.assemble(M, L), v0 = A0.assemble(M, L), vp = Ap.assemble(M, L);
  PeriodicField In = frac_lap_spectral(v0, spec.dc.kappa);

  const double eps = spec.eps, lne = spec.lne();
  SlackReport rep;
  rep.threshold = -spec.sigma / 4.0;
  double raw_bw = 1.0 / std::sqrt(lne);
  rep.band_halfwidth = std::min(raw_bw, spec.rho);
  rep.band_capped = raw_bw > spec.rho;

  auto J_at = [&](size_t q) {
    double dvdt = (vp.v[q] - vm.v[q]) / (2.0 * dt_fd);
    return eps * dvdt - (eps * In.v[q] - spec.pot->Wp(v0.v[q])) / (eps * lne);
  };

  std::vector<SlackSample> rows;
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      Vec2 x{v0.x(i), v0.x(j)};
      int band = -1;
      for (int f = 0; f < spec.N(); ++f)
        if (std::abs(A0.dist(f).d(x) - spec.sigma_tilde) <= rep.band_halfwidth) {
          band = f;
          break;
        }
      if (band < 0 && (i % lattice_stride || j % lattice_stride)) continue;
      size_t q = static_cast<size_t>(i) * M + j;
      double J = J_at(q);
      ++rep.n_samples;
      if (J > rep.worst) {
        rep.worst = J;
        rows.push_back({t, x, band, J});
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.J > b.J; });
  if (rows.size() > 8) rows.resize(8);
  rep.worst_rows = std::move(rows);
  rep.pass = rep.worst <= rep.threshold;
  return rep;
}

// ------------------------------------------------------- plateau estimate

struct PlateauBound {
  double threshold_asymptotic = 0.0;  // 1/(sigma_tilde |ln eps|)
  double threshold_used = 0.0;
  bool asymptotic_region_empty = false;
  double bound = 0.0;       // N - 2 sigma_tilde eps |ln eps|
  double min_v = 0.0;       // min of v over the tested region
  size_t n_points = 0;
  bool pass_vacuous = false;  // the paper's hypothesis set is empty in the box
  bool pass_capped = false;   // v >= bound on the capped region
};

// "deep inside all fronts" estimate: v >= N - 2 sigma_tilde eps |ln eps| on
// {d_N - sigma_tilde >= 1/(sigma_tilde |ln eps|)}.  At desk scale the
// hypothesis region is usually empty (the clamp caps d at 2 rho); we then
// report vacuous truth plus an informational capped-region margin.
inline PlateauBound check_plateau_bound(const CorrectorOperator& op, const BarrierSpec& spec,
                                        double t, int M, double L) {
  BarrierAssembly A0(op, spec, t);
  PeriodicField v0 = A0.assemble(M, L);
  PlateauBound pb;
  const int N = spec.N();
  pb.threshold_asymptotic = 1.0 / (spec.sigma_tilde * spec.lne());
  pb.bound = N - 2.0 * spec.sigma_tilde * spec.eps * spec.lne();

  double max_excess = -1e300;
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      max_excess = std::max(
          max_excess, A0.dist(N - 1).d({v0.x(i), v0.x(j)}) - spec.sigma_tilde);
  pb.asymptotic_region_empty = max_excess < pb.threshold_asymptotic;
  pb.threshold_used =
      pb.asymptotic_region_empty ? 0.8 * max_excess : pb.threshold_asymptotic;

  double mn = 1e300;
  size_t cnt = 0;
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      Vec2 x{v0.x(i), v0.x(j)};
      if (A0.dist(N - 1).d(x) - spec.sigma_tilde >= pb.threshold_used) {
        mn = std::min(mn, v0.v[static_cast<size_t>(i) * M + j]);
        ++cnt;
      }
    }
  }
  pb.min_v = (cnt ? mn : 0.0);
  pb.n_points = cnt;
  pb.pass_vacuous = pb.asymptotic_region_empty;
  pb.pass_capped = cnt > 0 && mn >= pb.bound;
  return pb;
}

// ------------------------------------------------- comparison-principle check

struct ComparisonReport {
  double min_margin = 1e300;  // min over sampled times of min(u - v)
  std::vector<double> times;
  std::vector<double> margins;
  bool pass = false;
};

// Evolve u from u0 = v(0,.) and require u >= v(t,.) - tol at sampled times.
inline ComparisonReport barrier_comparison_check(const CorrectorOperator& op,
                                                 const BarrierSpec& spec, int M, double L,
                                                 double T, int checks = 3, double tol = 5e-3) {
  BarrierAssembly A0(op, spec, 0.0);
  PeriodicField u = A0.assemble(M, L);
  const double dt = spec.eps * spec.eps * spec.lne() / (4.0 * spec.pot->max_abs_Wpp());
  const int nsteps = std::max(1, static_cast<int>(std::ceil(T / dt)));
  ComparisonReport rep;
  int next = 1;
  for (int s = 1; s <= nsteps; ++s) {
    step(u, dt, spec.eps, spec.lne(), spec.dc.kappa, *spec.pot);
    if (s == next * nsteps / checks || s == nsteps) {
      double t = s * dt;
      BarrierAssembly At(op, spec, t);
      PeriodicField vt = At.assemble(M, L);
      double m = 1e300;
      for (size_t q = 0; q < u.v.size(); ++q) m = std::min(m, u.v[q] - vt.v[q]);
      rep.times.push_back(t);
      rep.margins.push_back(m);
      rep.min_margin = std::min(rep.min_margin, m);
      ++next;
      if (next > checks) break;
    }
  }
  rep.pass = rep.min_margin >= -tol;
  return rep;
}

}  // namespace fac
