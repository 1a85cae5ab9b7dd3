#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fac/constants.hpp"
#include "fac/fracops.hpp"
#include "fac/geometry.hpp"
#include "fac/layer.hpp"
#include "fac/potential.hpp"

namespace fac {

struct SimAbort : std::runtime_error {
  int step;
  double time;
  SimAbort(const std::string& what, int s, double t) : std::runtime_error(what), step(s), time(t) {}
};

struct SimConfig {
  double eps = 0.05;
  double L = 4.0;
  int M = 512;
  double dt = 0.0;  // 0: use dt_max
  double T_final = 0.05;
  int frames = 24;  // measurement instants
  int n = 2;
  LoopConfig loops;
  double plateau_margin_factor = 3.0;  // erosion = factor * eps
  bool keep_frames = false;

  double lne() const { return std::abs(std::log(eps)); }

  // stiff explicit reaction bounds the step; the implicit nonlocal part has no CFL
  double dt_max(const Potential& pot) const {
    return eps * eps * lne() / (4.0 * pot.max_abs_Wpp());
  }

  void validate(const Potential& pot) const {
    if (L / M > eps / 4.0 + 1e-12)
      throw std::invalid_argument("sim: resolution policy h <= eps/4 violated (M=" +
                                  std::to_string(M) + ", eps=" + std::to_string(eps) + ")");
    if (dt > 0.0 && dt > dt_max(pot) * (1.0 + 1e-12))
      throw std::invalid_argument("sim: dt exceeds the stability policy");
    if (!is_pow2(M)) throw std::invalid_argument("sim: M must be a power of two");
    loops.validate(L);
  }
};

inline void step(PeriodicField& u, double dt, double eps, double lne, double kappa,
                 const Potential& pot, const double* ramp = nullptr) {
  SpectralWorkspace::get(u.M).imex_step(u, dt, eps, lne, kappa,
                                        [&pot](double v) { return pot.Wp(v); }, ramp);
}

struct FrontTrace {
  int N = 0;
  double mu = 0.0, c0 = 0.0, dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<FrontStats>> stats;       // [time][front]
  std::vector<std::vector<PlateauStats>> plateaus;  // [time][level N..0]
  std::vector<std::vector<Polyline>> frames;        // kept only on request
  std::pair<double, double> range{0.0, 0.0};        // global min/max over the run

  // radius series for one front (NaN once extinct)
  std::vector<double> radius_series(int front) const {
    std::vector<double> r;
    for (const auto& s : stats)
      r.push_back(s[front].empty ? std::nan("") : s[front].r_eff);
    return r;
  }
};

inline double exact_circle_radius(double R0, double mu, double t) {
  double rr = R0 * R0 - 2.0 * mu * t;
  if (rr < -1e-12) throw std::invalid_argument("exact_circle_radius: past extinction");
  return std::sqrt(std::max(rr, 0.0));
}

inline FrontTrace run_simulation(const SimConfig& cfg, const LayerProfile& profile,
                                 const Potential& pot) {
  cfg.validate(pot);
  DerivedConstants dc = derived_constants(cfg.n);
  const double c0 = c0_from_profile(profile);
  const double mu = mu_from_c0(c0, cfg.n);
  const double dt = (cfg.dt > 0.0) ? cfg.dt : cfg.dt_max(pot);
  const int N = cfg.loops.count();
  const int nsteps = std::max(1, static_cast<int>(std::ceil(cfg.T_final / dt)));
  const int every = std::max(1, nsteps / std::max(1, cfg.frames));

  PeriodicField u = build_initial_condition(cfg.loops, cfg.eps, profile, cfg.M, cfg.L);

  FrontTrace tr;
  tr.N = N;
  tr.mu = mu;
  tr.c0 = c0;
  tr.dt = dt;
  tr.range = u.minmax();

  auto measure = [&](double t) {
    auto fronts = extract_fronts(u, N);
    std::vector<FrontStats> st;
    for (const auto& f : fronts) st.push_back(front_statistics(f));
    tr.times.push_back(t);
    tr.plateaus.push_back(plateau_statistics(u, fronts, cfg.plateau_margin_factor * cfg.eps));
    tr.stats.push_back(std::move(st));
    if (cfg.keep_frames) tr.frames.push_back(std::move(fronts));
    bool alive = false;
    for (const auto& s : tr.stats.back()) alive = alive || !s.empty;
    return alive;
  };

  measure(0.0);
  for (int s = 1; s <= nsteps; ++s) {
    step(u, dt, cfg.eps, cfg.lne(), dc.kappa, pot);
    auto mm = u.minmax();
    if (!std::isfinite(mm.first) || !std::isfinite(mm.second))
      throw SimAbort("sim: non-finite field", s, s * dt);
    tr.range.first = std::min(tr.range.first, mm.first);
    tr.range.second = std::max(tr.range.second, mm.second);
    if (s % every == 0 || s == nsteps) {
      if (!measure(s * dt)) break;  // total extinction
    }
  }
  return tr;
}

// ------------------------------------------------- level-set reference flow

// Explicit finite differences for  u_t = mu [Laplacian u - <grad, D2 grad>/(|grad|^2+delta^2)].
inline PeriodicField mcf_levelset_reference(const PeriodicField& d0, double mu, double T,
                                            double delta = 1e-6) {
  PeriodicField u = d0;
  const int M = u.M;
  const double h = u.h();
  const double dt_cfl = h * h / (8.0 * mu);
  const int nsteps = std::max(1, static_cast<int>(std::ceil(T / dt_cfl)));
  const double dt = T / nsteps;
  if (dt > h * h / (8.0 * mu) * (1.0 + 1e-12))
    throw std::invalid_argument("mcf reference: CFL violation");
  PeriodicField nu = u;
  auto idx = [M](int i) { return (i + M) % M; };
  for (int s = 0; s < nsteps; ++s) {
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j < M; ++j) {
        double c = u.at(i, j);
        double xp = u.at(idx(i + 1), j), xm = u.at(idx(i - 1), j);
        double yp = u.at(i, idx(j + 1)), ym = u.at(i, idx(j - 1));
        double ux = (xp - xm) / (2 * h), uy = (yp - ym) / (2 * h);
        double uxx = (xp - 2 * c + xm) / (h * h), uyy = (yp - 2 * c + ym) / (h * h);
        double uxy = (u.at(idx(i + 1), idx(j + 1)) - u.at(idx(i + 1), idx(j - 1)) -
                      u.at(idx(i - 1), idx(j + 1)) + u.at(idx(i - 1), idx(j - 1))) /
                     (4 * h * h);
        double g2 = ux * ux + uy * uy + delta * delta;
        double curv = uxx + uyy - (ux * ux * uxx + 2 * ux * uy * uxy + uy * uy * uyy) / g2;
        nu.at(i, j) = c + dt * mu * curv;
      }
    }
    u.v.swap(nu.v);
  }
  return u;
}

inline double zero_level_radius(const PeriodicField& f) {
  auto cs = marching_squares(f, 0.0);
  double best = 0.0;
  for (const auto& pl : cs) best = std::max(best, std::abs(polygon_area(pl)));
  return std::sqrt(best / pi);
}

// ------------------------------------------------- interaction drift study

struct DriftRow {
  double eps = 0.0, separation = 0.0;
  double deviation = 0.0;        // max |R_inner^{N=2} - R_inner^{N=1}|
  double deviation_scaled = 0.0; // deviation * |ln eps|
};

// Deviation of the inner front from its single-front control, for two
// concentric circles; grid chosen per the resolution policy.
inline DriftRow interaction_drift_case(double eps, double R_out, double R_in, double T,
                                       const LayerProfile& profile, const Potential& pot,
                                       double L = 4.0, int frames = 12) {
  int M = 64;
  while (L / M > eps / 4.0) M *= 2;
  SimConfig pair_cfg;
  pair_cfg.eps = eps;
  pair_cfg.L = L;
  pair_cfg.M = M;
  pair_cfg.T_final = T;
  pair_cfg.frames = frames;
  pair_cfg.loops.loops = {LoopShape{{0, 0}, R_out, {}, {}}, LoopShape{{0, 0}, R_in, {}, {}}};
  SimConfig solo_cfg = pair_cfg;
  solo_cfg.loops.loops = {LoopShape{{0, 0}, R_in, {}, {}}};

  FrontTrace pair_tr = run_simulation(pair_cfg, profile, pot);
  FrontTrace solo_tr = run_simulation(solo_cfg, profile, pot);

  DriftRow row;
  row.eps = eps;
  row.separation = R_out - R_in;
  size_t nt = std::min(pair_tr.times.size(), solo_tr.times.size());
  auto rp = pair_tr.radius_series(1);
  auto rs = solo_tr.radius_series(0);
  for (size_t k = 0; k < nt; ++k) {
    if (std::isnan(rp[k]) || std::isnan(rs[k])) break;
    row.deviation = std::max(row.deviation, std::abs(rp[k] - rs[k]));
  }
  row.deviation_scaled = row.deviation * std::abs(std::log(eps));
  return row;
}

}  // namespace fac
