// Acceptance suite: one PASS/FAIL line per criterion, exit code = #failures.
// Every tolerance is pinned here; sub-results print indented above the verdict.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "fac/presets.hpp"

namespace {

using fac::pi;

struct Verdict {
  bool pass = true;
  std::string detail;
  void gate(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? " [ok]" : " [FAIL]");
  }
};

std::string num(double v) { return fac::CsvWriter::num(v); }

Verdict from_outcome(const fac::PresetOutcome& oc) {
  Verdict v;
  for (const auto& c : oc.checks) {
    std::printf("    %-28s %s  (%s)\n", c.name.c_str(), c.pass ? "ok" : "FAIL",
                c.detail.c_str());
    v.gate(c.pass, c.name);
  }
  return v;
}

// 1. spectral operator vs closed-form symbol and direct kernel quadrature
Verdict criterion1() {
  fac::ConfigMap cfg;
  return from_outcome(fac::preset_operator_validation(cfg).outcome);
}

// 2. layer equation residual, cold-start solve, tail exponent
Verdict criterion2() {
  Verdict v;
  fac::Potential pot = fac::Potential::calibrated_cosine(2);
  const double Cn = fac::compute_Cn(2);
  fac::LayerProfile exact = fac::LayerProfile::exact();

  fac::LineField lf;
  lf.tail = fac::LineField::Tail::layer;
  lf.alpha = exact.alpha();
  lf.Xi = exact.window();
  lf.f = [&exact](double x) { return exact.eval(x); };
  double sup_res = 0.0;
  std::vector<double> pts = fac::sinh_grid(100.0, 80);
  for (double x : pts) {
    double r = Cn * fac::frac_lap_1d(lf, x, 1e-10) - pot.Wp(exact.eval(x));
    sup_res = std::max(sup_res, std::abs(r));
  }
  v.gate(sup_res <= 1e-6, "exact-profile residual " + num(sup_res) + " <= 1e-6");

  fac::LayerProfile solved = fac::LayerProfile::solve(pot, Cn);
  double sup_diff = 0.0;
  for (double x : solved.grid())
    sup_diff = std::max(sup_diff, std::abs(solved.eval(x) - exact.eval(x)));
  v.gate(sup_diff <= 1e-5, "solved-vs-exact sup " + num(sup_diff) + " <= 1e-5 (" +
                               std::to_string(solved.iterations()) + " iterations, residual " +
                               num(solved.residual_sup()) + ")");

  fac::TailFit tf = fac::fit_tail(solved);
  double alpha_err = std::abs(tf.alpha_hat - pi) / pi;
  v.gate(alpha_err <= 0.02,
         "tail alpha_hat " + num(tf.alpha_hat) + " within 2% of pi (rel err " + num(alpha_err) +
             ", envelope constant " + num(tf.C_bound) + ")");
  return v;
}

// 3. constants recomputed from quadrature
Verdict criterion3() {
  Verdict v;
  double C2 = fac::compute_Cn(2);
  v.gate(std::abs(C2 - 2.0) <= 1e-10, "C_2 = " + num(C2) + " vs 2 within 1e-10");
  fac::LayerProfile exact = fac::LayerProfile::exact();
  double c0 = fac::c0_from_profile(exact);
  v.gate(std::abs(c0 - 2.0 * pi) <= 1e-4, "c0 = " + num(c0) + " vs 2*pi within 1e-4");
  double mu = fac::mu_from_c0(c0, 2);
  v.gate(std::abs(mu - 2.0 * pi) <= 1e-4, "mu = " + num(mu) + " vs 2*pi within 1e-4");
  return v;
}

// 4-8 delegate to the shared presets at their pinned defaults.
Verdict criterion4() {
  fac::ConfigMap cfg;
  return from_outcome(fac::preset_abar_convergence(cfg).outcome);
}
Verdict criterion5() {
  fac::ConfigMap cfg;
  return from_outcome(fac::preset_circle_law(cfg).outcome);
}
Verdict criterion6() {
  fac::ConfigMap cfg;
  return from_outcome(fac::preset_nested_independence(cfg).outcome);
}
Verdict criterion7() {
  fac::ConfigMap cfg;
  return from_outcome(fac::preset_corrector_study(cfg).outcome);
}
Verdict criterion8() {
  fac::ConfigMap cfg;
  return from_outcome(fac::preset_barrier_check(cfg).outcome);
}

// 9. invariant suite: range, integer stationarity, comparison, flat-front drift
Verdict criterion9() {
  Verdict v;
  fac::Potential pot = fac::Potential::calibrated_cosine(2);
  fac::LayerProfile profile = fac::LayerProfile::exact();
  fac::DerivedConstants dc = fac::derived_constants(2, profile);

  {  // range preservation on a shrinking circle
    fac::SimConfig sc;
    sc.eps = 0.1;
    sc.L = 4.0;
    sc.M = 256;
    sc.T_final = 0.01;
    sc.frames = 4;
    sc.loops.loops = {fac::LoopShape{{0, 0}, 0.8, {}, {}}};
    fac::FrontTrace tr = fac::run_simulation(sc, profile, pot);
    bool ok = tr.range.first >= -1e-6 && tr.range.second <= 1.0 + 1e-6;
    v.gate(ok, "range [" + num(tr.range.first) + ", " + num(tr.range.second) +
                   "] within [0,1] + 1e-6");
  }

  {  // integer constants are stationary
    fac::PeriodicField u = fac::PeriodicField::zeros(128, 4.0);
    for (auto& q : u.v) q = 1.0;
    const double eps = 0.1, lne = std::abs(std::log(eps));
    const double dt = eps * eps * lne / (4.0 * pot.max_abs_Wpp());
    for (int s = 0; s < 50; ++s) fac::step(u, dt, eps, lne, dc.kappa, pot);
    double dev = 0.0;
    for (double q : u.v) dev = std::max(dev, std::abs(q - 1.0));
    v.gate(dev <= 1e-12, "integer-constant drift " + num(dev) + " <= 1e-12 after 50 steps");
  }

  {  // discrete comparison: nested initial data stay ordered
    const double eps = 0.1, lne = std::abs(std::log(eps));
    const double dt = eps * eps * lne / (4.0 * pot.max_abs_Wpp());
    fac::LoopConfig inner, outer;
    inner.loops = {fac::LoopShape{{0, 0}, 0.7, {}, {}}};
    outer.loops = {fac::LoopShape{{0, 0}, 1.0, {}, {}}};
    fac::PeriodicField u = fac::build_initial_condition(inner, eps, profile, 256, 4.0);
    fac::PeriodicField w = fac::build_initial_condition(outer, eps, profile, 256, 4.0);
    double min0 = 1e300;
    for (size_t q = 0; q < u.v.size(); ++q) min0 = std::min(min0, w.v[q] - u.v[q]);
    for (int s = 0; s < 15; ++s) {
      fac::step(u, dt, eps, lne, dc.kappa, pot);
      fac::step(w, dt, eps, lne, dc.kappa, pot);
    }
    double minT = 1e300;
    for (size_t q = 0; q < u.v.size(); ++q) minT = std::min(minT, w.v[q] - u.v[q]);
    v.gate(minT >= -1e-12, "comparison min(w-u): " + num(min0) + " initially, " + num(minT) +
                               " after 15 steps (>= -1e-12)");
  }

  {  // straight front in the winding frame: drift shrinks at least 4x per refinement
    const double eps = 0.15, L = 4.0, lne = std::abs(std::log(eps));
    const double dt = eps * eps * lne / (4.0 * pot.max_abs_Wpp());
    const int burn = 200, meas = 200;
    std::vector<double> drift;
    for (int M : {128, 256, 512}) {
      fac::PeriodicField vfield = fac::PeriodicField::zeros(M, L);
      std::vector<double> ramp(vfield.v.size());
      for (int j = 0; j < M; ++j)
        for (int i = 0; i < M; ++i) {
          double x = vfield.x(i);
          ramp[static_cast<size_t>(j) * M + i] = x / L + 0.5;
          vfield.v[static_cast<size_t>(j) * M + i] =
              profile.eval(x / eps) - (x / L + 0.5);
        }
      auto mean = [&vfield]() {
        double s = 0.0;
        for (double q : vfield.v) s += q;
        return s / static_cast<double>(vfield.v.size());
      };
      for (int s = 0; s < burn; ++s)
        fac::step(vfield, dt, eps, lne, dc.kappa, pot, ramp.data());
      double m0 = mean();
      for (int s = 0; s < meas; ++s)
        fac::step(vfield, dt, eps, lne, dc.kappa, pot, ramp.data());
      drift.push_back(std::abs(mean() - m0));
    }
    bool ok = true;
    for (size_t k = 0; k + 1 < drift.size(); ++k)
      ok = ok && drift[k + 1] <= std::max(drift[k] / 4.0, 1e-12);
    v.gate(ok, "flat-front drift per refinement: " + num(drift[0]) + " -> " + num(drift[1]) +
                   " -> " + num(drift[2]) + " (each <= max(prev/4, 1e-12))");
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
      if (only < 1 || only > 9) {
        std::fprintf(stderr, "--criterion takes 1..9\n");
        return 64;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]   (default: all nine)\n", argv[0]);
      return std::strcmp(argv[i], "--help") == 0 ? 0 : 64;
    }
  }
  using Fn = Verdict (*)();
  const Fn fns[9] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                     criterion6, criterion7, criterion8, criterion9};
  int fails = 0;
  for (int k = 1; k <= 9; ++k) {
    if (only && k != only) continue;
    Verdict v;
    try {
      v = fns[k - 1]();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    std::printf("CRITERION %d: %s — %s\n", k, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++fails;
  }
  return fails;
}
