#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fac/corrector.hpp"

using namespace fac;

namespace {
struct Fixture {
  Potential pot = Potential::calibrated_cosine(2);
  LayerProfile profile = LayerProfile::exact();
  DerivedConstants dc = derived_constants(2, profile);
  CorrectorOperator op{profile, pot, dc.Cn, 60.0, 480};
};

Fixture& fx() {
  static Fixture f;  // the operator factorization is the expensive part
  return f;
}
}

TEST_CASE("zero-tail matrix reproduces the Gaussian oracle", "[corrector]") {
  // I_1[exp(-x^2)](0) = -2 sqrt(pi)
  const auto& xi = fx().op.grid();
  const int n = static_cast<int>(xi.size());
  Eigen::VectorXd g(n);
  for (int j = 0; j < n; ++j) g(j) = std::exp(-xi[j] * xi[j]);
  Eigen::VectorXd r = fx().op.i1_matrix() * g;
  CHECK(r(n / 2) == Catch::Approx(-2.0 * std::sqrt(pi)).margin(5e-5));
}

TEST_CASE("profile derivative spans the discrete kernel", "[corrector]") {
  // coarse-core interpolation floor of this unit fixture is ~3e-5; the
  // acceptance operator runs the fine grid where the residual is ~6e-6
  CHECK(fx().op.kernel_check() <= 1e-4);
  // a miscalibrated profile must be detected
  const auto& xi = fx().op.grid();
  std::vector<double> bump(xi.size());
  for (size_t j = 0; j < xi.size(); ++j) bump[j] = 0.01 * std::exp(-xi[j] * xi[j]);
  CHECK(fx().op.kernel_check(&bump) > 1e-3);
}

TEST_CASE("bordered solve enforces the Fredholm constraint", "[corrector]") {
  auto chi = [](double x) { return x * std::exp(-x * x / 8.0); };
  const auto& xi = fx().op.grid();
  LineField lf;
  lf.tail = LineField::Tail::zero;
  lf.Xi = 40.0;
  lf.f = chi;
  std::vector<double> g(xi.size());
  for (size_t j = 0; j < xi.size(); ++j)
    g[j] = -fx().dc.Cn * frac_lap_1d(lf, xi[j], 1e-11) +
           fx().pot.Wpp(fx().profile.eval(xi[j])) * chi(xi[j]);
  CorrectorSolution sol = fx().op.solve(g);
  CHECK(sol.constraint_residual <= 1e-10);
  CHECK(std::abs(sol.lambda) <= 1e-5);
  double sup = 0.0;
  for (size_t j = 0; j < xi.size(); ++j) sup = std::max(sup, std::abs(sol.psi[j] - chi(xi[j])));
  CHECK(sup <= 5e-4);  // coarse grid; the acceptance run uses the fine one at 1e-4
}

TEST_CASE("frozen-coefficient problem is orthogonal and solvable", "[corrector]") {
  LoopShape circle{{0.0, 0.0}, 1.0, {}, {}};
  DistanceEval dist(circle, 0.4);
  AepsParams ap;
  ap.eps = 0.05;
  ap.gamma = 0.5;
  ap.profile = &fx().profile;
  ap.dist = &dist;
  CorrectorProblem prob = make_frozen_problem(fx().op, fx().profile, fx().pot, fx().dc, 0.05,
                                              0.0, ap, {1.0, 0.0}, 96);
  // the floor is |abar| * c0 * \int_{|xi|>Xi} phid^2 ~ 1e-6 on this short window
  CHECK(orthogonality_residual(prob) <= 5e-6);
  CorrectorSolution sol = fx().op.solve_problem(prob);
  CHECK(sol.constraint_residual <= 1e-10);
  double sup = 0.0;
  for (double v : sol.psi) sup = std::max(sup, std::abs(v));
  CHECK(sup > 1e-4);   // nontrivial
  CHECK(sup < 10.0);   // bounded
}

TEST_CASE("problem invariants", "[corrector]") {
  CorrectorProblem prob;
  prob.eps = 0.05;
  prob.sigma = 0.1;
  prob.sigma_tilde = 0.9;  // violates sigma_tilde * Wpp(0) = sigma
  prob.lne = std::abs(std::log(0.05));
  prob.profile = &fx().profile;
  prob.pot = &fx().pot;
  prob.Cn = fx().dc.Cn;
  prob.c0 = fx().dc.c0;
  CHECK_THROWS_AS(prob.check(), std::invalid_argument);
  prob.sigma_tilde = prob.sigma / fx().pot.Wpp(0.0);
  CHECK_NOTHROW(prob.check());
}

TEST_CASE("solve_problem rejects non-orthogonal data", "[corrector]") {
  // forge a problem whose g is deliberately not orthogonal to phid
  LoopShape circle{{0.0, 0.0}, 1.0, {}, {}};
  DistanceEval dist(circle, 0.4);
  AepsParams ap;
  ap.eps = 0.05;
  ap.gamma = 0.5;
  ap.profile = &fx().profile;
  ap.dist = &dist;
  CorrectorProblem prob = make_frozen_problem(fx().op, fx().profile, fx().pot, fx().dc, 0.05,
                                              0.0, ap, {1.0, 0.0}, 96);
  prob.abar += 0.1;  // breaks the cancellation built into g
  CHECK_THROWS_AS(fx().op.solve_problem(prob), std::runtime_error);
}
