#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fac/layer.hpp"

using namespace fac;

namespace {
double phi_closed(double x) { return 0.5 + std::atan(x) / pi; }
}

TEST_CASE("exact profile closed forms", "[layer]") {
  LayerProfile p = LayerProfile::exact();
  CHECK(p.alpha() == Catch::Approx(pi).epsilon(1e-12));
  CHECK(p.eval(0.0) == Catch::Approx(0.5).margin(1e-12));
  for (double x : {-30.0, -2.0, -0.3, 0.0, 0.7, 5.0, 80.0})
    CHECK(p.eval(x) == Catch::Approx(phi_closed(x)).margin(1e-9));
  // first derivative 1/(pi (1+x^2)), second -2x/(pi (1+x^2)^2)
  CHECK(p.eval(0.0, 1) == Catch::Approx(1.0 / pi).margin(1e-9));
  CHECK(p.eval(2.0, 1) == Catch::Approx(1.0 / (5.0 * pi)).margin(1e-7));
  CHECK(p.eval(2.0, 2) == Catch::Approx(-4.0 / (25.0 * pi)).margin(1e-5));
}

TEST_CASE("profile tail laws beyond the window", "[layer]") {
  LayerProfile p = LayerProfile::exact();
  double Xi = p.window();
  double far = 2.0 * Xi;
  CHECK(p.eval(far) == Catch::Approx(1.0 - 1.0 / (pi * far)).margin(1e-8));
  CHECK(p.eval(-far) == Catch::Approx(1.0 / (pi * far)).margin(1e-8));
  CHECK(p.eval(far, 1) == Catch::Approx(1.0 / (pi * far * far)).epsilon(1e-2));
  CHECK(p.eval(far, 2) == Catch::Approx(-2.0 / (pi * far * far * far)).epsilon(5e-2));
}

TEST_CASE("sinh grid is symmetric, pinned, and graded", "[layer]") {
  auto g = sinh_grid(100.0, 240);
  REQUIRE(g.size() == 241);
  CHECK(g[120] == 0.0);
  CHECK(g.front() == Catch::Approx(-100.0).epsilon(1e-13));
  CHECK(g.back() == Catch::Approx(100.0).epsilon(1e-13));
  for (size_t j = 0; j < g.size(); ++j) CHECK(g[j] == Catch::Approx(-g[g.size() - 1 - j]).margin(1e-12));
  CHECK(g[121] - g[120] < (g[240] - g[239]) / 20.0);  // strong central refinement
}

TEST_CASE("layer equation oracle: I1 of the arctan profile", "[layer]") {
  LayerProfile p = LayerProfile::exact();
  LineField lf = p.as_line_field();
  for (double x : {0.0, 0.5, -0.5, 2.0, -7.0, 30.0}) {
    double want = -x / (1.0 + x * x);
    CHECK(frac_lap_1d(lf, x, 1e-10) == Catch::Approx(want).margin(2e-7));
  }
}

TEST_CASE("layer equation residual of the exact profile", "[layer]") {
  Potential pot = Potential::calibrated_cosine(2);
  LayerProfile p = LayerProfile::exact();
  double Cn = compute_Cn(2);
  LineField lf = p.as_line_field();
  for (double x : {0.0, 1.5, -4.0, 15.0}) {
    double res = Cn * frac_lap_1d(lf, x, 1e-10) - pot.Wp(p.eval(x));
    CHECK(std::abs(res) < 1e-6);
  }
}

TEST_CASE("cold-start solve recovers the calibrated profile", "[layer]") {
  Potential pot = Potential::calibrated_cosine(2);
  LayerProfile p = LayerProfile::solve(pot, compute_Cn(2), 60.0, 600, 1e-6, 30, 6);
  CHECK(p.residual_sup() < 1e-6);
  double sup = 0.0;
  for (double x : p.grid()) sup = std::max(sup, std::abs(p.eval(x) - phi_closed(x)));
  CHECK(sup < 1e-4);
  CHECK(p.eval(0.0) == Catch::Approx(0.5).margin(1e-8));  // recentred
}

TEST_CASE("tail fit recovers alpha", "[layer]") {
  LayerProfile p = LayerProfile::exact();
  TailFit tf = fit_tail(p);
  CHECK(tf.alpha_hat == Catch::Approx(pi).epsilon(1e-3));
  CHECK(tf.C_bound < 1.0);
}

TEST_CASE("normalization constant and velocity", "[layer]") {
  LayerProfile p = LayerProfile::exact();
  double c0 = c0_from_profile(p);
  CHECK(c0 == Catch::Approx(2.0 * pi).margin(1e-5));
  CHECK(mu_from_c0(c0, 2) == Catch::Approx(2.0 * pi).margin(1e-5));
  DerivedConstants dc = derived_constants(2, p);
  CHECK(dc.mu == Catch::Approx(2.0 * pi).margin(1e-5));
  CHECK(dc.c0 == Catch::Approx(c0).epsilon(1e-14));
}

TEST_CASE("interaction identity of the arctan profile", "[layer]") {
  // \int [phi(xi+a) - phi(xi+b)] phid(xi) dxi = (atan(a/2) - atan(b/2)) / pi
  LayerProfile p = LayerProfile::exact();
  for (auto [a, b] : std::vector<std::pair<double, double>>{{1.0, 0.0}, {3.0, -2.0}, {0.5, 0.25}}) {
    double got = integrate(
        [&](double x) { return (p.eval(x + a) - p.eval(x + b)) * p.eval(x, 1); }, -300.0, 300.0,
        1e-11);
    double want = (std::atan(a / 2.0) - std::atan(b / 2.0)) / pi;
    CHECK(got == Catch::Approx(want).margin(5e-6));
  }
}
