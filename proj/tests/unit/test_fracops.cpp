#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fac/constants.hpp"
#include "fac/fracops.hpp"
#include "fac/layer.hpp"
#include "fac/potential.hpp"

using namespace fac;

TEST_CASE("spectral operator: cosine eigenfunction", "[fracops]") {
  const double L = 2.0, kappa = 2.0 * pi;
  PeriodicField f = PeriodicField::zeros(64, L);
  f.fill([L](double x, double y) { return std::cos(2.0 * pi * x / L) + 0.25 * std::sin(4.0 * pi * y / L); });
  PeriodicField g = frac_lap_spectral(f, kappa);
  const double l1 = -kappa * (2.0 * pi / L), l2 = -kappa * (4.0 * pi / L);
  double worst = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      double want = l1 * std::cos(2.0 * pi * f.x(i) / L) + 0.25 * l2 * std::sin(4.0 * pi * f.x(j) / L);
      worst = std::max(worst, std::abs(g.at(i, j) - want));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("spectral operator: constants and finiteness", "[fracops]") {
  PeriodicField f = PeriodicField::zeros(32, 1.0);
  for (auto& v : f.v) v = 0.37;
  PeriodicField g = frac_lap_spectral(f, 2.0 * pi);
  for (double v : g.v) CHECK(std::abs(v) < 1e-13);
  f.v[5] = std::nan("");
  CHECK_THROWS_AS(frac_lap_spectral(f, 2.0 * pi), std::domain_error);
}

TEST_CASE("imex step without reaction is the exact resolvent", "[fracops]") {
  const double L = 4.0, kappa = 2.0 * pi, eps = 0.1, dt = 1e-3;
  const double lne = std::abs(std::log(eps));
  PeriodicField u = PeriodicField::zeros(64, L);
  u.fill([L](double x, double) { return std::cos(2.0 * pi * x / L); });
  SpectralWorkspace::get(64).imex_step(u, dt, eps, lne, kappa, [](double) { return 0.0; });
  const double k1 = 2.0 * pi / L;
  const double want = 1.0 / (1.0 + dt * kappa * k1 / (eps * lne));
  double worst = 0.0;
  for (int i = 0; i < 64; ++i)
    worst = std::max(worst, std::abs(u.at(i, 7) - want * std::cos(2.0 * pi * u.x(i) / L)));
  CHECK(worst < 1e-13);
}

TEST_CASE("1-D quadrature operator: zero-tail Gaussian oracle", "[fracops]") {
  // I_1[e^{-x^2}](0) = \int (e^{-z^2} - 1)/z^2 dz = -2 sqrt(pi)
  LineField lf;
  lf.tail = LineField::Tail::zero;
  lf.Xi = 30.0;
  lf.f = [](double x) { return std::exp(-x * x); };
  CHECK(frac_lap_1d(lf, 0.0, 1e-11) == Catch::Approx(-2.0 * std::sqrt(pi)).margin(1e-8));
}

TEST_CASE("collocation matrix reproduces the layer oracle", "[fracops]") {
  LayerProfile p = LayerProfile::exact();
  auto xi = sinh_grid(60.0, 600);
  I1Matrix M = build_i1_matrix(xi, LineField::Tail::layer, p.alpha());
  std::vector<double> v(xi.size());
  for (size_t j = 0; j < xi.size(); ++j) v[j] = p.eval(xi[j]);
  double worst = 0.0;
  Eigen::Map<const Eigen::VectorXd> vv(v.data(), static_cast<int>(v.size()));
  Eigen::VectorXd out = M.A * vv + M.c;
  for (size_t j = 0; j < xi.size(); ++j) {
    if (std::abs(xi[j]) > 30.0) continue;
    double want = -xi[j] / (1.0 + xi[j] * xi[j]);
    worst = std::max(worst, std::abs(out[static_cast<int>(j)] - want));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("2-D truncated quadrature: radial Gaussian oracle", "[fracops]") {
  // I_2[e^{-r^2/2}](0) = 2 pi \int (e^{-r^2/2}-1)/r^2 dr = -2 pi sqrt(pi/2)
  auto u = [](double x, double y) { return std::exp(-(x * x + y * y) / 2.0); };
  Quad2dOpts opt;
  opt.r_max = 60.0;
  opt.far_value = 0.0;
  double got = quad_frac_lap_2d(u, 0.0, 0.0, opt);
  double want = -2.0 * pi * std::sqrt(pi / 2.0);
  CHECK(got == Catch::Approx(want).epsilon(1e-6));
}

TEST_CASE("grid bookkeeping", "[fracops]") {
  PeriodicField f = PeriodicField::zeros(16, 8.0);
  CHECK(f.h() == Catch::Approx(0.5));
  CHECK(f.x(0) == Catch::Approx(-4.0));
  CHECK(f.x(8) == Catch::Approx(0.0));
  CHECK(is_pow2(1024));
  CHECK(!is_pow2(1000));
  auto mm = f.minmax();
  CHECK(mm.first == 0.0);
  CHECK(mm.second == 0.0);
}
