#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fac/constants.hpp"
#include "fac/potential.hpp"

using namespace fac;

TEST_CASE("kernel reduction constant", "[potential]") {
  CHECK(compute_Cn(2) == Catch::Approx(2.0).margin(1e-11));
  CHECK(compute_Cn(3) == Catch::Approx(pi).margin(1e-11));
  CHECK_THROWS_AS(compute_Cn(4), std::invalid_argument);
}

TEST_CASE("kernel shell integrals", "[potential]") {
  auto [inner2, outer2] = kernel_shell_integrals(0.7, 2);
  CHECK(inner2 == Catch::Approx(2.0 * pi * 0.7).epsilon(1e-14));
  CHECK(outer2 == Catch::Approx(2.0 * pi / 0.7).epsilon(1e-14));
  auto [inner1, outer1] = kernel_shell_integrals(2.5, 1);
  CHECK(inner1 == Catch::Approx(5.0).epsilon(1e-14));
  CHECK(outer1 == Catch::Approx(0.8).epsilon(1e-14));
  CHECK_THROWS_AS(kernel_shell_integrals(-1.0, 2), std::invalid_argument);
}

TEST_CASE("spectral multiplier constant", "[potential]") {
  CHECK(compute_kappa(2) == Catch::Approx(2.0 * pi).margin(1e-10));
  CHECK(compute_kappa(1) == Catch::Approx(pi).margin(1e-14));
}

TEST_CASE("calibrated cosine well", "[potential]") {
  Potential pot = Potential::calibrated_cosine(2);
  CHECK(pot.W(0.0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(pot.W(1.0) == Catch::Approx(0.0).margin(1e-14));
  CHECK(pot.W(0.5) == Catch::Approx(2.0 * pot.amplitude()).epsilon(1e-14));
  CHECK(pot.Wp(0.5) == Catch::Approx(0.0).margin(1e-14));
  CHECK(pot.Wpp(0.0) == Catch::Approx(pi * compute_Cn(2)).epsilon(1e-10));
  CHECK(pot.max_abs_Wpp() == Catch::Approx(pot.Wpp(0.0)).epsilon(1e-14));
  // 1-periodicity
  for (double u : {0.13, 0.47, 0.92})
    CHECK(pot.W(u + 1.0) == Catch::Approx(pot.W(u)).margin(1e-14));
}

TEST_CASE("derived constants factory", "[potential]") {
  DerivedConstants dc = derived_constants(2);
  CHECK(dc.Cn == Catch::Approx(2.0).margin(1e-10));
  CHECK(dc.kappa == Catch::Approx(2.0 * pi).margin(1e-10));
  CHECK(dc.A == Catch::Approx(dc.Cn / (4.0 * pi)).epsilon(1e-14));
  CHECK(dc.Wpp0 == Catch::Approx(2.0 * pi).margin(1e-10));
  CHECK(dc.alpha == Catch::Approx(pi).margin(1e-10));
}

TEST_CASE("tabulated potential approximates the closed form", "[potential]") {
  Potential ref = Potential::calibrated_cosine(2);
  std::vector<double> u, W;
  const int m = 512;
  for (int i = 0; i <= m; ++i) {
    u.push_back(double(i) / m);
    W.push_back(ref.W(double(i) / m));
  }
  Potential tab = Potential::user_table(u, W);
  for (double q : {0.031, 0.25, 0.619, 0.87}) {
    CHECK(tab.W(q) == Catch::Approx(ref.W(q)).margin(1e-7));
    CHECK(tab.Wp(q) == Catch::Approx(ref.Wp(q)).margin(1e-4));
    // the local cubic is C^1: second derivatives are only first-order accurate
    CHECK(tab.Wpp(q) == Catch::Approx(ref.Wpp(q)).margin(0.2));
  }
  CHECK_THROWS_AS(Potential::user_table({0.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("sphere measures", "[potential]") {
  CHECK(sphere_measure(0) == 2.0);
  CHECK(sphere_measure(1) == Catch::Approx(2.0 * pi).epsilon(1e-15));
}
