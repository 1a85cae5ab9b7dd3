#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fac/geometry.hpp"
#include "fac/layer.hpp"

using namespace fac;

TEST_CASE("signed distance: circle and polyline agree", "[geometry]") {
  LoopShape c;
  c.center = {0.1, -0.2};
  c.R0 = 0.8;
  Polyline pl = sample_loop(c, 4096);
  for (Vec2 p : {Vec2{0.1, -0.2}, Vec2{0.9, -0.2}, Vec2{-1.0, 0.5}, Vec2{0.3, 0.1}}) {
    double want = signed_distance_circle(c.center, c.R0, p);
    CHECK(signed_distance_polyline(pl, p) == Catch::Approx(want).margin(5e-6));
  }
  CHECK(signed_distance_circle(c.center, c.R0, c.center) == Catch::Approx(0.8));
}

TEST_CASE("loop config validation", "[geometry]") {
  LoopConfig ok;
  ok.loops = {LoopShape{{0, 0}, 0.9, {}, {}}, LoopShape{{0, 0}, 0.5, {}, {}}};
  CHECK_NOTHROW(ok.validate(4.0));
  CHECK(ok.clamp_radius() == Catch::Approx(0.4 * 0.4));  // 0.4 * min(gap, radius)

  LoopConfig touching;  // separation below the floor
  touching.loops = {LoopShape{{0, 0}, 0.9, {}, {}}, LoopShape{{0, 0}, 0.87, {}, {}}};
  CHECK_THROWS_AS(touching.validate(4.0), std::invalid_argument);

  LoopConfig crossing;  // disjoint centers, overlapping circles -> not nested
  crossing.loops = {LoopShape{{-0.4, 0}, 0.5, {}, {}}, LoopShape{{0.4, 0}, 0.5, {}, {}}};
  CHECK_THROWS_AS(crossing.validate(4.0), std::invalid_argument);

  LoopConfig huge;  // escapes the half box
  huge.loops = {LoopShape{{0, 0}, 1.7, {}, {}}};
  CHECK_THROWS_AS(huge.validate(4.0), std::invalid_argument);

  LoopConfig degenerate;
  degenerate.loops = {LoopShape{{0, 0}, -0.1, {}, {}}};
  CHECK_THROWS_AS(degenerate.validate(4.0), std::invalid_argument);
}

TEST_CASE("smooth clamp", "[geometry]") {
  SmoothClamp g{0.3};
  for (double s : {-0.29, -0.1, 0.0, 0.25}) CHECK(g.G(s) == Catch::Approx(s).margin(1e-15));
  CHECK(std::abs(g.G(5.0)) <= 2.0 * 0.3 + 1e-12);
  CHECK(std::abs(g.G(-9.0)) <= 2.0 * 0.3 + 1e-12);
  CHECK(g.G(5.0) == Catch::Approx(0.6).margin(1e-9));
  // C^1/C^2: finite differences of G match G1, G2 across the knee
  for (double s : {0.2, 0.31, 0.45, 0.59}) {
    double h = 1e-5;
    CHECK((g.G(s + h) - g.G(s - h)) / (2 * h) == Catch::Approx(g.G1(s)).margin(1e-6));
    CHECK((g.G(s + h) - 2 * g.G(s) + g.G(s - h)) / (h * h) ==
          Catch::Approx(g.G2(s)).margin(1e-4));
  }
}

TEST_CASE("clamped distance evaluation on a circle", "[geometry]") {
  LoopShape c;
  c.R0 = 1.0;
  DistanceEval de(c, 0.6);
  CHECK(de.d({0.5, 0.0}) == Catch::Approx(0.5).margin(1e-14));
  Vec2 gr = de.grad({0.5, 0.0});
  CHECK(gr.x == Catch::Approx(-1.0).margin(1e-12));
  CHECK(gr.y == Catch::Approx(0.0).margin(1e-12));
  Sym2 H = de.hess({0.5, 0.0});
  CHECK(H.xx == Catch::Approx(0.0).margin(1e-12));
  CHECK(H.yy == Catch::Approx(-2.0).margin(1e-12));  // -(1-e@e)/r at r=0.5
  CHECK(de.d({2.3, 0.0}) == Catch::Approx(-1.2).margin(1e-12));  // saturates at -2 rho

  // stable difference agrees with direct subtraction at moderate radii
  for (double wx : {1e-4, 0.02, 0.4})
    CHECK(de.d_diff({0.5, 0.3}, {wx, 0.6 * wx}) ==
          Catch::Approx(de.d({0.5 + wx, 0.3 + 0.6 * wx}) - de.d({0.5, 0.3})).margin(1e-13));
  // and keeps relative precision where direct subtraction cancels
  LoopShape big;
  big.R0 = 1.0e4;
  DistanceEval db(big, 2.0);
  double delta = db.d_diff({1.0e4, 0.0}, {1e-4, 1e-4});
  CHECK(delta == Catch::Approx(-1e-4).epsilon(1e-6));
}

TEST_CASE("marching squares roundtrip on a smooth disk", "[geometry]") {
  LayerProfile phi = LayerProfile::exact();
  PeriodicField F = PeriodicField::zeros(256, 4.0);
  const double R = 1.0, eps = 0.05;
  F.fill([&](double x, double y) { return phi.eval((R - std::hypot(x, y)) / eps); });
  auto fronts = extract_fronts(F, 1);
  REQUIRE(fronts.size() == 1);
  REQUIRE(!fronts[0].pts.empty());
  FrontStats st = front_statistics(fronts[0]);
  CHECK(st.r_eff == Catch::Approx(R).margin(2e-3));
  CHECK(st.perimeter == Catch::Approx(2.0 * pi * R).margin(2e-2));
  CHECK(!st.self_intersecting);
  CHECK(polygon_area(fronts[0]) > 0.0);  // CCW normalized
}

TEST_CASE("front statistics on a vanished front", "[geometry]") {
  PeriodicField F = PeriodicField::zeros(64, 4.0);
  for (auto& v : F.v) v = 0.01;  // below every half-integer level
  auto fronts = extract_fronts(F, 1);
  REQUIRE(fronts.size() == 1);
  CHECK(fronts[0].pts.empty());
  CHECK(front_statistics(fronts[0]).empty);
}

TEST_CASE("polygon area and perimeter", "[geometry]") {
  Polyline sq;
  sq.pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polygon_area(sq) == Catch::Approx(1.0));
  CHECK(polygon_perimeter(sq) == Catch::Approx(4.0));
  std::reverse(sq.pts.begin(), sq.pts.end());
  CHECK(polygon_area(sq) == Catch::Approx(-1.0));
}

TEST_CASE("rasterization and erosion", "[geometry]") {
  LoopShape c;
  c.R0 = 1.0;
  Polyline pl = sample_loop(c, 2048);
  const int M = 256;
  const double L = 4.0, h = L / M;
  auto mask = rasterize_inside(pl, M, L);
  double count = 0;
  for (auto m : mask) count += m;
  CHECK(count * h * h == Catch::Approx(pi).margin(0.05));
  erode_mask(mask, M, 6);
  double count2 = 0;
  for (auto m : mask) count2 += m;
  double Reff = 1.0 - 6 * h;
  CHECK(count2 * h * h == Catch::Approx(pi * Reff * Reff).margin(0.12));
}

TEST_CASE("plateau statistics on a synthetic two-front field", "[geometry]") {
  LayerProfile phi = LayerProfile::exact();
  PeriodicField F = PeriodicField::zeros(256, 4.0);
  const double eps = 0.04;
  F.fill([&](double x, double y) {
    double r = std::hypot(x, y);
    return phi.eval((1.2 - r) / eps) + phi.eval((0.6 - r) / eps);
  });
  auto fronts = extract_fronts(F, 2);
  REQUIRE(fronts.size() == 2);
  auto ps = plateau_statistics(F, fronts, 3.0 * eps);
  REQUIRE(ps.size() == 3);  // levels 2, 1, 0
  CHECK(ps[0].region == 2);
  // algebraic tails: each front depresses the inner disk mean by
  // (eps/pi) * mean of 1/dist over the disk ~ 0.068 at a 3-eps band
  CHECK(ps[0].mean == Catch::Approx(2.0).margin(0.09));
  CHECK(ps[1].mean == Catch::Approx(1.0).margin(0.05));
  CHECK(ps[2].mean == Catch::Approx(0.0).margin(0.05));
  for (const auto& p : ps) CHECK(p.pixels > 100);
}

TEST_CASE("initial condition superposes layers", "[geometry]") {
  LayerProfile phi = LayerProfile::exact();
  LoopConfig cfg;
  cfg.loops = {LoopShape{{0, 0}, 1.2, {}, {}}, LoopShape{{0, 0}, 0.6, {}, {}}};
  PeriodicField u = build_initial_condition(cfg, 0.05, phi, 128, 4.0);
  CHECK(u.at(64, 64) > 1.8);                    // centre sits inside both loops
  CHECK(u.at(0, 0) < 0.15);                     // far corner outside both
  auto mm = u.minmax();
  CHECK(mm.first > 0.0);
  CHECK(mm.second < 2.0);
}
