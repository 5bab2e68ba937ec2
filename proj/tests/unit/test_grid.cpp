/// @file test_grid.cpp
/// @brief Box geometry, quadrature and the difference operators.

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rdlab/grid.hpp"

using namespace rdlab;

TEST_CASE("grid construction and validation") {
  GridSpec g(3, 64, 8.0);
  CHECK(g.cells() == 64u * 64u * 64u);
  CHECK(g.spacing() == 0.125);
  CHECK(g.cell_volume() == doctest::Approx(std::pow(0.125, 3)).epsilon(1e-15));
  CHECK(g.coord(32) == 0.0);
  CHECK_THROWS_AS(GridSpec(4, 8, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(3, 7, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(3, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(3, 8, 0.0), std::invalid_argument);
  CHECK_NOTHROW(GridSpec(3, 96, 8.0));
}

TEST_CASE("flatten and unflatten are inverse, last axis fastest") {
  GridSpec g(3, 8, 2.0);
  for (std::size_t idx = 0; idx < g.cells(); ++idx) CHECK(g.flatten(g.unflatten(idx)) == idx);
  CHECK(g.flatten({0, 0, 1}) == 1u);
  CHECK(g.flatten({0, 1, 0}) == 8u);
  GridSpec g1(1, 8, 2.0);
  CHECK(g1.unflatten(5)[0] == 5);
  CHECK(g1.unflatten(5)[1] == 0);
}

TEST_CASE("periodic distance uses the minimum image") {
  GridSpec g(2, 8, 10.0);
  CHECK(g.periodic_distance({4.5, 0, 0}, {-4.5, 0, 0}) == doctest::Approx(1.0));
  CHECK(g.periodic_distance({0, 0, 0}, {3, 4, 0}) == doctest::Approx(5.0));
}

TEST_CASE("Gaussian integral to quadrature accuracy") {
  GridSpec g(3, 64, 16.0);
  ScalarField f(g.cells());
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const auto x = g.position(c);
    f[c] = std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  }
  CHECK(integrate(g, f) == doctest::Approx(std::pow(std::numbers::pi, 1.5)).epsilon(1e-10));
}

TEST_CASE("weighted integral and shape checks") {
  GridSpec g(1, 16, 4.0);
  ScalarField a(g.cells(), 2.0), w(g.cells(), 0.5), bad(3);
  CHECK(integrate(g, a, w) == doctest::Approx(4.0));
  CHECK_THROWS(integrate(g, a, bad));
}

TEST_CASE("central differences are second order") {
  // |grad u|^2 for u = sin(2 pi x / L) cos(2 pi y / L): error ratio ~ 4 per halving.
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    GridSpec g(2, n, 2.0);
    const double k = std::numbers::pi;
    ScalarField u(g.cells()), exact(g.cells());
    for (std::size_t c = 0; c < g.cells(); ++c) {
      const auto x = g.position(c);
      u[c] = std::sin(k * x[0]) * std::cos(k * x[1]);
      const double gx = k * std::cos(k * x[0]) * std::cos(k * x[1]);
      const double gy = -k * std::sin(k * x[0]) * std::sin(k * x[1]);
      exact[c] = gx * gx + gy * gy;
    }
    const auto got = squared_gradient(g, u);
    double err = 0.0;
    for (std::size_t c = 0; c < g.cells(); ++c) err = std::max(err, std::abs(got[c] - exact[c]));
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("discrete laplacian of a plane wave") {
  GridSpec g(3, 16, 4.0);
  const double h = g.spacing();
  const double k = 2 * std::numbers::pi / g.length();
  ScalarField u(g.cells());
  for (std::size_t c = 0; c < g.cells(); ++c) u[c] = std::cos(k * g.position(c)[1]);
  const auto lap = discrete_laplacian(g, u);
  const double symbol = -(2 - 2 * std::cos(k * h)) / (h * h);
  for (std::size_t c = 0; c < g.cells(); ++c) CHECK(lap[c] == doctest::Approx(symbol * u[c]).scale(1.0));
}

TEST_CASE("grad sqrt density differences the square root") {
  GridSpec g(1, 32, 4.0);
  ScalarField a(g.cells());
  for (std::size_t c = 0; c < g.cells(); ++c) a[c] = 1.0 + 0.5 * std::sin(g.position(c)[0] * std::numbers::pi / 2);
  ScalarField r(g.cells());
  for (std::size_t c = 0; c < g.cells(); ++c) r[c] = std::sqrt(a[c]);
  const auto lhs = grad_sqrt_density(g, a);
  const auto rhs = squared_gradient(g, r);
  for (std::size_t c = 0; c < g.cells(); ++c) CHECK(lhs[c] == doctest::Approx(rhs[c]));
}

TEST_CASE("ball mask counts and limits") {
  GridSpec g(3, 32, 8.0);
  const auto m = ball_mask(g, {0, 0, 0}, 2.0);
  double vol = integrate(g, m);
  CHECK(vol == doctest::Approx(4.0 / 3.0 * std::numbers::pi * 8).epsilon(0.03));
  CHECK_THROWS(ball_mask(g, {0, 0, 0}, 0.0));
  CHECK_THROWS(ball_mask(g, {0, 0, 0}, 4.5));
}

TEST_CASE("boundary mass fraction") {
  GridSpec g(2, 8, 1.0);
  ScalarField f(g.cells(), 1.0);
  // 28 of 64 cells lie in the outer layer.
  CHECK(boundary_mass_fraction(g, f) == doctest::Approx(28.0 / 64.0));
  ScalarField center(g.cells(), 0.0);
  center[g.flatten({4, 4, 0})] = 1.0;
  CHECK(boundary_mass_fraction(g, center) == 0.0);
}

TEST_CASE("piecewise-linear time integral") {
  const std::vector<double> t{0.0, 1.0, 2.0}, v{0.0, 2.0, 0.0};
  CHECK(integrate_piecewise_linear(t, v, 0.0, 2.0) == doctest::Approx(2.0));
  CHECK(integrate_piecewise_linear(t, v, 0.5, 1.5) == doctest::Approx(1.5));
  CHECK_THROWS(integrate_piecewise_linear(t, v, -0.5, 1.0));
}

TEST_CASE("slab validation") {
  GridSpec g(1, 8, 1.0);
  SpaceTimeSlab s;
  s.snapshots.emplace_back(g, 1, 0.0);
  s.snapshots.emplace_back(g, 1, 0.0);
  CHECK_THROWS(s.validate());
  s.snapshots[1].time = 1.0;
  CHECK_NOTHROW(s.validate());
  s.snapshots.emplace_back(GridSpec(1, 16, 1.0), 1, 2.0);
  CHECK_THROWS(s.validate());
}

TEST_CASE("lerp endpoints") {
  oracle::Gen gen(5);
  GridSpec g(1, 16, 1.0);
  const auto a = gen.noise(g, 1.0), b = gen.noise(g, 1.0);
  const auto l0 = lerp(a, b, 0.0), l1 = lerp(a, b, 1.0);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    CHECK(l0[c] == a[c]);
    CHECK(l1[c] == doctest::Approx(b[c]));
  }
}
