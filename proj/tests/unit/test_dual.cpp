/// @file test_dual.cpp
/// @brief Backward dual solve: constant-coefficient exactness and pairing invariance.

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rdlab/solver.hpp"

using namespace rdlab;

TEST_CASE("constant diffusivity reproduces the backward heat flow") {
  GridSpec g(2, 32, 4.0);
  const double d = 0.8, T = 0.5, tau = 0.005;
  const double k = 2 * std::numbers::pi / g.length();
  ScalarField phi_T(g.cells());
  for (std::size_t c = 0; c < g.cells(); ++c) phi_T[c] = 1.0 + std::cos(k * g.position(c)[0]);
  std::vector<TimedField> series{{0.0, ScalarField(g.cells(), d)}, {T, ScalarField(g.cells(), d)}};
  const auto sol = dual_backward_solve(g, series, phi_T, tau);
  REQUIRE(sol.phi.size() == 2);
  const double lam = d * k * k;
  // Crank-Nicolson amplification per step.
  const double cn = std::pow((1 - 0.5 * tau * lam) / (1 + 0.5 * tau * lam), T / tau);
  const double exact = std::exp(-lam * T);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const double mode = std::cos(k * g.position(c)[0]);
    CHECK(sol.phi[0].values[c] == doctest::Approx(1.0 + cn * mode).epsilon(1e-9).scale(1.0));
    CHECK(sol.phi[0].values[c] == doctest::Approx(1.0 + exact * mode).epsilon(1e-5).scale(1.0));
  }
  CHECK(sol.max_residual <= 1e-10);
}

TEST_CASE("pairing with a forward heat flow is invariant") {
  GridSpec g(3, 16, 4.0);
  oracle::Gen gen(12);
  SpeciesField f(g, 1, 0.0);
  f.species[0] = gen.bumps(g, 3, 0.8, 0.4, 0.7, 1.0);
  const DiffusionSpec diff({1.0});
  ScalarField phi_T(g.cells());
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const auto x = g.position(c);
    phi_T[c] = std::exp(-(x[0] * x[0] + 2 * x[1] * x[1] + 0.5 * x[2] * x[2]));
  }
  std::vector<SpeciesField> snaps;
  std::vector<TimedField> series;
  for (int k = 0; k <= 4; ++k) {
    snaps.push_back(diffusion_step(f, diff, 0.05 * k));
    series.push_back({0.05 * k, effective_diffusivity(snaps.back(), diff, 1e-6)});
  }
  const auto sol = dual_backward_solve(g, series, phi_T, 0.001);
  const double p0 = integrate(g, snaps[0].species[0], sol.phi[0].values);
  for (int k = 1; k <= 4; ++k) {
    const double pk = integrate(g, snaps[k].species[0], sol.phi[k].values);
    CHECK(pk == doctest::Approx(p0).epsilon(1e-5));
  }
}

TEST_CASE("variable diffusivity converges and stays within the data range") {
  GridSpec g(2, 32, 4.0);
  oracle::Gen gen(13);
  std::vector<TimedField> series;
  for (int k = 0; k < 3; ++k) {
    ScalarField d(g.cells());
    for (double& v : d) v = gen.uniform(0.5, 2.0);
    series.push_back({0.1 * k, d});
  }
  ScalarField phi_T = gen.noise(g, 1.0);
  const auto sol = dual_backward_solve(g, series, phi_T, 0.01);
  CHECK(sol.max_residual <= 1e-10);
  CHECK(sol.max_iterations_used > 0);
  for (const auto& p : sol.phi) {
    for (double v : p.values) CHECK(std::isfinite(v));
  }
}

TEST_CASE("dual solve input validation") {
  GridSpec g(1, 8, 1.0);
  ScalarField phi(g.cells(), 1.0);
  std::vector<TimedField> one{{0.0, ScalarField(g.cells(), 1.0)}};
  CHECK_THROWS_AS(dual_backward_solve(g, one, phi, 0.1), std::invalid_argument);
  std::vector<TimedField> two{{0.0, ScalarField(g.cells(), 1.0)}, {0.25, ScalarField(g.cells(), 1.0)}};
  CHECK_THROWS_AS(dual_backward_solve(g, two, phi, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(dual_backward_solve(g, two, phi, -0.05), std::invalid_argument);
}
