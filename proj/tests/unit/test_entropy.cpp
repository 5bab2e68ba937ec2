/// @file test_entropy.cpp
/// @brief Scalar functionals, M0, the budget fit and the entropy identity.

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rdlab/entropy.hpp"
#include "rdlab/solver.hpp"

using namespace rdlab;

TEST_CASE("functionals of a constant field") {
  GridSpec g(3, 8, 2.0);
  SpeciesField f(g, 2, 0.0);
  f.species[0].assign(g.cells(), 2.0);
  f.species[1].assign(g.cells(), 0.5);
  const auto r = record(f, zero_reaction(2), 0.25);
  CHECK(r.mass_i[0] == doctest::Approx(16.0));
  CHECK(r.mass_i[1] == doctest::Approx(4.0));
  CHECK(r.entropy == doctest::Approx(8 * (2 * std::log(2.0) + 0.5 * std::log(0.5))));
  CHECK(r.abs_entropy == doctest::Approx(8 * (2 * std::log(2.0) - 0.5 * std::log(0.5))));
  CHECK(r.fisher == doctest::Approx(0.0).scale(1.0));
  CHECK(r.dissipation == 0.0);
  CHECK(r.clipped_mass == 0.25);
  CHECK_FALSE(r.weak_norm.has_value());
}

TEST_CASE("moment and Fisher information against independent sums") {
  GridSpec g(2, 32, 6.0);
  oracle::Gen gen(21);
  SpeciesField f(g, 1, 0.0);
  f.species[0] = gen.bumps(g, 2, 1.0, 0.6, 0.9, 1.0);
  const auto r = record(f, zero_reaction(1));
  double mom = 0.0, fis = 0.0;
  const double h = g.spacing();
  const int n = g.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      auto s = [&](int a, int b) { return std::sqrt(f.species[0][((a + n) % n) * n + (b + n) % n]); };
      const double x = g.coord(i), y = g.coord(j);
      mom += f.species[0][i * n + j] * std::hypot(x, y);
      const double gx = (s(i + 1, j) - s(i - 1, j)) / (2 * h);
      const double gy = (s(i, j + 1) - s(i, j - 1)) / (2 * h);
      fis += gx * gx + gy * gy;
    }
  }
  CHECK(r.moment == doctest::Approx(mom * h * h).epsilon(1e-12));
  CHECK(r.fisher == doctest::Approx(fis * h * h).epsilon(1e-12));
}

TEST_CASE("serialization keys and CSV columns") {
  GridSpec g(1, 8, 1.0);
  SpeciesField f(g, 2, 0.5);
  f.species[0].assign(g.cells(), 1.0);
  f.species[1].assign(g.cells(), 1.0);
  auto r = record(f, zero_reaction(2));
  r.weak_norm = 0.75;
  const auto j = to_json(r);
  for (const char* k : {"t", "mass_i", "entropy", "abs_entropy", "moment", "fisher", "dissipation",
                        "weak_norm", "clipped_mass"}) {
    CHECK(j.contains(k));
  }
  CHECK(j["weak_norm"] == 0.75);
  CHECK(csv_header(2) == "t,mass_1,mass_2,entropy,abs_entropy,moment,fisher,dissipation,weak_norm,clipped_mass\n");
  const auto row = csv_row(r);
  CHECK(std::count(row.begin(), row.end(), ',') == 9);
  CHECK(to_ndjson_line(r).back() == '\n');
}

TEST_CASE("M0 picks the largest species term") {
  GridSpec g(1, 4, 4.0);
  SpeciesField f(g, 2, 0.0);
  f.species[0] = {0.0, 1.0, 0.0, 0.0};
  f.species[1] = {0.0, 0.0, 3.0, 0.0};
  const auto rep = m0(f);
  // Cell 1 sits at x = -1, cell 2 at the origin, h = 1.
  CHECK(rep.weighted_mass_i[0] == doctest::Approx(2.0));
  CHECK(rep.weighted_mass_i[1] == doctest::Approx(3.0 + 3 * std::log(3.0)));
  CHECK(rep.argmax_species == 1);
  CHECK(rep.m0 == doctest::Approx(6.0 + 3 * std::log(3.0)));
}

TEST_CASE("entropy identity for pure diffusion in one dimension") {
  // The Fisher term uses central differences while the flow is spectral, so
  // the residual is O(h^2).
  auto residual = [](int n) {
    GridSpec g(1, n, 16.0);
    SpeciesField f(g, 1, 0.0);
    for (std::size_t c = 0; c < g.cells(); ++c) {
      const double x = g.position(c)[0];
      f.species[0][c] = 0.05 + std::exp(-x * x);
    }
    const DiffusionSpec d({1.0});
    RunSettings rs;
    rs.dt = 1e-3;
    rs.t_end = 0.5;
    rs.dt_store = 1e-3;
    std::vector<DiagnosticsRecord> recs;
    run(zero_reaction(1), d, f, rs,
        [&](const SpeciesField& s) { recs.push_back(record(s, zero_reaction(1))); });
    const auto rep = entropy_identity_check(recs, d);
    CHECK(rep.entropy_change < 0.0);
    return rep.relative_error;
  };
  const double coarse = residual(256);
  const double fine = residual(512);
  MESSAGE("relative error " << coarse << " -> " << fine);
  CHECK(fine <= 1e-3);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("entropy decreases along a reacting run") {
  GridSpec g(2, 32, 8.0);
  oracle::Gen gen(22);
  SpeciesField f(g, 4, 0.0);
  for (auto& a : f.species) a = gen.bumps(g, 2, 1.0, 0.7, 1.0, 1.5);
  const auto model = four_species_exchange(1.5);
  const DiffusionSpec d({1.0, 2.0, 0.5, 1.5});
  RunSettings rs;
  rs.dt = 2e-3;
  rs.t_end = 0.2;
  rs.dt_store = 0.02;
  std::vector<DiagnosticsRecord> recs;
  run(model, d, f, rs, [&](const SpeciesField& s) { recs.push_back(record(s, model)); });
  CHECK(entropy_monotonicity(recs).max_relative_increase <= 1e-6);
  for (const auto& r : recs) CHECK(r.dissipation >= 0.0);
}

TEST_CASE("budget fit is tight and holds") {
  std::vector<DiagnosticsRecord> recs(5);
  for (int k = 0; k < 5; ++k) {
    recs[k].t = 0.25 * k;
    recs[k].mass_i = {1.0};
    recs[k].moment = 0.5;
    recs[k].abs_entropy = 0.1;
    recs[k].fisher = 2.0;
    recs[k].dissipation = 1.0;
  }
  const DiffusionSpec d({1.0, 3.0});
  const auto rep = budget_check(recs, d, 1.0);
  // lhs(t) = 1.6 + 2 * 1 * 2 t + t = 1.6 + 5 t; (c0 + c1 t)(M0 + 1) = 2 c0 + 2 c1 t.
  CHECK(rep.fitted.c0 == doctest::Approx(0.8));
  CHECK(rep.fitted.c1 == doctest::Approx(2.5));
  CHECK(rep.c1_reference == doctest::Approx(4.5));
  CHECK(rep.holds);
  CHECK(rep.pass());
  const auto tight = budget_check(recs, d, 1.0, BudgetConstants{0.8, 2.0});
  CHECK_FALSE(tight.holds);
}

TEST_CASE("budget constants shared across streams") {
  std::vector<std::vector<DiagnosticsRecord>> streams;
  std::vector<double> m0s;
  for (int s = 1; s <= 3; ++s) {
    std::vector<DiagnosticsRecord> recs(3);
    for (int k = 0; k < 3; ++k) {
      recs[k].t = 0.5 * k;
      recs[k].mass_i = {static_cast<double>(s)};
      recs[k].fisher = s * 1.0;
    }
    streams.push_back(recs);
    m0s.push_back(s);
  }
  const DiffusionSpec d({1.0});
  const auto k = fit_budget_constants(streams, d, m0s);
  for (std::size_t s = 0; s < streams.size(); ++s) {
    CHECK(budget_check(streams[s], d, m0s[s], k).holds);
  }
  CHECK_THROWS(fit_budget_constants(streams, d, {1.0}));
}
