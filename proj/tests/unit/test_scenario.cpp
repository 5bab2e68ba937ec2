/// @file test_scenario.cpp
/// @brief Config parsing, validation and deterministic initial data.

#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "rdlab/field_io.hpp"
#include "rdlab/scenario.hpp"

using namespace rdlab;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "schema_version": 1,
    "grid": {"N": 2, "n": 16, "L": 8.0},
    "model": {"family": "four_species_exchange", "nu": 1.5, "P": 4},
    "D": [1.0, 2.0, 0.5, 1.5],
    "dt": 0.01, "t_end": 0.1, "dt_store": 0.05, "seed": 3,
    "initial": {"kind": "gaussian_bumps",
                "params": {"count": 2, "amplitude_range": [0.5, 1.0], "width": 0.5, "spread": 0.5}}
  })");
}

}  // namespace

TEST_CASE("valid config round trips") {
  const auto cfg = parse_config(base());
  CHECK(cfg.grid == GridSpec(2, 16, 8.0));
  CHECK(cfg.species == 4);
  CHECK(cfg.D == std::vector<double>{1.0, 2.0, 0.5, 1.5});
  CHECK_FALSE(cfg.mu.has_value());
  const auto again = parse_config(to_json(cfg));
  CHECK(to_json(again) == to_json(cfg));
  const auto rs = cfg.settings();
  CHECK(rs.dt == 0.01);
  CHECK(rs.dt_store == 0.05);
}

TEST_CASE("invalid configs are rejected") {
  auto expect_error = [](json j) { CHECK_THROWS_AS_MESSAGE(parse_config(j), ConfigError, j.dump()); };
  {
    auto j = base();
    j["colour"] = "red";
    expect_error(j);
  }
  {
    auto j = base();
    j["grid"]["M"] = 3;
    expect_error(j);
  }
  {
    auto j = base();
    j["initial"]["params"]["wdth"] = 1;
    expect_error(j);
  }
  {
    auto j = base();
    j.erase("seed");
    expect_error(j);
  }
  {
    auto j = base();
    j["schema_version"] = 2;
    expect_error(j);
  }
  {
    auto j = base();
    j["D"] = json::array({1.0, 2.0});
    expect_error(j);
  }
  {
    auto j = base();
    j["D"][0] = 0.0;
    expect_error(j);
  }
  {
    auto j = base();
    j["dt_store"] = 0.033;
    expect_error(j);
  }
  {
    auto j = base();
    j["grid"]["n"] = 15;
    expect_error(j);
  }
  {
    auto j = base();
    j["model"]["family"] = "mystery";
    expect_error(j);
  }
  {
    auto j = base();
    j["model"]["D"] = json::array({1.0, 1.0, 1.0, 1.0});
    expect_error(j);
  }
  {
    auto j = base();
    j["initial"]["kind"] = "plane_wave";
    expect_error(j);
  }
  CHECK_THROWS_AS(parse_config_text("{\"schema_version\": 1,"), ConfigError);
}

TEST_CASE("model.D is accepted as an alias") {
  auto j = base();
  j["model"]["D"] = j["D"];
  CHECK(parse_config(j).D == std::vector<double>{1.0, 2.0, 0.5, 1.5});
  j.erase("D");
  CHECK(parse_config(j).D == std::vector<double>{1.0, 2.0, 0.5, 1.5});
}

TEST_CASE("gaussian bumps are deterministic in the seed") {
  const auto cfg = parse_config(base());
  const auto a = make_initial(cfg);
  const auto b = make_initial(cfg);
  CHECK(a.species == b.species);
  auto j = base();
  j["seed"] = 4;
  const auto c = make_initial(parse_config(j));
  CHECK(a.species != c.species);
  for (const auto& s : a.species) CHECK(*std::min_element(s.begin(), s.end()) >= 0.0);
}

TEST_CASE("peak rescaling") {
  auto j = base();
  j["initial"]["params"]["peak"] = 1.0;
  const auto f = make_initial(parse_config(j));
  double m = 0.0;
  for (const auto& s : f.species) m = std::max(m, *std::max_element(s.begin(), s.end()));
  CHECK(m == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("inadmissible initial data") {
  auto j = base();
  j["initial"]["params"]["width"] = 2.0;
  CHECK_THROWS_AS(make_initial(parse_config(j)), ConfigError);
  auto k = base();
  k["initial"] = json::parse(R"({"kind": "constant", "params": {"value": -1.0}})");
  CHECK_THROWS_AS(make_initial(parse_config(k)), ConfigError);
  k["initial"] = json::parse(R"({"kind": "constant", "params": {"values": [1, 2, 3, 4]}})");
  const auto f = make_initial(parse_config(k));
  CHECK(f.species[3][0] == 4.0);
}

TEST_CASE("file initial data") {
  const auto dir = std::filesystem::temp_directory_path() / "rdlab_scenario_file";
  std::filesystem::create_directories(dir);
  SpeciesField f(GridSpec(2, 16, 8.0), 4, 0.0);
  for (auto& s : f.species) s.assign(f.grid.cells(), 0.0);
  f.species[2][f.grid.flatten({8, 8, 0})] = 5.0;
  write_rdf1(dir / "init.rdf1", f, 1.5);
  auto j = base();
  j["initial"] = json::parse(R"({"kind": "file", "params": {"path": "init.rdf1"}})");
  const auto cfg = parse_config(j, dir);
  const auto g = make_initial(cfg);
  CHECK(g.species == f.species);
  auto wrong = base();
  wrong["grid"]["n"] = 32;
  wrong["initial"] = j["initial"];
  CHECK_THROWS_AS(make_initial(parse_config(wrong, dir)), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("model factory") {
  CHECK(make_model("four_species_exchange", 1.5, 4).species == 4);
  CHECK(make_model("two_species_linear", 1.0, 2).species == 2);
  CHECK(make_model("zero", 1.5, 3).species == 3);
  CHECK_THROWS_AS(make_model("four_species_exchange", 1.5, 3), ConfigError);
}

TEST_CASE("standard scenario") {
  const auto s = standard_scenario();
  CHECK(s.grid == GridSpec(3, 64, 8.0));
  CHECK(s.D == std::vector<double>{1.0, 2.0, 0.5, 1.5});
  CHECK(s.dt == 2e-4);
  CHECK(s.dt_store == 0.05);
  CHECK(s.seed == 7);
  const auto file = load_config(std::filesystem::path(RDLAB_SOURCE_DIR) / "scenarios" / "standard.json");
  auto a = to_json(file), b = to_json(s);
  a.erase("output");
  b.erase("output");
  CHECK(a == b);
}
