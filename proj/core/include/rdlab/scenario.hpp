/// @file scenario.hpp
/// @brief Versioned scenario configs and deterministic initial data.
///
/// Config keys (unknown keys are rejected):
///   schema_version  1
///   grid            {N, n, L}
///   model           {family, nu, P, D?}
///   D               [D_1 .. D_P] (may instead live in model.D)
///   dt, t_end, dt_store, seed
///   initial         {kind: "constant" | "gaussian_bumps" | "file", params: {...}}
///   mu              optional; default 1e-6 * mean(rho(0))
///   reaction_substeps, output   optional

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/grid.hpp"
#include "rdlab/model.hpp"
#include "rdlab/solver.hpp"

namespace rdlab {

inline constexpr int kSchemaVersion = 1;

/// Malformed or inadmissible configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InitialSpec {
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  GridSpec grid;
  std::string family;
  double nu = 1.5;
  int species = 0;
  std::vector<double> D;
  double dt = 0.0;
  double t_end = 0.0;
  double dt_store = 0.0;
  std::uint64_t seed = 0;
  InitialSpec initial;
  std::optional<double> mu;
  int reaction_substeps = 1;
  std::string output;
  /// Directory against which relative file paths are resolved.
  std::filesystem::path base_dir;

  ReactionModel model() const;
  DiffusionSpec diffusion() const;
  RunSettings settings() const;
};

/// Throws ConfigError on unknown keys, missing or mistyped fields, or
/// values outside their ranges.
ScenarioConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ScenarioConfig parse_config_text(const std::string& text,
                                 const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& cfg);

/// Reaction models addressable from configs: four_species_exchange,
/// two_species_linear, two_species_wrong_sign, zero.
ReactionModel make_model(const std::string& family, double nu, int species);

/// constant:        {value} or {values: [P]}
/// gaussian_bumps:  {count, amplitude | amplitude_range: [lo, hi], width,
///                   spread, peak?}; centers uniform in [-spread, spread]^N,
///                   each bump A exp(-|x - c|^2 / (2 width^2)) under the
///                   minimum-image distance; `peak` rescales so the largest
///                   value over all species equals it.
/// file:            {path} to an RDF1 snapshot on the same grid.
/// Throws ConfigError for inadmissible data: non-finite M0, negative values,
/// or boundary mass fraction of rho above 1e-6.
SpeciesField make_initial(const ScenarioConfig& cfg);

/// The fixed reference scenario: N=3, n=64, L=8, P=4, nu=1.5, D=(1,2,0.5,1.5),
/// dt=2e-4, t_end=1, dt_store=0.05, gaussian bumps with seed 7.
ScenarioConfig standard_scenario();

}  // namespace rdlab
