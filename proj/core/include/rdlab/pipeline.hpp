/// @file pipeline.hpp
/// @brief Runs a scenario to disk: snapshots, diagnostics, manifest.
///
/// Output directory layout:
///   snap_00000.rdf1 ...   one per store time
///   diagnostics.ndjson    one DiagnosticsRecord per store time
///   diagnostics.csv       same columns
///   config.json           the config bytes the run was started from
///   manifest.json         hashes, monitors and the file index (written last)
///   failure.json          only when the run failed
///   last_good.rdf1        only after a numerical failure

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/entropy.hpp"
#include "rdlab/scenario.hpp"

namespace rdlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitInvariant = 3,
  kExitNumerical = 4,
};

struct Monitor {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  /// Tripped monitors make the run exit with kExitInvariant.
  bool enforced = true;
  bool tripped = false;
};

/// The invariant monitors evaluated over a record stream:
///   mass_drift          max_t |M(t) - M(0) - clipped(t)| / M(0) <= 1e-10
///   raw_mass_drift      max_t |M(t) - M(0)| / M(0)            <= 1e-10 (reported only)
///   clipped_fraction    clipped mass / M(0)                   <= 1e-8
///   entropy_increase    per-record relative entropy increase  <= 1e-6
///   dissipation         -min_t dissipation / scale            <= 1e-10
///   weak_norm_increase  per-record relative increase (N = 3)  <= 1e-2
///   boundary_mass       max edge-layer mass fraction          <= 1e-6 (reported only)
std::vector<Monitor> evaluate_monitors(const std::vector<DiagnosticsRecord>& records,
                                       double boundary_mass_max);

struct PipelineResult {
  int exit_code = kExitOk;
  std::string status;  ///< "ok", "invariant_violation" or "numerical_failure"
  std::string reason;
  std::vector<DiagnosticsRecord> records;
  std::vector<Monitor> monitors;
  double mu = 0.0;
  double clipped_mass_total = 0.0;
  double boundary_mass_max = 0.0;
  nlohmann::json manifest;
};

/// `config_bytes` is stored verbatim and hashed; when empty the canonical
/// JSON dump of `cfg` is used. Creates `out_dir` if needed. NumericalError
/// is converted into a failure record and kExitNumerical.
PipelineResult run_pipeline(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                            const std::string& config_bytes = {});

/// Default regularization: 1e-6 times the mean of rho over the box.
double default_mu(const SpeciesField& initial);

std::string snapshot_name(std::size_t index);

}  // namespace rdlab
