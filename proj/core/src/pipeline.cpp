#include "rdlab/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "rdlab/field_io.hpp"
#include "rdlab/solver.hpp"
#include "rdlab/weaknorm.hpp"

#ifndef RDLAB_VERSION
#define RDLAB_VERSION "unknown"
#endif

namespace rdlab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%05zu.rdf1", index);
  return buf;
}

double default_mu(const SpeciesField& initial) {
  const auto rho = initial.total();
  double s = 0.0;
  for (double v : rho) s += v;
  const double mean = rho.empty() ? 0.0 : s / static_cast<double>(rho.size());
  return mean > 0.0 ? 1e-6 * mean : 1e-12;
}

std::vector<Monitor> evaluate_monitors(const std::vector<DiagnosticsRecord>& records,
                                       double boundary_mass_max) {
  std::vector<Monitor> out;
  if (records.empty()) return out;
  const double m0 = records.front().total_mass();
  double drift = 0.0, raw_drift = 0.0;
  double dissipation = 0.0;
  for (const auto& r : records) {
    if (m0 > 0.0) {
      const double change = r.total_mass() - m0;
      raw_drift = std::max(raw_drift, std::abs(change) / m0);
      drift = std::max(drift, std::abs(change - r.clipped_mass) / m0);
    }
    const double scale = std::max(std::abs(r.entropy), r.total_mass());
    if (scale > 0.0) dissipation = std::max(dissipation, -r.dissipation / scale);
  }
  out.push_back({"mass_drift", drift, 1e-10});
  out.push_back({"raw_mass_drift", raw_drift, 1e-10, false});
  const double clipped = m0 > 0.0 ? records.back().clipped_mass / m0 : 0.0;
  out.push_back({"clipped_fraction", clipped, 1e-8});
  out.push_back({"entropy_increase", entropy_monotonicity(records).max_relative_increase, 1e-6});
  out.push_back({"dissipation", dissipation, 1e-10});
  if (records.front().weak_norm) {
    double inc = 0.0;
    for (std::size_t k = 1; k < records.size(); ++k) {
      const double prev = *records[k - 1].weak_norm;
      if (prev > 0.0) inc = std::max(inc, (*records[k].weak_norm - prev) / prev);
    }
    out.push_back({"weak_norm_increase", inc, 1e-2});
  }
  out.push_back({"boundary_mass", boundary_mass_max, kBoundaryMassLimit, false});
  for (auto& m : out) m.tripped = m.value > m.limit;
  return out;
}

namespace {

struct IndexedFile {
  std::string name;
  std::string hash;
  std::size_t bytes = 0;
};

IndexedFile write_indexed(const fs::path& dir, const std::string& name, const std::string& data) {
  write_bytes_atomic(dir / name, data);
  const auto* p = reinterpret_cast<const std::uint8_t*>(data.data());
  return {name, hex64(fnv1a64(p, data.size())), data.size()};
}

IndexedFile index_existing(const fs::path& dir, const std::string& name) {
  const auto bytes = read_bytes(dir / name);
  return {name, hex64(fnv1a64(bytes.data(), bytes.size())), bytes.size()};
}

json monitor_json(const std::vector<Monitor>& ms) {
  json j = json::array();
  for (const auto& m : ms) {
    j.push_back({{"name", m.name}, {"value", m.value}, {"limit", m.limit},
                 {"enforced", m.enforced}, {"tripped", m.tripped}});
  }
  return j;
}

}  // namespace

PipelineResult run_pipeline(const ScenarioConfig& cfg, const fs::path& out_dir,
                            const std::string& config_bytes) {
  const auto wall_start = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  // Stale artifacts from an earlier run would otherwise leak into the index.
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    const auto name = entry.path().filename().string();
    if ((name.rfind("snap_", 0) == 0 && entry.path().extension() == ".rdf1") ||
        name == "failure.json" || name == "last_good.rdf1" || name == "manifest.json") {
      fs::remove(entry.path());
    }
  }

  PipelineResult res;
  const std::string cfg_text = config_bytes.empty() ? to_json(cfg).dump(2) + "\n" : config_bytes;
  std::vector<IndexedFile> files;
  files.push_back(write_indexed(out_dir, "config.json", cfg_text));
  const auto* cp = reinterpret_cast<const std::uint8_t*>(cfg_text.data());
  const std::string config_hash = hex64(fnv1a64(cp, cfg_text.size()));

  const auto model = cfg.model();
  const auto diffusion = cfg.diffusion();
  const auto initial = make_initial(cfg);
  res.mu = cfg.mu ? *cfg.mu : default_mu(initial);

  std::optional<NewtonianSolver> newton;
  if (cfg.grid.dim() == 3) newton.emplace(cfg.grid);

  std::string ndjson;
  std::string csv = csv_header(cfg.species);
  std::size_t index = 0;
  json failure;
  auto on_store = [&](const SpeciesField& f, const ClipLog& clip) {
    const std::string name = snapshot_name(index++);
    const auto bytes = encode_rdf1(f, cfg.nu);
    files.push_back(write_indexed(out_dir, name, std::string(bytes.begin(), bytes.end())));
    auto rec = record(f, model, clip.total());
    if (newton) rec.weak_norm = weak_norm(*newton, f.total(), BoundaryPolicy::report).norm;
    ndjson += to_ndjson_line(rec);
    csv += csv_row(rec);
    res.records.push_back(std::move(rec));
  };

  RunSettings settings = cfg.settings();
  settings.keep_snapshots = false;
  try {
    const auto run_result = run(model, diffusion, initial, settings, StoreCallback(on_store));
    res.clipped_mass_total = run_result.clip.total();
    res.boundary_mass_max = run_result.boundary_mass_max;
    res.monitors = evaluate_monitors(res.records, res.boundary_mass_max);
    res.status = "ok";
    for (const auto& m : res.monitors) {
      if (m.enforced && m.tripped) {
        res.exit_code = kExitInvariant;
        res.status = "invariant_violation";
        res.reason = res.reason.empty() ? m.name : res.reason + "," + m.name;
      }
    }
  } catch (const NumericalError& e) {
    res.exit_code = kExitNumerical;
    res.status = "numerical_failure";
    res.reason = e.reason();
    failure = {{"reason", e.reason()}, {"message", e.what()}};
    if (e.last_good) {
      write_rdf1(out_dir / "last_good.rdf1", *e.last_good, cfg.nu);
      files.push_back(index_existing(out_dir, "last_good.rdf1"));
      failure["last_good_time"] = e.last_good->time;
    }
    res.monitors = evaluate_monitors(res.records, res.boundary_mass_max);
  }
  if (res.exit_code == kExitInvariant) {
    failure = {{"reason", res.reason}, {"message", "invariant monitor tripped"},
               {"monitors", monitor_json(res.monitors)}};
  }

  files.push_back(write_indexed(out_dir, "diagnostics.ndjson", ndjson));
  files.push_back(write_indexed(out_dir, "diagnostics.csv", csv));
  if (!failure.is_null()) {
    files.push_back(write_indexed(out_dir, "failure.json", failure.dump(2) + "\n"));
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  json index_j = json::array();
  for (const auto& f : files) {
    index_j.push_back({{"name", f.name}, {"fnv1a64", f.hash}, {"bytes", f.bytes}});
  }
  res.manifest = {{"config_hash", config_hash},
                  {"code_version", RDLAB_VERSION},
                  {"wall_time_s", wall},
                  {"status", res.status},
                  {"reason", res.reason},
                  {"mu", res.mu},
                  {"regularization", "d_mu = (sum_i D_i a_i + mu d_ref) / (rho + mu)"},
                  {"clipped_mass_total", res.clipped_mass_total},
                  {"boundary_mass_max", res.boundary_mass_max},
                  {"snapshots", index},
                  {"monitors", monitor_json(res.monitors)},
                  {"files", index_j}};
  write_bytes_atomic(out_dir / "manifest.json", res.manifest.dump(2) + "\n");
  return res;
}

}  // namespace rdlab
