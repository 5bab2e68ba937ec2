/// @file rdlab.cpp
/// @brief Command-line front end: run, diagnose, degiorgi, weaknorm,
/// rescale, maxprinciple, verify-hypotheses.
///
/// Exit codes: 0 ok, 2 config/input error, 3 invariant violation,
/// 4 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rdlab/degiorgi.hpp"
#include "rdlab/entropy.hpp"
#include "rdlab/field_io.hpp"
#include "rdlab/maxp.hpp"
#include "rdlab/pipeline.hpp"
#include "rdlab/scaling.hpp"
#include "rdlab/scenario.hpp"
#include "rdlab/solver.hpp"
#include "rdlab/weaknorm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rdlab;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Anchor parse_anchor(const std::string& s, int dim) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("--anchor: cannot parse '" + tok + "'");
    }
  }
  if (v.empty() || static_cast<int>(v.size()) > 1 + dim) {
    throw ConfigError("--anchor: expected t[,x[,y[,z]]] with at most " + std::to_string(dim) +
                      " coordinates");
  }
  Anchor a;
  a.t = v[0];
  for (std::size_t k = 1; k < v.size(); ++k) a.x[k - 1] = v[k];
  return a;
}

struct RunDir {
  SpaceTimeSlab slab;
  double nu = 0.0;
};

RunDir load_run(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  const auto snaps = read_rdf1_directory(dir);
  if (snaps.empty()) throw ConfigError("no snap_*.rdf1 files in " + dir.string());
  RunDir r;
  r.nu = snaps.front().nu;
  r.slab = slab_from_snapshots(snaps);
  return r;
}

int cmd_run(const std::string& config, const std::string& out) {
  const auto text = read_text(config);
  const auto cfg = parse_config_text(text, fs::path(config).parent_path());
  fs::path dir = out.empty() ? fs::path(cfg.output) : fs::path(out);
  if (dir.empty()) throw ConfigError("run: no output directory (--out or config.output)");
  const auto res = run_pipeline(cfg, dir, text);
  std::cout << json{{"status", res.status}, {"reason", res.reason},
                    {"records", res.records.size()}, {"out", dir.string()}}
                   .dump()
            << "\n";
  return res.exit_code;
}

int cmd_diagnose(const std::string& run_dir) {
  const fs::path dir = run_dir;
  const auto cfg = parse_config_text(read_text(dir / "config.json"), dir);
  const auto data = load_run(dir);
  const auto model = cfg.model();
  const auto diffusion = cfg.diffusion();
  std::vector<DiagnosticsRecord> records;
  std::optional<NewtonianSolver> newton;
  if (data.slab.grid().dim() == 3) newton.emplace(data.slab.grid());
  for (const auto& s : data.slab.snapshots) {
    auto r = record(s, model);
    if (newton) r.weak_norm = weak_norm(*newton, s.total(), BoundaryPolicy::report).norm;
    records.push_back(std::move(r));
  }
  double boundary = 0.0;
  for (const auto& s : data.slab.snapshots) {
    boundary = std::max(boundary, boundary_mass_fraction(s.grid, s.total()));
  }
  const auto m = m0(data.slab.snapshots.front());
  json out;
  out["m0"] = m.m0;
  out["records"] = records.size();
  const auto monitors = evaluate_monitors(records, boundary);
  int code = kExitOk;
  for (const auto& mo : monitors) {
    out["monitors"][mo.name] = {{"value", mo.value}, {"limit", mo.limit}, {"tripped", mo.tripped}};
    if (mo.enforced && mo.tripped && mo.name != "clipped_fraction") code = kExitInvariant;
  }
  if (records.size() >= 2) {
    const auto b = budget_check(records, diffusion, m.m0);
    out["budget"] = {{"c0", b.fitted.c0}, {"c1", b.fitted.c1}, {"c1_reference", b.c1_reference},
                     {"holds", b.holds}, {"c1_within_10x", b.c1_within_10x}};
    const auto id = entropy_identity_check(records, diffusion);
    out["entropy_identity"] = {{"entropy_change", id.entropy_change},
                               {"predicted_change", id.predicted_change},
                               {"relative_error", id.relative_error}};
  }
  std::cout << out.dump() << "\n";
  return code;
}

int cmd_degiorgi(const std::string& run_dir, const std::string& anchor_s, int n_max, double p,
                 double delta) {
  const auto data = load_run(run_dir);
  TruncationLadder ladder;
  ladder.n_max = n_max;
  ladder.anchor = anchor_s.empty() ? Anchor{data.slab.t_end(), {0.0, 0.0, 0.0}}
                                   : parse_anchor(anchor_s, data.slab.grid().dim());
  const auto U = compute_ladder(data.slab, ladder);
  const double expo = (data.slab.grid().dim() + 2.0) / data.slab.grid().dim();
  for (int n = 0; n <= n_max; ++n) {
    json line = {{"n", n}, {"k_n", TruncationLadder::level(n)}, {"t_n", TruncationLadder::radius(n)},
                 {"U_n", U[n]}};
    if (n > 0 && U[n - 1] > 0.0) {
      line["c_n"] = U[n] / std::pow(U[n - 1], expo);
    } else {
      line["c_n"] = nullptr;
    }
    std::cout << line.dump() << "\n";
  }
  if (U.size() >= 3) {
    const auto r = recursion_check(U, data.slab.grid().dim());
    std::cout << json{{"recursion",
                       {{"vacuous", r.vacuous}, {"exponent", r.exponent},
                        {"log_constant", r.log_constant}, {"pairs_used", r.pairs_used},
                        {"superlinear_decay", r.superlinear_decay}}}}
                     .dump()
              << "\n";
  }
  if (p > 0.0) {
    const auto lb = local_bound_experiment(data.slab, p, delta, ladder.anchor);
    std::cout << json{{"local_bound",
                       {{"p", p}, {"delta", delta}, {"norm", lb.norm}, {"triggered", lb.triggered},
                        {"center_values", lb.center_values}, {"pass", lb.pass}}}}
                     .dump()
              << "\n";
    if (!lb.pass) return kExitInvariant;
  }
  return kExitOk;
}

int cmd_weaknorm(const std::string& run_dir) {
  const auto data = load_run(run_dir);
  const auto series = monotonicity_check(data.slab);
  for (const auto& r : series.reports) {
    std::cout << json{{"t", r.t}, {"norm", r.norm},
                      {"argmax", {r.argmax[0], r.argmax[1], r.argmax[2]}},
                      {"boundary_mass", r.boundary_mass}}
                     .dump()
              << "\n";
  }
  std::cout << json{{"max_relative_increase", series.max_relative_increase},
                    {"boundary_mass_max", series.boundary_mass_max}}
                   .dump()
            << "\n";
  return kExitOk;
}

int cmd_rescale(const std::string& run_dir, const std::string& out, double eps, double nu,
                const std::string& anchor_s) {
  if (out.empty()) throw ConfigError("rescale: --out is required");
  const auto data = load_run(run_dir);
  ScalingParams params;
  params.eps = eps;
  params.nu = nu > 0.0 ? nu : data.nu;
  params.anchor = anchor_s.empty() ? Anchor{data.slab.t_end(), {0.0, 0.0, 0.0}}
                                   : parse_anchor(anchor_s, data.slab.grid().dim());
  const auto scaled = rescale_field(data.slab, params);
  fs::create_directories(out);
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    write_rdf1(fs::path(out) / snapshot_name(k), scaled.snapshots[k], params.nu);
  }
  const auto id = scaling_identity_check(data.slab, params);
  json rep = {{"eps", params.eps},
              {"nu", params.nu},
              {"exponent_weak", amplitude_exponent(params.nu) - 2.0},
              {"exponent_grad", amplitude_exponent(params.nu) - data.slab.grid().dim()},
              {"grad_ratio", id.grad_ratio},
              {"grad_expected", id.grad_expected},
              {"grad_error", id.grad_error},
              {"pass", id.pass}};
  if (data.slab.grid().dim() == 3) {
    rep["weak_ratio"] = id.weak_ratio;
    rep["weak_expected"] = id.weak_expected;
    rep["weak_error"] = id.weak_error;
  }
  std::cout << rep.dump() << "\n";
  return id.pass ? kExitOk : kExitInvariant;
}

int cmd_maxprinciple(const std::string& config) {
  const auto cfg = load_config(config);
  const auto model = cfg.model();
  const auto initial = make_initial(cfg);
  bool asserted = false;
  if (cfg.species == 2 && (cfg.family == "two_species_linear" ||
                           cfg.family == "two_species_wrong_sign")) {
    const auto two = cfg.family == "two_species_linear" ? two_species_linear()
                                                        : two_species_wrong_sign();
    const auto sign = sign_condition_check(two, 10000, cfg.seed);
    std::cout << json{{"sign_condition", to_json(sign)}}.dump() << "\n";
    asserted = sign.pass;
  }
  const auto rep = maxprinciple_run(model, cfg.diffusion(), initial, cfg.settings());
  for (const auto& s : rep.samples) {
    json line = {{"t", s.t}};
    for (std::size_t i = 0; i < s.sup.size(); ++i) line["sup" + std::to_string(i + 1)] = s.sup[i];
    std::cout << line.dump() << "\n";
  }
  std::cout << json{{"initial_sup", rep.initial_sup},
                    {"max_sup", rep.max_sup},
                    {"max_relative_growth", rep.max_relative_growth},
                    {"asserted", asserted},
                    {"pass", rep.pass}}
                   .dump()
            << "\n";
  return asserted && !rep.pass ? kExitInvariant : kExitOk;
}

int cmd_verify(const std::string& config, const std::string& family, double nu, int species,
               std::size_t samples, std::uint64_t seed) {
  ReactionModel model;
  if (!config.empty()) {
    const auto cfg = load_config(config);
    model = cfg.model();
    seed = cfg.seed;
  } else {
    model = make_model(family, nu, species);
  }
  const auto rep = verify_hypotheses(model, samples, seed);
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"samples", c.samples}, {"violations", c.violations},
                      {"worst", c.worst}, {"pass", c.pass()}});
  }
  std::cout << json{{"family", model.family},
                    {"nu", model.nu},
                    {"lambda", rep.lambda},
                    {"lambda_domain", rep.lambda_domain},
                    {"tolerance", rep.tolerance},
                    {"max_growth_quotient", rep.max_growth_quotient},
                    {"checks", checks},
                    {"pass", rep.pass()}}
                   .dump()
            << "\n";
  return rep.pass() ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rdlab: reaction-diffusion regularity laboratory"};
  app.require_subcommand(1);

  std::string config, out, run_dir, anchor, family = "four_species_exchange";
  double eps = 0.5, nu = 0.0, p = 0.0, delta = 0.0;
  int n_max = 6, species = 4;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;

  auto* run = app.add_subcommand("run", "Run a scenario and write artifacts");
  run->add_option("--config", config, "Scenario config (JSON)")->required();
  run->add_option("--out", out, "Output directory (overrides config.output)");

  auto* diag = app.add_subcommand("diagnose", "Recompute diagnostics and budget for a run");
  diag->add_option("--run", run_dir, "Run directory")->required();

  auto* dg = app.add_subcommand("degiorgi", "Level-set energy ladder for a run");
  dg->add_option("--run", run_dir, "Run directory")->required();
  dg->add_option("--anchor", anchor, "t,x,y,z (default: final time, origin)");
  dg->add_option("--n-max", n_max, "Ladder depth")->check(CLI::Range(2, 30));
  dg->add_option("--p", p, "Exponent for the local bound experiment")->check(CLI::PositiveNumber);
  dg->add_option("--delta", delta, "Smallness threshold for the local bound experiment");

  auto* wn = app.add_subcommand("weaknorm", "Weak norm of rho at every snapshot");
  wn->add_option("--run", run_dir, "Run directory")->required();

  auto* rs = app.add_subcommand("rescale", "Parabolic rescaling of a run");
  rs->add_option("--run", run_dir, "Run directory")->required();
  rs->add_option("--out", out, "Output directory")->required();
  rs->add_option("--eps", eps, "Scale 2^-j")->check(CLI::PositiveNumber);
  rs->add_option("--nu", nu, "Growth exponent (default: from snapshots)");
  rs->add_option("--anchor", anchor, "T,x,y,z (default: final time, origin)");

  auto* mp = app.add_subcommand("maxprinciple", "Running sup monitor");
  mp->add_option("--config", config, "Scenario config (JSON)")->required();

  auto* vh = app.add_subcommand("verify-hypotheses", "Sampled hypothesis check");
  vh->add_option("--config", config, "Scenario config (JSON)");
  vh->add_option("--family", family, "Reaction family");
  vh->add_option("--nu", nu, "Growth exponent");
  vh->add_option("--P", species, "Species count");
  vh->add_option("--samples", samples, "Sample count")->check(CLI::PositiveNumber);
  vh->add_option("--seed", seed, "Sampler seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out);
    if (*diag) return cmd_diagnose(run_dir);
    if (*dg) return cmd_degiorgi(run_dir, anchor, n_max, p, delta);
    if (*wn) return cmd_weaknorm(run_dir);
    if (*rs) return cmd_rescale(run_dir, out, eps, nu, anchor);
    if (*mp) return cmd_maxprinciple(config);
    if (*vh) return cmd_verify(config, family, nu > 0.0 ? nu : 1.5, species, samples, seed);
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << json{{"error", "numerical"}, {"reason", e.reason()}, {"message", e.what()}}.dump()
              << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", "input"}, {"message", e.what()}}.dump() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << json{{"error", "input"}, {"message", e.what()}}.dump() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
