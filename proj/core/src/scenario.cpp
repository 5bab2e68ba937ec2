#include "rdlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "rdlab/entropy.hpp"
#include "rdlab/field_io.hpp"
#include "rdlab/maxp.hpp"
#include "rdlab/weaknorm.hpp"

namespace rdlab {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

const json& require(const json& j, const std::string& where, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(where + ": missing key '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": not finite");
  return v;
}

long integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<long>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

double positive(const json& j, const std::string& where) {
  const double v = number(j, where);
  if (!(v > 0.0)) throw ConfigError(where + ": must be positive");
  return v;
}

}  // namespace

ReactionModel make_model(const std::string& family, double nu, int species) {
  if (family == "four_species_exchange") {
    if (species != 4) throw ConfigError("model: four_species_exchange requires P = 4");
    if (!(nu > 0.0 && nu < 2.0)) throw ConfigError("model: nu must lie in (0, 2)");
    return four_species_exchange(nu);
  }
  if (family == "two_species_linear" || family == "two_species_wrong_sign") {
    if (species != 2) throw ConfigError("model: " + family + " requires P = 2");
    return family == "two_species_linear" ? two_species_linear().as_reaction()
                                          : two_species_wrong_sign().as_reaction();
  }
  if (family == "zero") {
    if (species < 1) throw ConfigError("model: P must be >= 1");
    return zero_reaction(species);
  }
  throw ConfigError("model: unknown family '" + family + "'");
}

ReactionModel ScenarioConfig::model() const { return make_model(family, nu, species); }

DiffusionSpec ScenarioConfig::diffusion() const { return DiffusionSpec(D); }

RunSettings ScenarioConfig::settings() const {
  RunSettings s;
  s.dt = dt;
  s.t_end = t_end;
  s.dt_store = dt_store;
  s.reaction_substeps = reaction_substeps;
  return s;
}

ScenarioConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  reject_unknown(j, "config",
                 {"schema_version", "grid", "model", "D", "dt", "t_end", "dt_store", "seed",
                  "initial", "mu", "reaction_substeps", "output"});
  ScenarioConfig c;
  c.base_dir = base_dir;
  c.schema_version = static_cast<int>(integer(require(j, "config", "schema_version"),
                                              "schema_version"));
  if (c.schema_version != kSchemaVersion) {
    throw ConfigError("schema_version: unsupported version " +
                      std::to_string(c.schema_version));
  }

  const auto& g = require(j, "config", "grid");
  reject_unknown(g, "grid", {"N", "n", "L"});
  const long dim = integer(require(g, "grid", "N"), "grid.N");
  const long n = integer(require(g, "grid", "n"), "grid.n");
  const double len = positive(require(g, "grid", "L"), "grid.L");
  try {
    c.grid = GridSpec(static_cast<int>(dim), static_cast<int>(n), len);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }

  const auto& m = require(j, "config", "model");
  reject_unknown(m, "model", {"family", "nu", "P", "D"});
  const auto& fam = require(m, "model", "family");
  if (!fam.is_string()) throw ConfigError("model.family: expected a string");
  c.family = fam.get<std::string>();
  c.nu = number(require(m, "model", "nu"), "model.nu");
  c.species = static_cast<int>(integer(require(m, "model", "P"), "model.P"));
  if (c.species < 1) throw ConfigError("model.P: must be >= 1");

  std::optional<std::vector<double>> d_top, d_model;
  if (j.contains("D")) d_top = numbers(j["D"], "D");
  if (m.contains("D")) d_model = numbers(m["D"], "model.D");
  if (!d_top && !d_model) throw ConfigError("config: missing key 'D'");
  if (d_top && d_model && *d_top != *d_model) {
    throw ConfigError("D: top-level D and model.D disagree");
  }
  c.D = d_top ? *d_top : *d_model;
  if (static_cast<int>(c.D.size()) != c.species) {
    throw ConfigError("D: expected " + std::to_string(c.species) + " coefficients");
  }
  for (double d : c.D) {
    if (!(d > 0.0)) throw ConfigError("D: coefficients must be positive");
  }

  c.dt = positive(require(j, "config", "dt"), "dt");
  c.t_end = number(require(j, "config", "t_end"), "t_end");
  if (c.t_end < 0.0) throw ConfigError("t_end: must be nonnegative");
  c.dt_store = positive(require(j, "config", "dt_store"), "dt_store");
  const auto& seed = require(j, "config", "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long>() >= 0)) {
    throw ConfigError("seed: expected a nonnegative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  auto whole = [&](double span, const char* what) {
    const double k = span / c.dt;
    if (std::abs(k - std::round(k)) > 1e-9 * std::max(1.0, k)) {
      throw ConfigError(std::string(what) + ": must be a whole multiple of dt");
    }
  };
  whole(c.t_end, "t_end");
  whole(c.dt_store, "dt_store");

  const auto& init = require(j, "config", "initial");
  reject_unknown(init, "initial", {"kind", "params"});
  const auto& kind = require(init, "initial", "kind");
  if (!kind.is_string()) throw ConfigError("initial.kind: expected a string");
  c.initial.kind = kind.get<std::string>();
  const std::map<std::string, std::set<std::string>> param_keys{
      {"constant", {"value", "values"}},
      {"gaussian_bumps", {"count", "amplitude", "amplitude_range", "width", "spread", "peak"}},
      {"file", {"path"}}};
  const auto keys = param_keys.find(c.initial.kind);
  if (keys == param_keys.end()) {
    throw ConfigError("initial.kind: unknown kind '" + c.initial.kind + "'");
  }
  if (init.contains("params")) {
    if (!init["params"].is_object()) throw ConfigError("initial.params: expected an object");
    c.initial.params = init["params"];
  }
  reject_unknown(c.initial.params, "initial.params", keys->second);

  if (j.contains("mu")) c.mu = positive(j["mu"], "mu");
  if (j.contains("reaction_substeps")) {
    c.reaction_substeps = static_cast<int>(integer(j["reaction_substeps"], "reaction_substeps"));
    if (c.reaction_substeps < 1) throw ConfigError("reaction_substeps: must be >= 1");
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("output: expected a string");
    c.output = j["output"].get<std::string>();
  }
  // Validates family, nu and P together.
  (void)c.model();
  return c;
}

ScenarioConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(j, base_dir);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

json to_json(const ScenarioConfig& c) {
  json j = {{"schema_version", c.schema_version},
            {"grid", {{"N", c.grid.dim()}, {"n", c.grid.n()}, {"L", c.grid.length()}}},
            {"model", {{"family", c.family}, {"nu", c.nu}, {"P", c.species}}},
            {"D", c.D},
            {"dt", c.dt},
            {"t_end", c.t_end},
            {"dt_store", c.dt_store},
            {"seed", c.seed},
            {"initial", {{"kind", c.initial.kind}, {"params", c.initial.params}}},
            {"reaction_substeps", c.reaction_substeps}};
  if (c.mu) j["mu"] = *c.mu;
  if (!c.output.empty()) j["output"] = c.output;
  return j;
}

namespace {

SpeciesField constant_field(const ScenarioConfig& c) {
  const auto& p = c.initial.params;
  reject_unknown(p, "initial.params", {"value", "values"});
  std::vector<double> values;
  if (p.contains("values")) {
    values = numbers(p["values"], "initial.params.values");
    if (static_cast<int>(values.size()) != c.species) {
      throw ConfigError("initial.params.values: expected P entries");
    }
  } else {
    values.assign(c.species, number(require(p, "initial.params", "value"), "initial.params.value"));
  }
  SpeciesField f(c.grid, c.species);
  for (int i = 0; i < c.species; ++i) std::fill(f.species[i].begin(), f.species[i].end(), values[i]);
  return f;
}

SpeciesField bump_field(const ScenarioConfig& c) {
  const auto& p = c.initial.params;
  reject_unknown(p, "initial.params",
                 {"count", "amplitude", "amplitude_range", "width", "spread", "peak"});
  const long count = p.contains("count") ? integer(p["count"], "initial.params.count") : 1;
  if (count < 1) throw ConfigError("initial.params.count: must be >= 1");
  double a_lo = 1.0, a_hi = 1.0;
  if (p.contains("amplitude_range")) {
    const auto r = numbers(p["amplitude_range"], "initial.params.amplitude_range");
    if (r.size() != 2 || !(r[0] > 0.0) || r[1] < r[0]) {
      throw ConfigError("initial.params.amplitude_range: expected [lo, hi] with 0 < lo <= hi");
    }
    a_lo = r[0];
    a_hi = r[1];
  } else if (p.contains("amplitude")) {
    a_lo = a_hi = positive(p["amplitude"], "initial.params.amplitude");
  }
  const double width = positive(require(p, "initial.params", "width"), "initial.params.width");
  const double spread = p.contains("spread") ? number(p["spread"], "initial.params.spread") : 0.0;
  if (spread < 0.0 || spread > 0.5 * c.grid.length()) {
    throw ConfigError("initial.params.spread: must lie in [0, L/2]");
  }

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> amp(a_lo, a_hi);
  std::uniform_real_distribution<double> pos(-spread, spread);
  SpeciesField f(c.grid, c.species);
  const double inv = 1.0 / (2.0 * width * width);
  for (int i = 0; i < c.species; ++i) {
    for (long b = 0; b < count; ++b) {
      Point center{0.0, 0.0, 0.0};
      for (int d = 0; d < c.grid.dim(); ++d) center[d] = spread > 0.0 ? pos(rng) : 0.0;
      const double a = a_hi > a_lo ? amp(rng) : a_lo;
      for (std::size_t idx = 0; idx < c.grid.cells(); ++idx) {
        const double r = c.grid.periodic_distance(c.grid.position(idx), center);
        f.species[i][idx] += a * std::exp(-r * r * inv);
      }
    }
  }
  if (p.contains("peak")) {
    const double peak = positive(p["peak"], "initial.params.peak");
    const auto mx = f.maxima();
    const double m = *std::max_element(mx.begin(), mx.end());
    for (auto& s : f.species) {
      for (double& v : s) v *= peak / m;
    }
  }
  return f;
}

SpeciesField file_field(const ScenarioConfig& c) {
  const auto& p = c.initial.params;
  reject_unknown(p, "initial.params", {"path"});
  const auto& path_j = require(p, "initial.params", "path");
  if (!path_j.is_string()) throw ConfigError("initial.params.path: expected a string");
  std::filesystem::path path = path_j.get<std::string>();
  if (path.is_relative()) path = c.base_dir / path;
  if (!std::filesystem::exists(path)) {
    throw ConfigError("initial.params.path: file not found: " + path.string());
  }
  Snapshot s;
  try {
    s = read_rdf1(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("initial.params.path: ") + e.what());
  }
  if (!(s.field.grid == c.grid) || s.field.count() != c.species) {
    throw ConfigError("initial.params.path: snapshot grid or species count differs from config");
  }
  s.field.time = 0.0;
  return std::move(s.field);
}

}  // namespace

SpeciesField make_initial(const ScenarioConfig& c) {
  SpeciesField f;
  if (c.initial.kind == "constant") {
    f = constant_field(c);
  } else if (c.initial.kind == "gaussian_bumps") {
    f = bump_field(c);
  } else if (c.initial.kind == "file") {
    f = file_field(c);
  } else {
    throw ConfigError("initial.kind: unknown kind '" + c.initial.kind + "'");
  }
  for (const auto& s : f.species) {
    for (double v : s) {
      if (!std::isfinite(v) || v < 0.0) {
        throw ConfigError("initial: data must be finite and nonnegative");
      }
    }
  }
  if (!std::isfinite(m0(f).m0)) throw ConfigError("initial: M0 is not finite");
  // Constant data fills the box by construction; the leakage test applies to
  // localized data only.
  if (c.initial.kind != "constant") {
    const double b = boundary_mass_fraction(c.grid, f.total());
    if (b > kBoundaryMassLimit) {
      std::ostringstream os;
      os << "initial: boundary mass fraction " << b << " exceeds " << kBoundaryMassLimit;
      throw ConfigError(os.str());
    }
  }
  return f;
}

ScenarioConfig standard_scenario() {
  ScenarioConfig c;
  c.grid = GridSpec(3, 64, 8.0);
  c.family = "four_species_exchange";
  c.nu = 1.5;
  c.species = 4;
  c.D = {1.0, 2.0, 0.5, 1.5};
  c.dt = 2e-4;
  c.t_end = 1.0;
  c.dt_store = 0.05;
  c.seed = 7;
  c.initial.kind = "gaussian_bumps";
  c.initial.params = {{"count", 2}, {"amplitude_range", {0.5, 2.0}}, {"width", 0.5},
                      {"spread", 1.0}};
  return c;
}

}  // namespace rdlab
