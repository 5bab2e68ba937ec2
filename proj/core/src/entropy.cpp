#include "rdlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rdlab {

double DiagnosticsRecord::total_mass() const {
  double s = 0.0;
  for (double m : mass_i) s += m;
  return s;
}

namespace {

double radius(const Point& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

double a_log_a(double a) { return a > kLogFloor ? a * std::log(a) : 0.0; }

}  // namespace

DiagnosticsRecord record(const SpeciesField& field, const ReactionModel& model,
                         double clipped_mass) {
  const auto& g = field.grid;
  const double vol = g.cell_volume();
  DiagnosticsRecord r;
  r.t = field.time;
  r.clipped_mass = clipped_mass;

  std::vector<double> dist(g.cells());
  for (std::size_t c = 0; c < g.cells(); ++c) dist[c] = radius(g.position(c));

  for (const auto& a : field.species) {
    double m = 0.0, e = 0.0, ae = 0.0, mo = 0.0;
    for (std::size_t c = 0; c < g.cells(); ++c) {
      const double v = a[c];
      const double al = a_log_a(v);
      m += v;
      e += al;
      ae += std::abs(al);
      mo += v * dist[c];
    }
    r.mass_i.push_back(m * vol);
    r.entropy += e * vol;
    r.abs_entropy += ae * vol;
    r.moment += mo * vol;
    const double f = integrate(g, grad_sqrt_density(g, a));
    r.fisher_i.push_back(f);
    r.fisher += f;
  }

  std::vector<double> state(static_cast<std::size_t>(field.count()));
  double dis = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    for (std::size_t i = 0; i < state.size(); ++i) state[i] = field.species[i][c];
    dis += entropy_production(model, state);
  }
  r.dissipation = dis * vol;
  return r;
}

nlohmann::json to_json(const DiagnosticsRecord& r) {
  nlohmann::json j;
  j["t"] = r.t;
  j["mass_i"] = r.mass_i;
  j["entropy"] = r.entropy;
  j["abs_entropy"] = r.abs_entropy;
  j["moment"] = r.moment;
  j["fisher"] = r.fisher;
  j["dissipation"] = r.dissipation;
  j["weak_norm"] = r.weak_norm ? nlohmann::json(*r.weak_norm) : nlohmann::json(nullptr);
  j["clipped_mass"] = r.clipped_mass;
  return j;
}

std::string to_ndjson_line(const DiagnosticsRecord& r) { return to_json(r).dump() + "\n"; }

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_header(int species) {
  std::string h = "t";
  for (int i = 1; i <= species; ++i) h += ",mass_" + std::to_string(i);
  h += ",entropy,abs_entropy,moment,fisher,dissipation,weak_norm,clipped_mass\n";
  return h;
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::string s = num(r.t);
  for (double m : r.mass_i) s += "," + num(m);
  s += "," + num(r.entropy) + "," + num(r.abs_entropy) + "," + num(r.moment) + "," +
       num(r.fisher) + "," + num(r.dissipation) + "," + (r.weak_norm ? num(*r.weak_norm) : "") +
       "," + num(r.clipped_mass) + "\n";
  return s;
}

M0Report m0(const SpeciesField& initial) {
  const auto& g = initial.grid;
  const double vol = g.cell_volume();
  M0Report rep;
  for (std::size_t i = 0; i < initial.species.size(); ++i) {
    const auto& a = initial.species[i];
    double w = 0.0, sup = 0.0;
    for (std::size_t c = 0; c < g.cells(); ++c) {
      const double v = a[c];
      w += v * (1.0 + radius(g.position(c))) + std::abs(a_log_a(v));
      sup = std::max(sup, std::abs(v));
    }
    rep.weighted_mass_i.push_back(w * vol);
    rep.sup_i.push_back(sup);
    const double total = w * vol + sup;
    if (rep.argmax_species < 0 || total > rep.m0) {
      rep.m0 = total;
      rep.argmax_species = static_cast<int>(i);
    }
  }
  return rep;
}

std::vector<double> budget_lhs(const std::vector<DiagnosticsRecord>& records,
                               const DiffusionSpec& diffusion) {
  std::vector<double> lhs;
  lhs.reserve(records.size());
  double sup_w = -HUGE_VAL, fisher_int = 0.0, dis_int = 0.0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (k > 0) {
      const double dt = records[k].t - records[k - 1].t;
      fisher_int += 0.5 * dt * (records[k].fisher + records[k - 1].fisher);
      dis_int += 0.5 * dt * (records[k].dissipation + records[k - 1].dissipation);
    }
    sup_w = std::max(sup_w, records[k].weighted_mass());
    lhs.push_back(sup_w + 2.0 * diffusion.d_lo() * fisher_int + dis_int);
  }
  return lhs;
}

BudgetConstants fit_budget_constants(const std::vector<std::vector<DiagnosticsRecord>>& streams,
                                     const DiffusionSpec& diffusion,
                                     const std::vector<double>& m0_values) {
  if (streams.size() != m0_values.size() || streams.empty()) {
    throw std::invalid_argument("budget fit: one M0 per record stream required");
  }
  BudgetConstants k;
  std::vector<std::vector<double>> lhs;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    if (streams[s].size() < 2) throw std::invalid_argument("budget fit: need >= 2 records");
    lhs.push_back(budget_lhs(streams[s], diffusion));
    k.c0 = std::max(k.c0, lhs.back().front() / (m0_values[s] + 1.0));
  }
  for (std::size_t s = 0; s < streams.size(); ++s) {
    const double t0 = streams[s].front().t;
    for (std::size_t j = 1; j < streams[s].size(); ++j) {
      const double dt = streams[s][j].t - t0;
      if (dt <= 0.0) continue;
      k.c1 = std::max(k.c1, (lhs[s][j] / (m0_values[s] + 1.0) - k.c0) / dt);
    }
  }
  return k;
}

BudgetReport budget_check(const std::vector<DiagnosticsRecord>& records,
                          const DiffusionSpec& diffusion, double m0_value,
                          std::optional<BudgetConstants> constants) {
  if (records.size() < 2) throw std::invalid_argument("budget_check: need >= 2 records");
  BudgetReport rep;
  rep.m0 = m0_value;
  rep.lhs = budget_lhs(records, diffusion);
  for (const auto& r : records) rep.times.push_back(r.t);
  rep.fitted = constants ? *constants : fit_budget_constants({records}, diffusion, {m0_value});
  rep.c1_reference = diffusion.d_hi() * diffusion.d_hi() / (2.0 * diffusion.d_lo());
  rep.worst_slack = -HUGE_VAL;
  const double t0 = records.front().t;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const double bound = (rep.fitted.c0 + rep.fitted.c1 * (records[k].t - t0)) * (m0_value + 1.0);
    rep.worst_slack = std::max(rep.worst_slack, rep.lhs[k] - bound);
  }
  // Relative slack absorbs the rounding in the division used by the fit.
  rep.holds = rep.worst_slack <= 1e-12 * std::abs(rep.lhs.back());
  rep.c1_within_10x = rep.fitted.c1 <= 10.0 * rep.c1_reference;
  return rep;
}

EntropyIdentityReport entropy_identity_check(const std::vector<DiagnosticsRecord>& records,
                                             const DiffusionSpec& diffusion) {
  if (records.size() < 2) throw std::invalid_argument("entropy identity: need >= 2 records");
  auto rate = [&](const DiagnosticsRecord& r) {
    if (r.fisher_i.size() != diffusion.size()) {
      throw std::invalid_argument("entropy identity: per-species Fisher terms missing");
    }
    double s = r.dissipation;
    for (std::size_t i = 0; i < r.fisher_i.size(); ++i) s += 4.0 * diffusion[i] * r.fisher_i[i];
    return s;
  };
  EntropyIdentityReport rep;
  rep.entropy_change = records.back().entropy - records.front().entropy;
  double integral = 0.0;
  for (std::size_t k = 1; k < records.size(); ++k) {
    integral += 0.5 * (records[k].t - records[k - 1].t) * (rate(records[k]) + rate(records[k - 1]));
  }
  rep.predicted_change = -integral;
  const double scale = std::max(std::abs(rep.predicted_change), 1e-300);
  rep.relative_error = std::abs(rep.entropy_change - rep.predicted_change) / scale;
  return rep;
}

EntropyTrend entropy_monotonicity(const std::vector<DiagnosticsRecord>& records) {
  EntropyTrend rep;
  for (std::size_t k = 1; k < records.size(); ++k) {
    const double scale = std::max(std::abs(records[k - 1].entropy), records[k - 1].total_mass());
    if (scale <= 0.0) continue;
    const double inc = (records[k].entropy - records[k - 1].entropy) / scale;
    if (inc > rep.max_relative_increase) {
      rep.max_relative_increase = inc;
      rep.worst_index = k;
    }
  }
  return rep;
}

}  // namespace rdlab
