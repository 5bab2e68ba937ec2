/// @file entropy.hpp
/// @brief Mass, entropy, moment, Fisher and dissipation functionals, the
/// initial-data quantity M0 and the entropy budget check.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdlab/grid.hpp"
#include "rdlab/model.hpp"

namespace rdlab {

/// One time-stamped row of scalar functionals. a ln a is taken as 0 for
/// a <= kLogFloor.
struct DiagnosticsRecord {
  double t = 0.0;
  std::vector<double> mass_i;       ///< int a_i
  double entropy = 0.0;             ///< sum_i int a_i ln a_i
  double abs_entropy = 0.0;         ///< sum_i int a_i |ln a_i|
  double moment = 0.0;              ///< sum_i int a_i |x|
  double fisher = 0.0;              ///< sum_i int |grad sqrt(a_i)|^2
  double dissipation = 0.0;         ///< int D(a)
  std::optional<double> weak_norm;  ///< filled by the weak-norm module when N = 3
  double clipped_mass = 0.0;        ///< cumulative

  /// Per-species Fisher terms (not serialized; used by the entropy identity).
  std::vector<double> fisher_i;

  double total_mass() const;
  /// sum_i int a_i (1 + |x| + |ln a_i|)
  double weighted_mass() const { return total_mass() + moment + abs_entropy; }
};

DiagnosticsRecord record(const SpeciesField& field, const ReactionModel& model,
                         double clipped_mass = 0.0);

/// Keys: t, mass_i, entropy, abs_entropy, moment, fisher, dissipation,
/// weak_norm (null when absent), clipped_mass.
nlohmann::json to_json(const DiagnosticsRecord& r);
std::string to_ndjson_line(const DiagnosticsRecord& r);
/// CSV with the same columns; mass_i is expanded to mass_1..mass_P.
std::string csv_header(int species);
std::string csv_row(const DiagnosticsRecord& r);

struct M0Report {
  double m0 = 0.0;
  /// int a_i (1 + |x| + |ln a_i|) per species.
  std::vector<double> weighted_mass_i;
  std::vector<double> sup_i;
  int argmax_species = -1;
};

/// M0 = sup_i { int a_i (1 + |x| + |ln a_i|) + ||a_i||_inf }.
M0Report m0(const SpeciesField& initial);

struct BudgetConstants {
  double c0 = 0.0;
  double c1 = 0.0;
};

struct BudgetReport {
  std::vector<double> times;
  /// sup_{s<=t} weighted_mass + 2 d_lo int_0^t fisher + int_0^t dissipation.
  std::vector<double> lhs;
  double m0 = 0.0;
  BudgetConstants fitted;
  /// d_hi^2 / (2 d_lo): the scale of the growth constant in the estimate.
  double c1_reference = 0.0;
  /// max_t [lhs(t) - (c0 + c1 t)(m0 + 1)] for the constants in use.
  double worst_slack = 0.0;
  bool holds = false;
  bool c1_within_10x = false;
  bool pass() const { return holds && c1_within_10x; }
};

/// Left-hand side of the budget along a record stream (trapezoid in time).
std::vector<double> budget_lhs(const std::vector<DiagnosticsRecord>& records,
                               const DiffusionSpec& diffusion);

/// Smallest constants with lhs_s(t) <= (c0 + c1 t)(m0_s + 1) for every
/// stream s: c0 from the initial values, then c1 from the remaining slack.
BudgetConstants fit_budget_constants(const std::vector<std::vector<DiagnosticsRecord>>& streams,
                                     const DiffusionSpec& diffusion,
                                     const std::vector<double>& m0_values);

/// Requires >= 2 records. Fits constants from this stream alone unless
/// `constants` is given.
BudgetReport budget_check(const std::vector<DiagnosticsRecord>& records,
                          const DiffusionSpec& diffusion, double m0_value,
                          std::optional<BudgetConstants> constants = std::nullopt);

struct EntropyIdentityReport {
  /// entropy(T) - entropy(0)
  double entropy_change = 0.0;
  /// -int_0^T (4 sum_i D_i fisher_i + dissipation) dt by trapezoid.
  double predicted_change = 0.0;
  double relative_error = 0.0;
};

/// d/dt sum_i int a_i ln a_i = -4 sum_i D_i int |grad sqrt(a_i)|^2 - int D(a).
EntropyIdentityReport entropy_identity_check(const std::vector<DiagnosticsRecord>& records,
                                             const DiffusionSpec& diffusion);

struct EntropyTrend {
  /// Largest (E_{k+1} - E_k) / max(|E_k|, mass) over consecutive records.
  double max_relative_increase = 0.0;
  std::size_t worst_index = 0;
};
EntropyTrend entropy_monotonicity(const std::vector<DiagnosticsRecord>& records);

}  // namespace rdlab
