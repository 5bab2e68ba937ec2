/// @file maxp.hpp
/// @brief Two-species systems Q_1 = Q, Q_2 = -Q and the sup-norm monitor.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rdlab/grid.hpp"
#include "rdlab/model.hpp"
#include "rdlab/report.hpp"
#include "rdlab/solver.hpp"

namespace rdlab {

struct TwoSpeciesModel {
  std::string family;
  std::function<double(double a1, double a2)> rate;
  double nu = 1.0;
  double lambda = 0.0;
  /// (dQ/da1, dQ/da2); optional.
  std::function<std::array<double, 2>(double a1, double a2)> gradient;

  ReactionModel as_reaction() const;
};

/// Q = a2 - a1 (linear exchange).
TwoSpeciesModel two_species_linear();
/// Q = a1 - a2: violates the sign condition.
TwoSpeciesModel two_species_wrong_sign();

/// Q(a1, a2) (a1 - a2) <= 1e-12 on log-uniform, diagonal and axis samples.
PropertyReport sign_condition_check(const TwoSpeciesModel& model, std::size_t n_samples,
                                    std::uint64_t seed);

struct SupSample {
  double t = 0.0;
  std::vector<double> sup;  ///< per species
  double sup_total = 0.0;   ///< sup of rho
};

struct MaxReport {
  std::vector<SupSample> samples;
  double initial_sup = 0.0;
  double max_sup = 0.0;
  double max_relative_growth = 0.0;  ///< max_t sup(t) / sup(0) - 1
  double max_total_growth = 0.0;     ///< same for rho
  bool pass = false;                 ///< max_relative_growth <= tol
};

/// Runs the system and records per-species sups at every stored time.
MaxReport maxprinciple_run(const ReactionModel& model, const DiffusionSpec& diffusion,
                           const SpeciesField& initial, const RunSettings& settings,
                           double tol = 1e-8);

}  // namespace rdlab
