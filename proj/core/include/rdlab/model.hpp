/// @file model.hpp
/// @brief Reaction maps Q, diagonal diffusion and the sampled hypothesis verifier.
///
/// A reaction model couples P species through a rate map Q : R^P -> R^P. The
/// class of systems handled here requires
///   (positivity)   Q_i(a) >= 0 whenever a_i <= 0,
///   (growth)       |grad Q_i(a)| <= Lambda |a|^(nu-1) on the positive orthant,
///   (mass)         sum_i Q_i(a) = 0,
///   (entropy)      sum_i ln(a_i) Q_i(a) <= 0.
/// verify_hypotheses() checks all four on seeded random states.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rdlab {

/// Writes Q(a) into `out`. Both spans have the model's species count.
using RateFunction = std::function<void(std::span<const double> a, std::span<double> out)>;
/// Writes dQ_i/da_j into jac[i * P + j].
using JacobianFunction = std::function<void(std::span<const double> a, std::span<double> jac)>;

/// Floor applied to concentrations inside logarithms only (a ln a -> 0 at a = 0).
inline constexpr double kLogFloor = 1e-300;

struct ReactionModel {
  std::string family;
  int species = 0;
  double nu = 1.0;
  /// Growth constant of the gradient bound.
  double lambda = 0.0;
  /// Per-component state magnitude up to which `lambda` is a valid bound.
  double lambda_domain = 0.0;
  RateFunction rate;
  /// Optional closed-form Jacobian; central differences are used when empty.
  JacobianFunction jacobian;

  /// Throws std::invalid_argument when the span sizes do not match `species`.
  void evaluate(std::span<const double> a, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> a) const;
  /// Row-major P x P Jacobian at `a`.
  void jacobian_at(std::span<const double> a, std::span<double> jac) const;
};

class DiffusionSpec {
 public:
  explicit DiffusionSpec(std::vector<double> coefficients);

  const std::vector<double>& coefficients() const { return coefficients_; }
  std::size_t size() const { return coefficients_.size(); }
  double operator[](std::size_t i) const { return coefficients_[i]; }
  double d_lo() const { return d_lo_; }
  double d_hi() const { return d_hi_; }

 private:
  std::vector<double> coefficients_;
  double d_lo_ = 0.0;
  double d_hi_ = 0.0;
};

/// The smooth nondecreasing profile of the four-species exchange family:
/// 0 for z <= 0, z^(nu/2) for z >= 1, and z^(nu/2) B(z) in between where
/// B(z) = g(z) / (g(z) + g(1 - z)), g(t) = exp(-1/t) for t > 0.
double exchange_phi(double nu, double z);
double exchange_phi_derivative(double nu, double z);
/// sup_z phi'(z), located by a dense scan refined with golden-section search.
double exchange_phi_derivative_max(double nu);

/// Largest per-component state the frozen growth constant must cover: the
/// sampling box [0, 1e3] pulled back through the smallest dyadic rescaling
/// (eps = 1/8) used by the scaling checks.
double exchange_state_cap(double nu);
/// Bound on |grad Q_i| / |a|^(nu-1) over the box [0, cap]^4.
double exchange_lambda(double nu, double cap);

/// Q_i(a) = (-1)^i (phi(a_1 a_3) - phi(a_2 a_4)), i = 1..4, with calibrated lambda.
ReactionModel four_species_exchange(double nu);
ReactionModel zero_reaction(int species);

/// D(a) = -sum_i Q_i(a) ln(a_i), logs floored at kLogFloor.
double entropy_production(const ReactionModel& model, std::span<const double> a);

/// Row-sum norm of the Jacobian dQ/da at `a`.
double rate_jacobian_norm(const ReactionModel& model, std::span<const double> a);

struct HypothesisCheck {
  std::string name;
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// Largest relative violation seen (0 when every sample satisfies the bound).
  double worst = 0.0;
  bool pass() const { return violations == 0; }
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  double lambda = 0.0;
  double lambda_domain = 0.0;
  double tolerance = 0.0;
  /// max over samples of |grad Q_i| / (lambda |a|^(nu-1)).
  double max_growth_quotient = 0.0;
  bool pass() const;
  const HypothesisCheck& check(const std::string& name) const;
};

inline constexpr double kHypothesisTolerance = 1e-9;

/// Samples states with log-uniform magnitudes over [1e-6, 1e3], plus zero and
/// negative components for the boundary checks, and evaluates all four
/// hypotheses. Violations are reported, never thrown.
HypothesisReport verify_hypotheses(const ReactionModel& model, std::size_t n_samples,
                                   std::uint64_t seed);

}  // namespace rdlab
