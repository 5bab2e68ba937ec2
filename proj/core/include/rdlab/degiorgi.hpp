/// @file degiorgi.hpp
/// @brief Level-set truncation energies on shrinking space-time cylinders
/// and the measured constants of the local boundedness argument.
///
/// Levels k_n = 1 - 2^-n and radii/durations t_n = 1 + 2^-n define the balls
/// B_n = B(x0, t_n) and cylinders Q_n = (t0 - t_n, t0) x B_n around an anchor
/// (t0, x0). The energy of step n is
///   U_n = sup_{t in [t0 - t_n, t0]} sum_i int_{B_n} Phi(a_i - k_n)
///       + sum_i int int_{Q_n} |grad Psi(a_i - k_n)|^2.
/// The sup runs over stored snapshots; time integrals use the piecewise-linear
/// interpolant of per-snapshot spatial integrals.

#pragma once

#include <cstdint>
#include <vector>

#include "rdlab/grid.hpp"
#include "rdlab/model.hpp"
#include "rdlab/report.hpp"

namespace rdlab {

/// (1 + z) ln(1 + z) - z for z > 0, else 0.
double phi_level(double z);
/// sqrt(1 + z) - 1 for z > 0, else 0.
double psi_level(double z);

struct Anchor {
  double t = 0.0;
  Point x{0.0, 0.0, 0.0};
};

struct TruncationLadder {
  int n_max = 6;
  Anchor anchor;

  static double level(int n);   ///< k_n
  static double radius(int n);  ///< t_n
  /// sup |d_ij zeta_n| * 2^{-2n} for the quintic cutoff between B_n and B_{n-1}.
  static double cutoff_hessian_scaled(int n);
};

/// Throws std::invalid_argument when the slab does not cover (t0 - t_n, t0)
/// or B_n does not fit in the periodic box.
double compute_Un(const SpaceTimeSlab& slab, const TruncationLadder& ladder, int n);
/// U_0 .. U_{n_max}.
std::vector<double> compute_ladder(const SpaceTimeSlab& slab, const TruncationLadder& ladder);

struct RecursionReport {
  bool vacuous = false;
  /// c_n = U_n / U_{n-1}^{(N+2)/N}, n = 1..; NaN where U_{n-1} = 0.
  std::vector<double> implied_constant;
  /// max over n of c_n^{1/n}.
  double max_root_constant = 0.0;
  /// Least-squares fit of ln U_n = n ln C + beta ln U_{n-1} over positive pairs.
  double exponent = 0.0;
  double log_constant = 0.0;
  int pairs_used = 0;
  /// U_n decreasing and either hitting zero or decaying with exponent > 1.
  bool superlinear_decay = false;
};

/// Requires at least 3 entries. All-zero input is reported as vacuous.
RecursionReport recursion_check(const std::vector<double>& U, int dim);

/// Sum over species of the L^p norm on (t0 - duration, t0) x B(x0, radius).
double cylinder_lp_sum(const SpaceTimeSlab& slab, double p, const Anchor& anchor, double radius,
                       double duration);
/// Per-species L^p norms on the same cylinder.
std::vector<double> cylinder_lp_norms(const SpaceTimeSlab& slab, double p, const Anchor& anchor,
                                      double radius, double duration);

struct LocalBoundReport {
  double norm = 0.0;
  bool triggered = false;
  std::vector<double> center_values;
  bool pass = true;
};

/// Computes sum_i ||a_i||_{L^p((t0-3, t0) x B(x0, 3))}; when it is <= delta
/// the center values a_i(t0, x0) must be <= 1. t0 must be a stored time and
/// x0 a grid node.
LocalBoundReport local_bound_experiment(const SpaceTimeSlab& slab, double p, double delta,
                                        const Anchor& anchor);

/// Q_i(a) against Q_i(1 + [a - R]_+): sum_i |difference| <= 2 P Lambda |1 + [a - R]_+|^(nu-1),
/// sampled with log-uniform magnitudes and R uniform in [0, 1].
PropertyReport rineq_check(const ReactionModel& model, std::size_t n_samples, std::uint64_t seed);

struct LevelConstants {
  /// sup_z Psi(z) / sqrt(Phi(z)).
  double psi_over_sqrt_phi = 0.0;
  /// sup_n 1 / (2^n Psi(2^-n)): the worst case of the indicator bound.
  double indicator = 0.0;
  double c_tilde = 0.0;
};
LevelConstants level_set_constants();

/// Psi(z) <= C sqrt(Phi(z)) and 1{Psi(z - k_n) > 0} <= C 2^n Psi(z - k_{n-1})
/// for n = 1..n_max on sampled z.
PropertyReport level_set_property_check(double c_tilde, std::size_t n_samples, int n_max,
                                        std::uint64_t seed);

struct U0BoundTerms {
  double u0 = 0.0;
  double lp_power_sum = 0.0;  ///< sum_i ||a_i||^p
  double lp_root_sum = 0.0;   ///< sum_i ||a_i||^{1/2}
  double ratio = 0.0;         ///< u0 / (power + root), 0 when both vanish
};
/// U_0 on (t0 - 2, t0) x B(x0, 2) against L^p norms on (t0 - 3, t0) x B(x0, 3).
U0BoundTerms u0_bound_terms(const SpaceTimeSlab& slab, double p, const Anchor& anchor);
/// A single constant covers the family when every ratio is within
/// `spread` times the ratio of the reference member.
PropertyReport u0_bound_check(const std::vector<U0BoundTerms>& family, std::size_t reference,
                              double spread = 10.0);

struct LocalDissipationTerms {
  double lhs = 0.0;           ///< sup entropy at level R on B_n + d_lo * gradient term on Q_n
  double rhs_integral = 0.0;  ///< int int_{Q_{n-1}} (1 + [a - R]_+) ln(1 + [a - R]_+)
  double implied_constant = 0.0;  ///< lhs / (2^{2n} rhs_integral)
};
LocalDissipationTerms local_dissipation_terms(const SpaceTimeSlab& slab, const Anchor& anchor,
                                              int n, double level, double d_lo);

}  // namespace rdlab
