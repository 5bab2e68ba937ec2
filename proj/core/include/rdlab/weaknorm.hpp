/// @file weaknorm.hpp
/// @brief Free-space Newtonian potentials and the dual weak norm.
///
/// The reported weak norm of a nonnegative f in three dimensions is the
/// potential maximum sup_x (Gamma * f)(x), Gamma(x) = 1 / (4 pi |x|). It
/// bounds the dual norm
///   ||f||_dual = sup { <f, psi> : psi smooth, compactly supported, ||Delta psi||_1 <= 1 }
/// from above: psi = -Gamma * Delta psi gives <f, psi> = -<Gamma * f, Delta psi>.
/// Since int Delta psi = 0 for compactly supported psi, -Delta psi splits into
/// positive and negative parts of mass 1/2 each, and pairing a mollified point
/// mass at the maximum with one far away shows the dual norm is exactly half
/// the potential maximum (kDualNormFactor). Every identity and monotonicity
/// check is homogeneous in this factor; the local L^1 control uses the dual norm.
/// The potential is a zero-padded (2n per axis) FFT convolution, so periodic
/// images never interact.

#pragma once

#include <memory>
#include <vector>

#include "rdlab/grid.hpp"
#include "rdlab/report.hpp"

namespace rdlab {

enum class BoundaryPolicy {
  strict,  ///< throw when the source leaks more than kBoundaryMassLimit into the edge cells
  report,  ///< compute anyway and report the leakage
};

inline constexpr double kBoundaryMassLimit = 1e-6;
/// dual norm = kDualNormFactor * potential maximum, for nonnegative sources.
inline constexpr double kDualNormFactor = 0.5;

/// Caches the transformed kernel for one grid. Not copyable.
class NewtonianSolver {
 public:
  /// Throws std::invalid_argument unless grid.dim() == 3.
  explicit NewtonianSolver(const GridSpec& grid);
  ~NewtonianSolver();
  NewtonianSolver(const NewtonianSolver&) = delete;
  NewtonianSolver& operator=(const NewtonianSolver&) = delete;

  const GridSpec& grid() const;
  /// Cell-averaged source in, potential at cell centers out.
  ScalarField potential(std::span<const double> f);

  /// Radius of the ball with the volume of one cell.
  static double self_cell_radius(double h);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct PotentialField {
  GridSpec grid;
  ScalarField values;
  double boundary_mass = 0.0;
};

/// Throws std::invalid_argument for N != 3, negative sources, or (strict
/// policy) boundary mass above kBoundaryMassLimit.
PotentialField newtonian_potential(const GridSpec& grid, std::span<const double> f,
                                   BoundaryPolicy policy = BoundaryPolicy::strict);

struct WeakNormReport {
  double t = 0.0;
  double norm = 0.0;
  Point argmax{0.0, 0.0, 0.0};
  double boundary_mass = 0.0;
};

WeakNormReport weak_norm(const GridSpec& grid, std::span<const double> f,
                         BoundaryPolicy policy = BoundaryPolicy::strict);
/// Same, reusing a solver's cached kernel.
WeakNormReport weak_norm(NewtonianSolver& solver, std::span<const double> f,
                         BoundaryPolicy policy = BoundaryPolicy::strict);

struct WeakNormSeries {
  std::vector<WeakNormReport> reports;
  /// max over consecutive snapshots of (norm_{k+1} - norm_k) / norm_k.
  double max_relative_increase = 0.0;
  double boundary_mass_max = 0.0;
};

/// Weak norm of rho = sum_i a_i at every snapshot (boundary leakage reported).
WeakNormSeries monotonicity_check(const SpaceTimeSlab& slab);

/// ||f||_{L^1(B(c, r))} <= C(K) ||f||_dual with C(K) = ||Delta zeta||_1 for the
/// quintic cutoff equal to 1 on B(c, r) and 0 outside B(c, 2r).
PropertyReport l1_control_check(const GridSpec& grid, std::span<const double> f,
                                const Point& center, double radius);

/// weak_norm(f) / (||f||_1 + ||f||_inf). Splitting the kernel at |x| = 1
/// bounds this by 1/2 for every nonnegative f.
double potential_bound_ratio(const GridSpec& grid, std::span<const double> f);

/// Exponent q with 1/p = 1 - 2/(q N). Throws unless 1 < p < N/(N-2).
double interpolation_exponent(double p, int dim);

struct InterpolationTerms {
  double q = 0.0;
  std::vector<double> lhs;        ///< ||a_i||_{L^q(t0-3, t0; L^p(B(x0, 3)))}
  std::vector<double> gradient;   ///< ||grad sqrt(a_i)||_{L^2((t0-3, t0) x box)}
  double weak_sup = 0.0;          ///< sup_t ||rho(t)||_w
  std::vector<double> implied;    ///< lhs / (gradient^{2(p-1)/p} weak_sup^{1/p})
  double max_implied = 0.0;
};
InterpolationTerms interpolation_terms(const SpaceTimeSlab& slab, double p, const Point& center,
                                       double t_anchor);

/// One constant for an amplitude family: pass when every member's implied
/// constant is within `spread` times that of the reference member.
PropertyReport interpolation_bound(const std::vector<InterpolationTerms>& family,
                                   std::size_t reference, double spread = 10.0);

}  // namespace rdlab
