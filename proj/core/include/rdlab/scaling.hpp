/// @file scaling.hpp
/// @brief Parabolic rescaling a^eps(s, y) = eps^{2/(nu-1)} a(eps^2 s + T, eps y + x0),
/// the conjugated reaction, the norm identities and the eps0 arithmetic.
///
/// Rescaling is a relabelling of the same samples: spacing and box length are
/// divided by eps, values multiplied by eps^{2/(nu-1)}, times mapped to
/// (t - T)/eps^2 and the grid cyclically shifted so that x0 becomes the origin.
/// No interpolation takes place, so the identities hold to rounding.

#pragma once

#include <optional>
#include <utility>

#include "rdlab/degiorgi.hpp"
#include "rdlab/grid.hpp"
#include "rdlab/model.hpp"
#include "rdlab/report.hpp"

namespace rdlab {

struct ScalingParams {
  double eps = 1.0;
  Anchor anchor;
  double nu = 1.5;
  /// Optional rescaled time window [s_lo, s_hi]; all snapshots when absent.
  std::optional<std::pair<double, double>> window;
};

/// 2 / (nu - 1)
double amplitude_exponent(double nu);

/// Throws std::invalid_argument when eps is not 2^-j (j >= 0), x0 is not a
/// grid node, nu is outside (1, 2), or the window's pre-image is not stored.
SpaceTimeSlab rescale_field(const SpaceTimeSlab& slab, const ScalingParams& params);
SpeciesField rescale_snapshot(const SpeciesField& field, const ScalingParams& params);

/// Q^eps(a) = eps^{2 nu/(nu-1)} Q(eps^{-2/(nu-1)} a) with the same nu and Lambda;
/// the validity box of Lambda shrinks by eps^{2/(nu-1)}.
ReactionModel rescale_reaction(const ReactionModel& model, double eps);

struct ScalingIdentityReport {
  double weak_ratio = 0.0;      ///< sup_s ||rho^eps|| / sup_t ||rho||
  double weak_expected = 0.0;   ///< eps^{2/(nu-1) - 2}
  double grad_ratio = 0.0;      ///< int int |grad sqrt(a^eps)|^2 / int int |grad sqrt(a)|^2
  double grad_expected = 0.0;   ///< eps^{2/(nu-1) - N}
  double weak_error = 0.0;      ///< relative
  double grad_error = 0.0;
  bool pass = false;
};

/// Both identities on the whole stored window; pass at relative error <= tol.
ScalingIdentityReport scaling_identity_check(const SpaceTimeSlab& slab,
                                             const ScalingParams& params, double tol = 1e-10);

/// Steps the rescaled system for n_steps of size ds, maps back, and compares
/// against the original system stepped with eps^2 ds.
PropertyReport conjugacy_check(const ReactionModel& model, const DiffusionSpec& diffusion,
                               const SpeciesField& initial, double eps, double ds, int n_steps,
                               double tol = 1e-12);

/// alpha(p) = (p-1)/p (2/(nu-1) - 2) + 1/p (2/(nu-1) - N)
double scaling_alpha(double p, double nu, int dim);

struct ScalingReport {
  double exponent_weak = 0.0;
  double exponent_grad = 0.0;
  double p_bar = 0.0;
  double q_bar = 0.0;
  double alpha_bar = 0.0;
  double eps0 = 0.0;
  /// P eps0^{-2/(nu-1)}
  double sup_bound = 0.0;
};

/// eps0 = min{ sqrt(T0/6), (delta_star / C)^{1/alpha} }. Throws
/// std::invalid_argument when p_bar is outside (1, N/(N-2)), nu outside (1, 2),
/// an input is not positive, or alpha(p_bar) <= 0.
ScalingReport epsilon0_pipeline(double m0, double t0, double delta_star, double p_bar, double nu,
                                int dim, double c_m0_t0, int species);

}  // namespace rdlab
