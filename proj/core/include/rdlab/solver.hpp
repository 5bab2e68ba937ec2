/// @file solver.hpp
/// @brief Strang-split time integration, effective diffusivity and the
/// backward dual solve.
///
/// Diffusion is the exact periodic heat semigroup applied in Fourier space.
/// Reaction is advanced cell by cell with classical RK4. One step is
/// D(dt/2) R(dt) D(dt/2); inside run() consecutive half steps are merged
/// except where a snapshot or observation is taken.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdlab/grid.hpp"
#include "rdlab/model.hpp"

namespace rdlab {

namespace detail {
class SpectralOperator;
}

/// Failure of the numerical scheme itself (stability guard, NaN/Inf, solver
/// non-convergence). `reason` is a stable machine-readable tag.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string reason, const std::string& what)
      : std::runtime_error(what), reason_(std::move(reason)) {}
  const std::string& reason() const { return reason_; }
  /// Last finite state before the failure, when available.
  std::shared_ptr<const SpeciesField> last_good;

 private:
  std::string reason_;
};

struct StepperConfig {
  double dt = 0.0;
  int reaction_substeps = 1;
};

/// Cumulative mass added by clipping negative values to zero, per species.
struct ClipLog {
  std::vector<double> clipped_mass;
  double total() const;
};

/// Stateful stepper bound to one grid; owns the FFT plans and factor cache.
class Stepper {
 public:
  Stepper(ReactionModel model, DiffusionSpec diffusion, const GridSpec& grid, StepperConfig cfg);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  const ReactionModel& model() const { return model_; }
  const DiffusionSpec& diffusion() const { return diffusion_; }
  const StepperConfig& config() const { return cfg_; }
  const ClipLog& clip_log() const { return clip_; }

  /// Exact heat flow of every species over `dt`, then clipping.
  void diffuse(SpeciesField& field, double dt);
  /// RK4 on every cell with `reaction_substeps` substeps, then clipping.
  /// Throws NumericalError("reaction_stability") when
  /// rate_jacobian_norm(running max state) * substep > 0.5.
  void react(SpeciesField& field, double dt);
  /// One full Strang step of size config().dt.
  void step(SpeciesField& field);

 private:
  void clip(SpeciesField& field);

  ReactionModel model_;
  DiffusionSpec diffusion_;
  GridSpec grid_;
  StepperConfig cfg_;
  ClipLog clip_;
  std::unique_ptr<detail::SpectralOperator> spectral_;
};

/// Convenience wrappers for single operations (no clipping log kept).
SpeciesField diffusion_step(const SpeciesField& field, const DiffusionSpec& diffusion, double dt);
SpeciesField reaction_step(const ReactionModel& model, const SpeciesField& field, double dt,
                           int substeps = 1);
SpeciesField step(const ReactionModel& model, const DiffusionSpec& diffusion,
                  const SpeciesField& field, double dt);

struct RunSettings {
  double dt = 0.0;
  double t_end = 0.0;
  double dt_store = 0.0;
  int reaction_substeps = 1;
  /// Observation cadence in time units (0 disables). Must be a multiple of dt.
  double dt_observe = 0.0;
  bool keep_snapshots = true;
};

using FieldCallback = std::function<void(const SpeciesField&)>;
/// Store callback that also sees the clipping log accumulated so far.
using StoreCallback = std::function<void(const SpeciesField&, const ClipLog&)>;

struct RunResult {
  SpaceTimeSlab slab;
  ClipLog clip;
  std::size_t steps = 0;
  /// Largest boundary-layer mass fraction of rho over stored snapshots.
  double boundary_mass_max = 0.0;
  SpeciesField final_state;
};

/// Advances `initial` to t_end. `on_store` fires at t=0, every dt_store and at
/// t_end; `on_observe` fires every dt_observe. Throws std::invalid_argument if
/// dt_store or t_end is not a whole multiple of dt, NumericalError on failure.
RunResult run(const ReactionModel& model, const DiffusionSpec& diffusion,
              const SpeciesField& initial, const RunSettings& settings,
              const FieldCallback& on_store = {}, const FieldCallback& on_observe = {});
RunResult run(const ReactionModel& model, const DiffusionSpec& diffusion,
              const SpeciesField& initial, const RunSettings& settings,
              const StoreCallback& on_store, const FieldCallback& on_observe = {});

/// d_mu = (sum_i D_i a_i + mu d_ref) / (rho + mu), d_ref = (d_lo + d_hi) / 2.
ScalarField effective_diffusivity(const SpeciesField& field, const DiffusionSpec& diffusion,
                                  double mu);

struct TimedField {
  double t = 0.0;
  ScalarField values;
};

struct DualSolveOptions {
  double residual_tol = 1e-10;
  int max_iterations = 500;
};

struct DualSolution {
  /// phi at every time of the diffusivity series, same order.
  std::vector<TimedField> phi;
  int max_iterations_used = 0;
  double max_residual = 0.0;
};

/// Solves d_t phi + d Delta phi = 0 backward from phi(T) = phi_T on the
/// periodic grid. Crank-Nicolson in time, spectral Laplacian in space; each
/// step solves (1/d - tau/2 Delta) phi^n = (1/d) phi^{n+1} + tau/2 Delta phi^{n+1}
/// with d at the step midpoint by preconditioned conjugate gradients, the
/// preconditioner being the same operator with 1/d replaced by its mean.
/// Series spacing must be a whole multiple of tau. Throws NumericalError
/// ("dual_nonconvergence") when the residual target is not reached.
DualSolution dual_backward_solve(const GridSpec& grid, const std::vector<TimedField>& d_series,
                                 const ScalarField& phi_T, double tau,
                                 const DualSolveOptions& options = {});

/// Spectral Laplacian (shared with the dual solve and the pairing audit).
ScalarField spectral_laplacian(const GridSpec& grid, std::span<const double> u);

}  // namespace rdlab
