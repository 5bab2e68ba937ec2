#include "rdlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spectral.hpp"

namespace rdlab {

double ClipLog::total() const {
  double s = 0.0;
  for (double m : clipped_mass) s += m;
  return s;
}

Stepper::Stepper(ReactionModel model, DiffusionSpec diffusion, const GridSpec& grid,
                 StepperConfig cfg)
    : model_(std::move(model)),
      diffusion_(std::move(diffusion)),
      grid_(grid),
      cfg_(cfg),
      spectral_(std::make_unique<detail::SpectralOperator>(grid)) {
  if (static_cast<int>(diffusion_.size()) != model_.species) {
    throw std::invalid_argument("stepper: " + std::to_string(diffusion_.size()) +
                                " diffusion coefficients for " + std::to_string(model_.species) +
                                " species");
  }
  if (!(cfg_.dt > 0.0)) throw std::invalid_argument("stepper: dt must be positive");
  if (cfg_.reaction_substeps < 1) {
    throw std::invalid_argument("stepper: reaction_substeps must be >= 1");
  }
  clip_.clipped_mass.assign(static_cast<std::size_t>(model_.species), 0.0);
}

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

void Stepper::clip(SpeciesField& field) {
  const double vol = grid_.cell_volume();
  for (std::size_t i = 0; i < field.species.size(); ++i) {
    double added = 0.0;
    bool finite = true;
    for (double& x : field.species[i]) {
      if (!(x >= 0.0)) {
        if (std::isnan(x)) {
          finite = false;
          continue;
        }
        added -= x;
        x = 0.0;
      } else if (x > std::numeric_limits<double>::max()) {
        finite = false;
      }
    }
    if (!finite) {
      throw NumericalError("non_finite", "non-finite value in species " + std::to_string(i) +
                                             " at t=" + std::to_string(field.time));
    }
    clip_.clipped_mass[i] += added * vol;
  }
}

void Stepper::diffuse(SpeciesField& field, double dt) {
  if (dt < 0.0) throw std::invalid_argument("diffuse: dt must be nonnegative");
  if (dt == 0.0) return;
  for (std::size_t i = 0; i < field.species.size(); ++i) {
    spectral_->heat(field.species[i], diffusion_[i] * dt);
  }
  clip(field);
}

void Stepper::react(SpeciesField& field, double dt) {
  if (dt == 0.0) return;
  const std::size_t p = field.species.size();
  const double h = dt / cfg_.reaction_substeps;

  const auto peak = field.maxima();
  const double jn = rate_jacobian_norm(model_, peak);
  if (jn * h > 0.5) {
    std::ostringstream os;
    os << "reaction stability bound violated: |dQ/da| * dt = " << jn * h << " > 0.5 at t="
       << field.time;
    throw NumericalError("reaction_stability", os.str());
  }

  std::vector<double> a(p), y(p), k1(p), k2(p), k3(p), k4(p);
  for (std::size_t c = 0; c < grid_.cells(); ++c) {
    for (std::size_t i = 0; i < p; ++i) a[i] = field.species[i][c];
    for (int s = 0; s < cfg_.reaction_substeps; ++s) {
      model_.evaluate(a, k1);
      // A zero rate leaves every RK stage at `a`.
      if (std::all_of(k1.begin(), k1.end(), [](double v) { return v == 0.0; })) break;
      for (std::size_t i = 0; i < p; ++i) y[i] = a[i] + 0.5 * h * k1[i];
      model_.evaluate(y, k2);
      for (std::size_t i = 0; i < p; ++i) y[i] = a[i] + 0.5 * h * k2[i];
      model_.evaluate(y, k3);
      for (std::size_t i = 0; i < p; ++i) y[i] = a[i] + h * k3[i];
      model_.evaluate(y, k4);
      for (std::size_t i = 0; i < p; ++i) {
        a[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
    }
    for (std::size_t i = 0; i < p; ++i) field.species[i][c] = a[i];
  }
  clip(field);
}

void Stepper::step(SpeciesField& field) {
  diffuse(field, 0.5 * cfg_.dt);
  react(field, cfg_.dt);
  diffuse(field, 0.5 * cfg_.dt);
  field.time += cfg_.dt;
}

SpeciesField diffusion_step(const SpeciesField& field, const DiffusionSpec& diffusion, double dt) {
  if (dt < 0.0) throw std::invalid_argument("diffusion_step: dt must be nonnegative");
  SpeciesField out = field;
  if (dt == 0.0) return out;
  Stepper s(zero_reaction(field.count()), diffusion, field.grid, {dt, 1});
  s.diffuse(out, dt);
  out.time += dt;
  return out;
}

SpeciesField reaction_step(const ReactionModel& model, const SpeciesField& field, double dt,
                           int substeps) {
  SpeciesField out = field;
  if (dt == 0.0) return out;
  const DiffusionSpec unit(std::vector<double>(static_cast<std::size_t>(model.species), 1.0));
  Stepper s(model, unit, field.grid, {dt, substeps});
  s.react(out, dt);
  out.time += dt;
  return out;
}

SpeciesField step(const ReactionModel& model, const DiffusionSpec& diffusion,
                  const SpeciesField& field, double dt) {
  SpeciesField out = field;
  Stepper s(model, diffusion, field.grid, {dt, 1});
  s.step(out);
  return out;
}

namespace {

std::size_t whole_multiple(double span, double dt, const char* what) {
  const double r = span / dt;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-9 * std::max(1.0, r)) {
    std::ostringstream os;
    os << what << " (" << span << ") is not a whole multiple of dt (" << dt << ")";
    throw std::invalid_argument(os.str());
  }
  return static_cast<std::size_t>(k);
}

}  // namespace

RunResult run(const ReactionModel& model, const DiffusionSpec& diffusion,
              const SpeciesField& initial, const RunSettings& settings,
              const FieldCallback& on_store, const FieldCallback& on_observe) {
  StoreCallback wrapped;
  if (on_store) wrapped = [&on_store](const SpeciesField& f, const ClipLog&) { on_store(f); };
  return run(model, diffusion, initial, settings, wrapped, on_observe);
}

RunResult run(const ReactionModel& model, const DiffusionSpec& diffusion,
              const SpeciesField& initial, const RunSettings& settings,
              const StoreCallback& on_store, const FieldCallback& on_observe) {
  if (!(settings.dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
  if (settings.t_end < 0.0) throw std::invalid_argument("run: t_end must be nonnegative");
  if (initial.count() != model.species) {
    throw std::invalid_argument("run: initial data has " + std::to_string(initial.count()) +
                                " species, model expects " + std::to_string(model.species));
  }
  const std::size_t n_steps = whole_multiple(settings.t_end, settings.dt, "t_end");
  std::size_t store_every = n_steps == 0 ? 1 : n_steps;
  if (settings.dt_store > 0.0) {
    store_every = whole_multiple(settings.dt_store, settings.dt, "dt_store");
  } else if (n_steps > 0) {
    throw std::invalid_argument("run: dt_store must be positive");
  }
  if (store_every == 0) throw std::invalid_argument("run: dt_store must be at least dt");
  std::size_t observe_every = 0;
  if (settings.dt_observe > 0.0) {
    observe_every = whole_multiple(settings.dt_observe, settings.dt, "dt_observe");
    if (observe_every == 0) throw std::invalid_argument("run: dt_observe must be at least dt");
  }

  Stepper stepper(model, diffusion, initial.grid, {settings.dt, settings.reaction_substeps});
  RunResult result;
  SpeciesField field = initial;
  field.time = 0.0;
  auto last_good = std::make_shared<SpeciesField>(field);

  auto store = [&](const SpeciesField& f) {
    const auto rho = f.total();
    result.boundary_mass_max =
        std::max(result.boundary_mass_max, boundary_mass_fraction(f.grid, rho));
    if (settings.keep_snapshots) result.slab.snapshots.push_back(f);
    if (on_store) on_store(f, stepper.clip_log());
    *last_good = f;
  };

  for (auto& a : field.species) {
    for (double& x : a) {
      if (!std::isfinite(x)) throw std::invalid_argument("run: initial data is not finite");
    }
  }
  store(field);
  if (on_observe && observe_every > 0) on_observe(field);

  bool half_pending = false;
  try {
    for (std::size_t s = 1; s <= n_steps; ++s) {
      stepper.diffuse(field, half_pending ? settings.dt : 0.5 * settings.dt);
      stepper.react(field, settings.dt);
      field.time = static_cast<double>(s) * settings.dt;
      const bool is_store = s % store_every == 0 || s == n_steps;
      const bool is_observe = observe_every > 0 && (s % observe_every == 0 || s == n_steps);
      if (is_store || is_observe) {
        stepper.diffuse(field, 0.5 * settings.dt);
        half_pending = false;
        if (is_observe && on_observe) on_observe(field);
        if (is_store) store(field);
      } else {
        half_pending = true;
      }
      ++result.steps;
    }
  } catch (NumericalError& e) {
    e.last_good = last_good;
    throw;
  }
  result.clip = stepper.clip_log();
  result.final_state = std::move(field);
  return result;
}

ScalarField effective_diffusivity(const SpeciesField& field, const DiffusionSpec& diffusion,
                                  double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("effective_diffusivity: mu must be positive");
  if (diffusion.size() != field.species.size()) {
    throw std::invalid_argument("effective_diffusivity: species count mismatch");
  }
  const double d_ref = 0.5 * (diffusion.d_lo() + diffusion.d_hi());
  const std::size_t cells = field.grid.cells();
  ScalarField num(cells, mu * d_ref), den(cells, mu);
  for (std::size_t i = 0; i < field.species.size(); ++i) {
    const auto& a = field.species[i];
    for (std::size_t c = 0; c < cells; ++c) {
      num[c] += diffusion[i] * a[c];
      den[c] += a[c];
    }
  }
  for (std::size_t c = 0; c < cells; ++c) {
    num[c] = std::clamp(num[c] / den[c], diffusion.d_lo(), diffusion.d_hi());
  }
  return num;
}

ScalarField spectral_laplacian(const GridSpec& grid, std::span<const double> u) {
  detail::SpectralOperator op(grid);
  ScalarField out(u.size());
  op.laplacian(u, out);
  return out;
}

namespace {

double dot(const ScalarField& x, const ScalarField& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

}  // namespace

DualSolution dual_backward_solve(const GridSpec& grid, const std::vector<TimedField>& d_series,
                                 const ScalarField& phi_T, double tau,
                                 const DualSolveOptions& options) {
  if (d_series.size() < 2) throw std::invalid_argument("dual: need at least two diffusivity fields");
  if (!(tau > 0.0)) throw std::invalid_argument("dual: tau must be positive");
  if (phi_T.size() != grid.cells()) throw std::invalid_argument("dual: phi_T shape mismatch");
  for (std::size_t k = 0; k < d_series.size(); ++k) {
    if (d_series[k].values.size() != grid.cells()) {
      throw std::invalid_argument("dual: diffusivity field shape mismatch");
    }
    if (k > 0 && !(d_series[k].t > d_series[k - 1].t)) {
      throw std::invalid_argument("dual: diffusivity times must increase");
    }
  }

  detail::SpectralOperator op(grid);
  const auto& k2 = op.k_squared();
  const std::size_t cells = grid.cells();
  const double half = 0.5 * tau;

  DualSolution sol;
  sol.phi.resize(d_series.size());
  ScalarField phi = phi_T;
  sol.phi.back() = {d_series.back().t, phi};

  ScalarField inv_d(cells), lap(cells), b(cells), x(cells), r(cells), z(cells), p(cells), ap(cells);
  std::vector<double> precond(k2.size());

  for (std::size_t k = d_series.size() - 1; k > 0; --k) {
    const double t_hi = d_series[k].t;
    const double t_lo = d_series[k - 1].t;
    const std::size_t m = whole_multiple(t_hi - t_lo, tau, "dual series spacing");
    for (std::size_t j = 0; j < m; ++j) {
      const double t_mid = t_hi - (static_cast<double>(j) + 0.5) * tau;
      const double theta = (t_mid - t_lo) / (t_hi - t_lo);
      double mean_inv = 0.0;
      for (std::size_t c = 0; c < cells; ++c) {
        const double d = (1.0 - theta) * d_series[k - 1].values[c] + theta * d_series[k].values[c];
        inv_d[c] = 1.0 / d;
        mean_inv += inv_d[c];
      }
      mean_inv /= static_cast<double>(cells);
      for (std::size_t i = 0; i < k2.size(); ++i) precond[i] = 1.0 / (mean_inv + half * k2[i]);

      op.laplacian(phi, lap);
      for (std::size_t c = 0; c < cells; ++c) b[c] = inv_d[c] * phi[c] + half * lap[c];
      const double b_norm = std::sqrt(dot(b, b));

      auto apply_a = [&](const ScalarField& in, ScalarField& out) {
        op.laplacian(in, out);
        for (std::size_t c = 0; c < cells; ++c) out[c] = inv_d[c] * in[c] - half * out[c];
      };

      x = phi;
      apply_a(x, ap);
      for (std::size_t c = 0; c < cells; ++c) r[c] = b[c] - ap[c];
      double res = std::sqrt(dot(r, r));
      int it = 0;
      if (b_norm > 0.0 && res > options.residual_tol * b_norm) {
        op.apply(r, z, precond);
        p = z;
        double rz = dot(r, z);
        for (it = 1; it <= options.max_iterations; ++it) {
          apply_a(p, ap);
          const double alpha = rz / dot(p, ap);
          for (std::size_t c = 0; c < cells; ++c) {
            x[c] += alpha * p[c];
            r[c] -= alpha * ap[c];
          }
          res = std::sqrt(dot(r, r));
          if (res <= options.residual_tol * b_norm) break;
          op.apply(r, z, precond);
          const double rz_new = dot(r, z);
          const double beta = rz_new / rz;
          rz = rz_new;
          for (std::size_t c = 0; c < cells; ++c) p[c] = z[c] + beta * p[c];
        }
        if (it > options.max_iterations) {
          std::ostringstream os;
          os << "dual solve did not converge at t=" << t_mid << ": relative residual "
             << res / b_norm << " after " << options.max_iterations << " iterations";
          throw NumericalError("dual_nonconvergence", os.str());
        }
      }
      sol.max_iterations_used = std::max(sol.max_iterations_used, it);
      if (b_norm > 0.0) sol.max_residual = std::max(sol.max_residual, res / b_norm);
      phi = x;
    }
    sol.phi[k - 1] = {t_lo, phi};
  }
  return sol;
}

}  // namespace rdlab
