#include "rdlab/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rdlab/solver.hpp"
#include "rdlab/weaknorm.hpp"

namespace rdlab {

double amplitude_exponent(double nu) {
  if (!(nu > 1.0 && nu < 2.0)) throw std::invalid_argument("scaling: nu must lie in (1, 2)");
  return 2.0 / (nu - 1.0);
}

namespace {

void require_dyadic(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("scaling: eps must lie in (0, 1]");
  }
  int e = 0;
  const double m = std::frexp(eps, &e);
  if (m != 0.5) {
    std::ostringstream os;
    os << "scaling: eps = " << eps << " is not grid-aligned (must be 2^-j)";
    throw std::invalid_argument(os.str());
  }
}

std::array<int, 3> node_offset(const GridSpec& g, const Point& x) {
  std::array<int, 3> o{0, 0, 0};
  for (int d = 0; d < g.dim(); ++d) {
    const double u = x[d] / g.spacing();
    const double j = std::round(u);
    if (std::abs(u - j) > 1e-9) {
      throw std::invalid_argument("scaling: anchor coordinate " + std::to_string(x[d]) +
                                  " is not a grid node");
    }
    o[d] = static_cast<int>(((static_cast<long>(j) % g.n()) + g.n()) % g.n());
  }
  return o;
}

}  // namespace

SpeciesField rescale_snapshot(const SpeciesField& field, const ScalingParams& params) {
  require_dyadic(params.eps);
  const double c = amplitude_exponent(params.nu);
  const auto& g = field.grid;
  const auto off = node_offset(g, params.anchor.x);
  const GridSpec g2(g.dim(), g.n(), g.length() / params.eps);
  const double amp = std::pow(params.eps, c);
  SpeciesField out(g2, field.count(), (field.time - params.anchor.t) / (params.eps * params.eps));
  for (std::size_t idx = 0; idx < g.cells(); ++idx) {
    auto ijk = g.unflatten(idx);
    for (int d = 0; d < g.dim(); ++d) ijk[d] = (ijk[d] + off[d]) % g.n();
    const std::size_t src = g.flatten(ijk);
    for (std::size_t i = 0; i < field.species.size(); ++i) {
      out.species[i][idx] = amp * field.species[i][src];
    }
  }
  return out;
}

SpaceTimeSlab rescale_field(const SpaceTimeSlab& slab, const ScalingParams& params) {
  slab.validate();
  require_dyadic(params.eps);
  const double e2 = params.eps * params.eps;
  constexpr double kSlack = 1e-9;
  SpaceTimeSlab out;
  for (const auto& snap : slab.snapshots) {
    const double s = (snap.time - params.anchor.t) / e2;
    if (params.window && (s < params.window->first - kSlack || s > params.window->second + kSlack)) {
      continue;
    }
    out.snapshots.push_back(rescale_snapshot(snap, params));
  }
  if (params.window) {
    if (out.empty() || out.t_begin() > params.window->first + kSlack ||
        out.t_end() < params.window->second - kSlack) {
      std::ostringstream os;
      os << "scaling: pre-image of window [" << params.window->first << ", "
         << params.window->second << "] is not covered by the slab";
      throw std::invalid_argument(os.str());
    }
  }
  if (out.empty()) throw std::invalid_argument("scaling: no snapshots selected");
  return out;
}

ReactionModel rescale_reaction(const ReactionModel& model, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("rescale_reaction: eps must be positive");
  const double c = amplitude_exponent(model.nu);
  const double inner = std::pow(eps, -c);
  const double outer = std::pow(eps, model.nu * c);
  ReactionModel m = model;
  m.lambda_domain = model.lambda_domain / inner;
  auto base = model.rate;
  const std::size_t p = static_cast<std::size_t>(model.species);
  m.rate = [base, inner, outer, p](std::span<const double> a, std::span<double> q) {
    double b[16];
    std::vector<double> big;
    double* buf = b;
    if (p > 16) {
      big.resize(p);
      buf = big.data();
    }
    for (std::size_t i = 0; i < p; ++i) buf[i] = inner * a[i];
    base(std::span<const double>(buf, p), q);
    for (std::size_t i = 0; i < p; ++i) q[i] *= outer;
  };
  if (model.jacobian) {
    auto base_jac = model.jacobian;
    m.jacobian = [base_jac, inner, outer, p](std::span<const double> a, std::span<double> jac) {
      std::vector<double> buf(p);
      for (std::size_t i = 0; i < p; ++i) buf[i] = inner * a[i];
      base_jac(buf, jac);
      for (double& v : jac) v *= outer * inner;
    };
  }
  return m;
}

namespace {

double gradient_energy(const SpaceTimeSlab& slab) {
  std::vector<double> times, vals;
  const auto& g = slab.grid();
  for (const auto& snap : slab.snapshots) {
    double s = 0.0;
    for (const auto& a : snap.species) s += integrate(g, grad_sqrt_density(g, a));
    times.push_back(snap.time);
    vals.push_back(s);
  }
  if (times.size() < 2) return 0.0;
  return integrate_piecewise_linear(times, vals, times.front(), times.back());
}

double weak_sup(const SpaceTimeSlab& slab) {
  NewtonianSolver solver(slab.grid());
  double m = 0.0;
  for (const auto& snap : slab.snapshots) {
    m = std::max(m, weak_norm(solver, snap.total(), BoundaryPolicy::report).norm);
  }
  return m;
}

double rel(double a, double b) { return b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a); }

}  // namespace

ScalingIdentityReport scaling_identity_check(const SpaceTimeSlab& slab,
                                             const ScalingParams& params, double tol) {
  const auto scaled = rescale_field(slab, params);
  ScalingParams inverse_window = params;
  inverse_window.window.reset();
  // The original window is the pre-image of the rescaled one.
  SpaceTimeSlab original;
  const double e2 = params.eps * params.eps;
  for (const auto& snap : slab.snapshots) {
    const double s = (snap.time - params.anchor.t) / e2;
    if (s >= scaled.t_begin() - 1e-9 && s <= scaled.t_end() + 1e-9) {
      original.snapshots.push_back(snap);
    }
  }
  const double c = amplitude_exponent(params.nu);
  const int dim = slab.grid().dim();
  ScalingIdentityReport r;
  r.grad_expected = std::pow(params.eps, c - dim);
  const double g0 = gradient_energy(original);
  r.grad_ratio = g0 > 0.0 ? gradient_energy(scaled) / g0 : 0.0;
  r.grad_error = rel(r.grad_ratio, r.grad_expected);
  bool ok = r.grad_error <= tol;
  if (dim == 3) {
    r.weak_expected = std::pow(params.eps, c - 2.0);
    const double w0 = weak_sup(original);
    r.weak_ratio = w0 > 0.0 ? weak_sup(scaled) / w0 : 0.0;
    r.weak_error = rel(r.weak_ratio, r.weak_expected);
    ok = ok && r.weak_error <= tol;
  }
  r.pass = ok;
  return r;
}

PropertyReport conjugacy_check(const ReactionModel& model, const DiffusionSpec& diffusion,
                               const SpeciesField& initial, double eps, double ds, int n_steps,
                               double tol) {
  require_dyadic(eps);
  ScalingParams params;
  params.eps = eps;
  params.nu = model.nu;
  params.anchor.t = initial.time;
  SpeciesField original = initial;
  SpeciesField scaled = rescale_snapshot(initial, params);
  Stepper a(model, diffusion, original.grid, {eps * eps * ds, 1});
  Stepper b(rescale_reaction(model, eps), diffusion, scaled.grid, {ds, 1});
  for (int k = 0; k < n_steps; ++k) {
    a.step(original);
    b.step(scaled);
  }
  const double back = std::pow(eps, -amplitude_exponent(model.nu));
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < original.species.size(); ++i) {
    for (std::size_t c = 0; c < original.grid.cells(); ++c) {
      diff = std::max(diff, std::abs(back * scaled.species[i][c] - original.species[i][c]));
      scale = std::max(scale, std::abs(original.species[i][c]));
    }
  }
  PropertyReport rep;
  rep.name = "solution_conjugacy";
  rep.samples = original.grid.cells() * original.species.size();
  rep.worst = scale > 0.0 ? diff / scale : diff;
  rep.violations = rep.worst > tol ? 1 : 0;
  rep.pass = rep.violations == 0;
  rep.details = {{"max_abs_difference", diff}, {"eps", eps}, {"steps", n_steps}};
  return rep;
}

double scaling_alpha(double p, double nu, int dim) {
  const double c = amplitude_exponent(nu);
  return (p - 1.0) / p * (c - 2.0) + (c - dim) / p;
}

ScalingReport epsilon0_pipeline(double m0, double t0, double delta_star, double p_bar, double nu,
                                int dim, double c_m0_t0, int species) {
  if (!(m0 > 0.0 && t0 > 0.0 && delta_star > 0.0 && c_m0_t0 > 0.0 && species > 0)) {
    throw std::invalid_argument("epsilon0_pipeline: inputs must be positive");
  }
  ScalingReport r;
  const double c = amplitude_exponent(nu);
  r.p_bar = p_bar;
  r.q_bar = interpolation_exponent(p_bar, dim);
  r.exponent_weak = c - 2.0;
  r.exponent_grad = c - dim;
  r.alpha_bar = scaling_alpha(p_bar, nu, dim);
  if (!(r.alpha_bar > 0.0)) {
    std::ostringstream os;
    os << "epsilon0_pipeline: alpha(" << p_bar << ") = " << r.alpha_bar
       << " is not positive for nu = " << nu << ", N = " << dim;
    throw std::invalid_argument(os.str());
  }
  r.eps0 = std::min(std::sqrt(t0 / 6.0), std::pow(delta_star / c_m0_t0, 1.0 / r.alpha_bar));
  r.sup_bound = species * std::pow(r.eps0, -c);
  return r;
}

}  // namespace rdlab
