#include "rdlab/weaknorm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rdlab/cutoff.hpp"
#include "spectral.hpp"

namespace rdlab {

struct NewtonianSolver::Impl {
  GridSpec grid;
  detail::RealFft fft;
  std::vector<std::complex<double>> kernel_hat;
  ScalarField padded;

  explicit Impl(const GridSpec& g) : grid(g), fft(3, 2 * g.n()) {}
};

double NewtonianSolver::self_cell_radius(double h) {
  return h * std::cbrt(3.0 / (4.0 * std::numbers::pi));
}

NewtonianSolver::NewtonianSolver(const GridSpec& grid) {
  if (grid.dim() != 3) {
    throw std::invalid_argument("Newtonian potential: only N = 3 is supported (got N = " +
                                std::to_string(grid.dim()) + ")");
  }
  impl_ = std::make_unique<Impl>(grid);
  const int n = grid.n();
  const int m = 2 * n;
  const double h = grid.spacing();
  const std::size_t total = static_cast<std::size_t>(m) * m * m;
  ScalarField kernel(total);
  const double c = h * h / (4.0 * std::numbers::pi);
  for (int i = 0; i < m; ++i) {
    const int si = i < n ? i : i - m;
    for (int j = 0; j < m; ++j) {
      const int sj = j < n ? j : j - m;
      for (int k = 0; k < m; ++k) {
        const int sk = k < n ? k : k - m;
        const double r = std::sqrt(static_cast<double>(si * si + sj * sj + sk * sk));
        kernel[(static_cast<std::size_t>(i) * m + j) * m + k] = r > 0.0 ? c / r : 0.0;
      }
    }
  }
  // Self cell: potential at the center of a unit-density ball of one cell's volume.
  const double rad = self_cell_radius(h);
  kernel[0] = 0.5 * rad * rad;
  impl_->fft.forward(kernel);
  impl_->kernel_hat.assign(impl_->fft.spectrum(),
                           impl_->fft.spectrum() + impl_->fft.spectrum_size());
  impl_->padded.assign(total, 0.0);
}

NewtonianSolver::~NewtonianSolver() = default;

const GridSpec& NewtonianSolver::grid() const { return impl_->grid; }

ScalarField NewtonianSolver::potential(std::span<const double> f) {
  const auto& g = impl_->grid;
  if (f.size() != g.cells()) throw std::invalid_argument("Newtonian potential: shape mismatch");
  const std::size_t n = static_cast<std::size_t>(g.n());
  const std::size_t m = 2 * n;
  auto& pad = impl_->padded;
  std::fill(pad.begin(), pad.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::copy_n(f.data() + (i * n + j) * n, n, pad.data() + (i * m + j) * m);
    }
  }
  impl_->fft.forward(pad);
  auto* s = impl_->fft.spectrum();
  for (std::size_t k = 0; k < impl_->kernel_hat.size(); ++k) s[k] *= impl_->kernel_hat[k];
  impl_->fft.backward(pad);
  ScalarField out(g.cells());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::copy_n(pad.data() + (i * m + j) * m, n, out.data() + (i * n + j) * n);
    }
  }
  return out;
}

namespace {

double checked_boundary_mass(const GridSpec& grid, std::span<const double> f,
                             BoundaryPolicy policy) {
  for (double v : f) {
    if (v < 0.0) throw std::invalid_argument("Newtonian potential: source must be nonnegative");
  }
  const double b = boundary_mass_fraction(grid, f);
  if (policy == BoundaryPolicy::strict && b > kBoundaryMassLimit) {
    std::ostringstream os;
    os << "Newtonian potential: boundary mass fraction " << b << " exceeds "
       << kBoundaryMassLimit;
    throw std::invalid_argument(os.str());
  }
  return b;
}

}  // namespace

PotentialField newtonian_potential(const GridSpec& grid, std::span<const double> f,
                                   BoundaryPolicy policy) {
  NewtonianSolver solver(grid);
  PotentialField p;
  p.grid = grid;
  p.boundary_mass = checked_boundary_mass(grid, f, policy);
  p.values = solver.potential(f);
  return p;
}

WeakNormReport weak_norm(NewtonianSolver& solver, std::span<const double> f,
                         BoundaryPolicy policy) {
  const auto& g = solver.grid();
  WeakNormReport r;
  r.boundary_mass = checked_boundary_mass(g, f, policy);
  const auto u = solver.potential(f);
  const auto it = std::max_element(u.begin(), u.end());
  r.norm = std::max(*it, 0.0);
  r.argmax = g.position(static_cast<std::size_t>(it - u.begin()));
  return r;
}

WeakNormReport weak_norm(const GridSpec& grid, std::span<const double> f, BoundaryPolicy policy) {
  NewtonianSolver solver(grid);
  return weak_norm(solver, f, policy);
}

WeakNormSeries monotonicity_check(const SpaceTimeSlab& slab) {
  slab.validate();
  NewtonianSolver solver(slab.grid());
  WeakNormSeries series;
  for (const auto& snap : slab.snapshots) {
    const auto rho = snap.total();
    auto r = weak_norm(solver, rho, BoundaryPolicy::report);
    r.t = snap.time;
    series.boundary_mass_max = std::max(series.boundary_mass_max, r.boundary_mass);
    if (!series.reports.empty() && series.reports.back().norm > 0.0) {
      const double prev = series.reports.back().norm;
      series.max_relative_increase =
          std::max(series.max_relative_increase, (r.norm - prev) / prev);
    }
    series.reports.push_back(r);
  }
  return series;
}

PropertyReport l1_control_check(const GridSpec& grid, std::span<const double> f,
                                const Point& center, double radius) {
  if (2.0 * radius > 0.5 * grid.length()) {
    throw std::invalid_argument("l1_control_check: the doubled ball exceeds the box");
  }
  const RadialCutoff bump(radius, 2.0 * radius);
  const double c_k = bump.laplacian_l1(grid.dim());
  const auto mask = ball_mask(grid, center, radius);
  const double lhs = integrate(grid, f, mask);
  ScalarField zeta(grid.cells());
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    zeta[c] = bump.value(grid.periodic_distance(grid.position(c), center));
  }
  const double pairing = integrate(grid, f, zeta);
  const double w = weak_norm(grid, f, BoundaryPolicy::report).norm;
  const double dual = kDualNormFactor * w;
  PropertyReport rep;
  rep.name = "local_l1_control";
  rep.samples = 1;
  const double rhs = c_k * dual;
  if (lhs > rhs) {
    rep.violations = 1;
    rep.worst = rhs > 0.0 ? lhs / rhs - 1.0 : HUGE_VAL;
  }
  rep.pass = rep.violations == 0;
  rep.details = {{"lhs", lhs}, {"rhs", rhs}, {"c_k", c_k}, {"weak_norm", w}, {"dual_norm", dual},
                 {"pairing", pairing}};
  return rep;
}

double potential_bound_ratio(const GridSpec& grid, std::span<const double> f) {
  const double l1 = integrate(grid, f);
  const double linf = f.empty() ? 0.0 : *std::max_element(f.begin(), f.end());
  const double denom = l1 + linf;
  if (denom <= 0.0) return 0.0;
  return weak_norm(grid, f, BoundaryPolicy::report).norm / denom;
}

double interpolation_exponent(double p, int dim) {
  const double upper = dim > 2 ? static_cast<double>(dim) / (dim - 2) : HUGE_VAL;
  if (!(p > 1.0 && p < upper)) {
    std::ostringstream os;
    os << "interpolation exponent: p = " << p << " outside (1, " << upper << ")";
    throw std::invalid_argument(os.str());
  }
  return 2.0 * p / (dim * (p - 1.0));
}

InterpolationTerms interpolation_terms(const SpaceTimeSlab& slab, double p, const Point& center,
                                       double t_anchor) {
  slab.validate();
  const auto& g = slab.grid();
  InterpolationTerms t;
  t.q = interpolation_exponent(p, g.dim());
  constexpr double kSlack = 1e-9;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < slab.size(); ++k) {
    const double s = slab.snapshots[k].time;
    if (s >= t_anchor - 3.0 - kSlack && s <= t_anchor + kSlack) idx.push_back(k);
  }
  if (idx.size() < 2 || std::abs(slab.snapshots[idx.front()].time - (t_anchor - 3.0)) > kSlack ||
      std::abs(slab.snapshots[idx.back()].time - t_anchor) > kSlack) {
    throw std::invalid_argument("interpolation: snapshots must be stored at t0 - 3 and t0");
  }
  const auto mask = ball_mask(g, center, 3.0);
  NewtonianSolver solver(g);
  const std::size_t count = static_cast<std::size_t>(slab.snapshots.front().count());
  std::vector<std::vector<double>> lq(count), gr(count);
  std::vector<double> times;
  for (std::size_t k : idx) {
    const auto& snap = slab.snapshots[k];
    times.push_back(snap.time);
    t.weak_sup = std::max(t.weak_sup, weak_norm(solver, snap.total(), BoundaryPolicy::report).norm);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& a = snap.species[i];
      double s = 0.0;
      for (std::size_t c = 0; c < g.cells(); ++c) {
        if (mask[c] != 0.0 && a[c] > 0.0) s += std::pow(a[c], p);
      }
      lq[i].push_back(std::pow(s * g.cell_volume(), t.q / p));
      gr[i].push_back(integrate(g, grad_sqrt_density(g, a)));
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double lhs =
        std::pow(integrate_piecewise_linear(times, lq[i], times.front(), times.back()), 1.0 / t.q);
    const double grad =
        std::sqrt(integrate_piecewise_linear(times, gr[i], times.front(), times.back()));
    const double rhs = std::pow(grad, 2.0 * (p - 1.0) / p) * std::pow(t.weak_sup, 1.0 / p);
    t.lhs.push_back(lhs);
    t.gradient.push_back(grad);
    t.implied.push_back(rhs > 0.0 ? lhs / rhs : 0.0);
    t.max_implied = std::max(t.max_implied, t.implied.back());
  }
  return t;
}

PropertyReport interpolation_bound(const std::vector<InterpolationTerms>& family,
                                   std::size_t reference, double spread) {
  if (reference >= family.size()) throw std::invalid_argument("interpolation: bad reference");
  PropertyReport rep;
  rep.name = "interpolation_bound";
  double c = 0.0;
  nlohmann::json implied = nlohmann::json::array();
  for (const auto& t : family) {
    ++rep.samples;
    c = std::max(c, t.max_implied);
    implied.push_back(t.max_implied);
    if (!std::isfinite(t.max_implied)) ++rep.violations;
  }
  const double ref = family[reference].max_implied;
  const bool stable = ref > 0.0 ? c <= spread * ref : c == 0.0;
  if (!stable) rep.worst = c / (spread * ref) - 1.0;
  rep.pass = rep.violations == 0 && stable;
  rep.details = {{"constant", c}, {"reference", ref}, {"implied", implied},
                 {"q", family.front().q}, {"spread", spread}};
  return rep;
}

}  // namespace rdlab
