#include "rdlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rdlab {

GridSpec::GridSpec(int dim, int n, double length) : dim_(dim), n_(n), length_(length) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("grid: n must be even and >= 4");
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("grid: box length must be positive");
  }
  cells_ = 1;
  for (int d = 0; d < dim; ++d) cells_ *= static_cast<std::size_t>(n);
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim_); }

std::array<int, 3> GridSpec::unflatten(std::size_t idx) const {
  std::array<int, 3> ijk{0, 0, 0};
  for (int d = dim_ - 1; d >= 0; --d) {
    ijk[d] = static_cast<int>(idx % static_cast<std::size_t>(n_));
    idx /= static_cast<std::size_t>(n_);
  }
  return ijk;
}

std::size_t GridSpec::flatten(const std::array<int, 3>& ijk) const {
  std::size_t idx = 0;
  for (int d = 0; d < dim_; ++d) idx = idx * n_ + static_cast<std::size_t>(ijk[d]);
  return idx;
}

Point GridSpec::position(std::size_t idx) const {
  const auto ijk = unflatten(idx);
  Point x{0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) x[d] = coord(ijk[d]);
  return x;
}

double GridSpec::periodic_distance(const Point& x, const Point& y) const {
  double s = 0.0;
  for (int d = 0; d < dim_; ++d) {
    double dx = x[d] - y[d];
    dx -= length_ * std::round(dx / length_);
    s += dx * dx;
  }
  return std::sqrt(s);
}

SpeciesField::SpeciesField(const GridSpec& g, int count, double t)
    : grid(g), species(static_cast<std::size_t>(count), ScalarField(g.cells(), 0.0)), time(t) {}

ScalarField SpeciesField::total() const {
  ScalarField rho(grid.cells(), 0.0);
  for (const auto& a : species) {
    for (std::size_t c = 0; c < rho.size(); ++c) rho[c] += a[c];
  }
  return rho;
}

std::vector<double> SpeciesField::maxima() const {
  std::vector<double> m;
  m.reserve(species.size());
  for (const auto& a : species) m.push_back(*std::max_element(a.begin(), a.end()));
  return m;
}

bool SpeciesField::all_finite() const {
  for (const auto& a : species) {
    for (double x : a) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

void SpaceTimeSlab::validate() const {
  if (snapshots.empty()) throw std::invalid_argument("slab: no snapshots");
  for (std::size_t k = 1; k < snapshots.size(); ++k) {
    if (!(snapshots[k].time > snapshots[k - 1].time)) {
      throw std::invalid_argument("slab: snapshot times must strictly increase");
    }
    if (!(snapshots[k].grid == snapshots[0].grid)) {
      throw std::invalid_argument("slab: snapshots on different grids");
    }
    if (snapshots[k].count() != snapshots[0].count()) {
      throw std::invalid_argument("slab: species count changes between snapshots");
    }
  }
}

std::vector<double> SpaceTimeSlab::times() const {
  std::vector<double> t;
  t.reserve(snapshots.size());
  for (const auto& s : snapshots) t.push_back(s.time);
  return t;
}

double integrate(const GridSpec& grid, std::span<const double> f) {
  if (f.size() != grid.cells()) throw std::invalid_argument("integrate: shape mismatch");
  double s = 0.0;
  for (double x : f) s += x;
  return s * grid.cell_volume();
}

double integrate(const GridSpec& grid, std::span<const double> f, std::span<const double> w) {
  if (f.size() != grid.cells() || w.size() != grid.cells()) {
    throw std::invalid_argument("integrate: shape mismatch");
  }
  double s = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) s += f[c] * w[c];
  return s * grid.cell_volume();
}

namespace {

// Visits every cell with the flat offsets of its +/- neighbours along each axis.
template <class Fn>
void for_each_stencil(const GridSpec& grid, Fn&& fn) {
  const int n = grid.n();
  const int dim = grid.dim();
  std::array<std::size_t, 3> stride{1, 1, 1};
  for (int d = dim - 2; d >= 0; --d) stride[d] = stride[d + 1] * n;
  std::array<std::size_t, 3> up{}, down{};
  for (std::size_t idx = 0; idx < grid.cells(); ++idx) {
    const auto ijk = grid.unflatten(idx);
    for (int d = 0; d < dim; ++d) {
      const std::size_t base = idx - static_cast<std::size_t>(ijk[d]) * stride[d];
      up[d] = base + static_cast<std::size_t>((ijk[d] + 1) % n) * stride[d];
      down[d] = base + static_cast<std::size_t>((ijk[d] + n - 1) % n) * stride[d];
    }
    fn(idx, up, down);
  }
}

}  // namespace

ScalarField squared_gradient(const GridSpec& grid, std::span<const double> u) {
  if (u.size() != grid.cells()) throw std::invalid_argument("gradient: shape mismatch");
  ScalarField g(grid.cells(), 0.0);
  const double inv2h = 1.0 / (2.0 * grid.spacing());
  const int dim = grid.dim();
  for_each_stencil(grid, [&](std::size_t idx, const auto& up, const auto& down) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double du = (u[up[d]] - u[down[d]]) * inv2h;
      s += du * du;
    }
    g[idx] = s;
  });
  return g;
}

ScalarField grad_sqrt_density(const GridSpec& grid, std::span<const double> a) {
  ScalarField r(a.size());
  for (std::size_t c = 0; c < a.size(); ++c) r[c] = std::sqrt(std::max(a[c], 0.0));
  return squared_gradient(grid, r);
}

ScalarField discrete_laplacian(const GridSpec& grid, std::span<const double> u) {
  if (u.size() != grid.cells()) throw std::invalid_argument("laplacian: shape mismatch");
  ScalarField l(grid.cells(), 0.0);
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  const int dim = grid.dim();
  for_each_stencil(grid, [&](std::size_t idx, const auto& up, const auto& down) {
    double s = -2.0 * dim * u[idx];
    for (int d = 0; d < dim; ++d) s += u[up[d]] + u[down[d]];
    l[idx] = s * inv_h2;
  });
  return l;
}

ScalarField ball_mask(const GridSpec& grid, const Point& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball_mask: radius must be positive");
  if (radius > 0.5 * grid.length()) {
    throw std::invalid_argument("ball_mask: radius " + std::to_string(radius) +
                                " exceeds half the box");
  }
  ScalarField m(grid.cells(), 0.0);
  for (std::size_t idx = 0; idx < grid.cells(); ++idx) {
    if (grid.periodic_distance(grid.position(idx), center) < radius) m[idx] = 1.0;
  }
  return m;
}

double boundary_mass_fraction(const GridSpec& grid, std::span<const double> f) {
  if (f.size() != grid.cells()) throw std::invalid_argument("boundary mass: shape mismatch");
  double edge = 0.0, total = 0.0;
  const int last = grid.n() - 1;
  for (std::size_t idx = 0; idx < grid.cells(); ++idx) {
    const double v = std::abs(f[idx]);
    total += v;
    const auto ijk = grid.unflatten(idx);
    for (int d = 0; d < grid.dim(); ++d) {
      if (ijk[d] == 0 || ijk[d] == last) {
        edge += v;
        break;
      }
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

ScalarField lerp(std::span<const double> a, std::span<const double> b, double theta) {
  if (a.size() != b.size()) throw std::invalid_argument("lerp: shape mismatch");
  ScalarField r(a.size());
  for (std::size_t c = 0; c < a.size(); ++c) r[c] = (1.0 - theta) * a[c] + theta * b[c];
  return r;
}

double integrate_piecewise_linear(std::span<const double> times, std::span<const double> values,
                                  double t0, double t1) {
  if (times.size() != values.size() || times.empty()) {
    throw std::invalid_argument("time integral: sample mismatch");
  }
  constexpr double kSlack = 1e-12;
  if (t0 < times.front() - kSlack || t1 > times.back() + kSlack) {
    throw std::invalid_argument("time integral: window not covered by samples");
  }
  if (t1 <= t0) return 0.0;
  auto value_at = [&](double t) {
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times.begin());
    const double th = (t - times[k - 1]) / (times[k] - times[k - 1]);
    return (1.0 - th) * values[k - 1] + th * values[k];
  };
  double acc = 0.0;
  double prev_t = t0;
  double prev_v = value_at(t0);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] <= t0 || times[k] >= t1) continue;
    acc += 0.5 * (prev_v + values[k]) * (times[k] - prev_t);
    prev_t = times[k];
    prev_v = values[k];
  }
  acc += 0.5 * (prev_v + value_at(t1)) * (t1 - prev_t);
  return acc;
}

}  // namespace rdlab
