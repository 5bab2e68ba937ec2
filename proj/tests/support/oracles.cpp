#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

using rdlab::GridSpec;
using rdlab::Point;

namespace {

double min_image(double d, double len) {
  d = std::fmod(d, len);
  if (d > 0.5 * len) d -= len;
  if (d < -0.5 * len) d += len;
  return d;
}

// Node coordinate of index j on axis d.
double node(const GridSpec& g, int j) { return -0.5 * g.length() + j * (g.length() / g.n()); }

}  // namespace

double brute_force_Un(const rdlab::SpaceTimeSlab& slab, const rdlab::Anchor& anchor, int n) {
  const double k = 1.0 - std::pow(0.5, n);
  const double tn = 1.0 + std::pow(0.5, n);
  const GridSpec& g = slab.snapshots.front().grid;
  const int N = g.dim();
  const int m = g.n();
  const double h = g.length() / m;
  double vol = 1.0;
  for (int d = 0; d < N; ++d) vol *= h;
  const double lo = anchor.t - tn;
  const double hi = anchor.t;

  std::vector<double> ts, grads;
  double sup = 0.0;
  for (const auto& snap : slab.snapshots) {
    double phi_sum = 0.0, grad_sum = 0.0;
    const int nx = m, ny = N > 1 ? m : 1, nz = N > 2 ? m : 1;
    for (const auto& a : snap.species) {
      for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
          for (int l = 0; l < nz; ++l) {
            double r2 = 0.0;
            const int idx3[3] = {i, j, l};
            for (int d = 0; d < N; ++d) {
              const double dd = min_image(node(g, idx3[d]) - anchor.x[d], g.length());
              r2 += dd * dd;
            }
            if (!(std::sqrt(r2) < tn)) continue;
            auto at = [&](int ii, int jj, int ll) {
              ii = (ii + m) % m;
              jj = N > 1 ? (jj + m) % m : 0;
              ll = N > 2 ? (ll + m) % m : 0;
              std::size_t flat = static_cast<std::size_t>(ii);
              if (N > 1) flat = flat * m + jj;
              if (N > 2) flat = flat * m + ll;
              return a[flat];
            };
            const double v = at(i, j, l);
            if (!(v > k)) continue;
            const double u = v - k;
            phi_sum += (1.0 + u) * std::log(1.0 + u) - u;
            double g2 = 0.0;
            const double gx = (at(i + 1, j, l) - at(i - 1, j, l)) / (2 * h);
            g2 += gx * gx;
            if (N > 1) {
              const double gy = (at(i, j + 1, l) - at(i, j - 1, l)) / (2 * h);
              g2 += gy * gy;
            }
            if (N > 2) {
              const double gz = (at(i, j, l + 1) - at(i, j, l - 1)) / (2 * h);
              g2 += gz * gz;
            }
            grad_sum += g2 / (4.0 * (1.0 + u));
          }
        }
      }
    }
    if (snap.time >= lo - 1e-9 && snap.time <= hi + 1e-9) sup = std::max(sup, phi_sum * vol);
    ts.push_back(snap.time);
    grads.push_back(grad_sum * vol);
  }
  // Trapezoid of the piecewise-linear interpolant restricted to [lo, hi].
  double integral = 0.0;
  for (std::size_t q = 0; q + 1 < ts.size(); ++q) {
    const double a = std::max(ts[q], lo);
    const double b = std::min(ts[q + 1], hi);
    if (!(b > a)) continue;
    const double span = ts[q + 1] - ts[q];
    auto interp = [&](double t) { return grads[q] + (grads[q + 1] - grads[q]) * (t - ts[q]) / span; };
    integral += 0.5 * (interp(a) + interp(b)) * (b - a);
  }
  return sup + integral;
}

double ball_potential(double r, double R) {
  if (r < R) return (3.0 * R * R - r * r) / 6.0;
  return R * R * R / (3.0 * r);
}

double unit_mass_ball_potential(double r, double s) {
  const double vol = 4.0 / 3.0 * std::numbers::pi * s * s * s;
  return ball_potential(r, s) / vol;
}

double dual_norm_lower_bound(const GridSpec& grid, const std::vector<double>& f, const Point& y,
                             double r, double R) {
  double pairing = 0.0;
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    if (f[c] == 0.0) continue;
    const double dist = grid.periodic_distance(grid.position(c), y);
    const double psi = unit_mass_ball_potential(dist, r) - unit_mass_ball_potential(dist, R);
    pairing += f[c] * psi;
  }
  pairing *= grid.cell_volume();
  return pairing / (2.0 * (1.0 - std::pow(r / R, 3)));
}

double Gen::log_uniform(double lo, double hi) {
  return std::exp(uniform(std::log(lo), std::log(hi)));
}

std::vector<double> Gen::bumps(const GridSpec& grid, int count, double spread, double w_lo,
                               double w_hi, double amp_hi, bool spikes) {
  std::vector<double> f(grid.cells(), 0.0);
  for (int b = 0; b < count; ++b) {
    Point c{0.0, 0.0, 0.0};
    for (int d = 0; d < grid.dim(); ++d) c[d] = uniform(-spread, spread);
    const double w = uniform(w_lo, w_hi);
    const double a = uniform(0.0, amp_hi);
    for (std::size_t q = 0; q < grid.cells(); ++q) {
      const double r = grid.periodic_distance(grid.position(q), c);
      f[q] += a * std::exp(-r * r / (2 * w * w));
    }
  }
  if (spikes && uniform(0.0, 1.0) < 0.5) {
    for (int s = 0; s < 5; ++s) {
      f[static_cast<std::size_t>(integer(0, static_cast<int>(grid.cells()) - 1))] +=
          uniform(0.0, amp_hi);
    }
  }
  return f;
}

std::vector<double> Gen::noise(const GridSpec& grid, double hi) {
  std::vector<double> f(grid.cells());
  for (double& v : f) v = uniform(0.0, hi);
  return f;
}

rdlab::SpaceTimeSlab random_slab(const GridSpec& grid, int species, int count, double t0,
                                 double dt, std::uint64_t seed, double amp_hi) {
  Gen gen(seed);
  std::vector<std::vector<double>> first, last;
  for (int i = 0; i < species; ++i) {
    first.push_back(gen.bumps(grid, 2, 0.5, 0.3, 0.6, amp_hi));
    last.push_back(gen.bumps(grid, 2, 0.5, 0.3, 0.6, amp_hi));
  }
  rdlab::SpaceTimeSlab slab;
  for (int k = 0; k < count; ++k) {
    const double th = count > 1 ? static_cast<double>(k) / (count - 1) : 0.0;
    rdlab::SpeciesField f(grid, species, t0 + k * dt);
    for (int i = 0; i < species; ++i) {
      for (std::size_t c = 0; c < grid.cells(); ++c) {
        f.species[i][c] = (1.0 - th) * first[i][c] + th * last[i][c];
      }
    }
    slab.snapshots.push_back(std::move(f));
  }
  return slab;
}

}  // namespace oracle
