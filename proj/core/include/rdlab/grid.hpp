/// @file grid.hpp
/// @brief Uniform periodic box, species fields, space-time slabs and the
/// discrete calculus every diagnostic is built on.
///
/// The box is [-L/2, L/2)^N with nodes x_j = -L/2 + j h, h = L/n, so the
/// origin is a node. Arrays are row-major with the last axis fastest.
/// Quadrature is the midpoint rule, derivatives are second-order central
/// differences with periodic wrap.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rdlab {

using Point = std::array<double, 3>;

class GridSpec {
 public:
  GridSpec() = default;
  /// Throws std::invalid_argument unless dim in {1,2,3}, n even and >= 4, length > 0.
  GridSpec(int dim, int n, double length);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / n_; }
  double cell_volume() const;
  std::size_t cells() const { return cells_; }

  double coord(int j) const { return -0.5 * length_ + j * spacing(); }
  /// Multi-index of a flat cell index; unused trailing axes are 0.
  std::array<int, 3> unflatten(std::size_t idx) const;
  std::size_t flatten(const std::array<int, 3>& ijk) const;
  Point position(std::size_t idx) const;
  /// Euclidean distance under the minimum-image convention.
  double periodic_distance(const Point& x, const Point& y) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int dim_ = 0;
  int n_ = 0;
  double length_ = 0.0;
  std::size_t cells_ = 0;
};

using ScalarField = std::vector<double>;

/// P nonnegative concentrations on one grid at one time.
struct SpeciesField {
  GridSpec grid;
  std::vector<ScalarField> species;
  double time = 0.0;

  SpeciesField() = default;
  SpeciesField(const GridSpec& g, int count, double t = 0.0);

  int count() const { return static_cast<int>(species.size()); }
  /// rho = sum_i a_i
  ScalarField total() const;
  /// Per-species maxima.
  std::vector<double> maxima() const;
  bool all_finite() const;
};

/// Time-ordered snapshots on a common grid.
struct SpaceTimeSlab {
  std::vector<SpeciesField> snapshots;

  /// Throws std::invalid_argument unless times strictly increase and grids agree.
  void validate() const;
  bool empty() const { return snapshots.empty(); }
  std::size_t size() const { return snapshots.size(); }
  const GridSpec& grid() const { return snapshots.front().grid; }
  double t_begin() const { return snapshots.front().time; }
  double t_end() const { return snapshots.back().time; }
  std::vector<double> times() const;
};

/// sum over cells of f * h^N (midpoint rule).
double integrate(const GridSpec& grid, std::span<const double> f);
/// sum over cells of f * w * h^N. Throws on size mismatch.
double integrate(const GridSpec& grid, std::span<const double> f, std::span<const double> w);

/// Pointwise |grad u|^2 by central differences.
ScalarField squared_gradient(const GridSpec& grid, std::span<const double> u);
/// Pointwise |grad sqrt(a)|^2: the square root is taken first, then differenced.
ScalarField grad_sqrt_density(const GridSpec& grid, std::span<const double> a);
/// Second-order seven-point (in 3-D) Laplacian.
ScalarField discrete_laplacian(const GridSpec& grid, std::span<const double> u);

/// Indicator of {|x - center| < radius} under periodic distance.
/// Throws std::invalid_argument for radius <= 0 or radius > L/2.
ScalarField ball_mask(const GridSpec& grid, const Point& center, double radius);

/// Fraction of the total mass of f held in the outermost layer of cells.
double boundary_mass_fraction(const GridSpec& grid, std::span<const double> f);

/// Linear interpolation between two scalar snapshots.
ScalarField lerp(std::span<const double> a, std::span<const double> b, double theta);

/// Integral over [t0, t1] of the piecewise-linear interpolant of samples
/// (times[k], values[k]). Requires times to cover [t0, t1].
double integrate_piecewise_linear(std::span<const double> times, std::span<const double> values,
                                  double t0, double t1);

}  // namespace rdlab
