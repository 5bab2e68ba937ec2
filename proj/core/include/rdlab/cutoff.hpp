/// @file cutoff.hpp
/// @brief Radial C^2 cutoff: 1 inside r_in, 0 outside r_out, quintic
/// smoothstep in between.

#pragma once

namespace rdlab {

struct RadialCutoff {
  double r_in = 1.0;
  double r_out = 2.0;

  /// Throws std::invalid_argument unless 0 <= r_in < r_out.
  RadialCutoff(double inner, double outer);

  double value(double r) const;
  double first(double r) const;   ///< d/dr
  double second(double r) const;  ///< d^2/dr^2
  /// Radial Laplacian zeta'' + (N-1)/r zeta' (0 at r = 0).
  double laplacian(double r, int dim) const;
  /// sup over x and i, j of |d_ij zeta| by a dense radial scan.
  double hessian_sup(int scan = 20000) const;
  /// || Delta zeta ||_{L^1(R^N)} by composite Gauss-Legendre quadrature in r.
  double laplacian_l1(int dim) const;
};

}  // namespace rdlab
