#include "rdlab/cutoff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rdlab {

RadialCutoff::RadialCutoff(double inner, double outer) : r_in(inner), r_out(outer) {
  if (!(inner >= 0.0 && outer > inner)) {
    throw std::invalid_argument("cutoff: need 0 <= r_in < r_out");
  }
}

double RadialCutoff::value(double r) const {
  if (r <= r_in) return 1.0;
  if (r >= r_out) return 0.0;
  const double u = (r - r_in) / (r_out - r_in);
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double RadialCutoff::first(double r) const {
  if (r <= r_in || r >= r_out) return 0.0;
  const double w = r_out - r_in;
  const double u = (r - r_in) / w;
  return -30.0 * u * u * (1.0 - u) * (1.0 - u) / w;
}

double RadialCutoff::second(double r) const {
  if (r <= r_in || r >= r_out) return 0.0;
  const double w = r_out - r_in;
  const double u = (r - r_in) / w;
  return -60.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / (w * w);
}

double RadialCutoff::laplacian(double r, int dim) const {
  if (r <= 0.0) return 0.0;
  return second(r) + (dim - 1) / r * first(r);
}

double RadialCutoff::hessian_sup(int scan) const {
  // Along a coordinate axis the Hessian is diag(zeta'', zeta'/r, ...), and
  // off-axis entries are convex combinations of these two.
  double best = 0.0;
  for (int k = 0; k <= scan; ++k) {
    const double r = r_in + (r_out - r_in) * k / scan;
    best = std::max(best, std::abs(second(r)));
    if (r > 0.0) best = std::max(best, std::abs(first(r)) / r);
  }
  return best;
}

double RadialCutoff::laplacian_l1(int dim) const {
  static constexpr std::array<double, 5> x = {0.0, -0.5384693101056831, 0.5384693101056831,
                                              -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> w = {0.5688888888888889, 0.4786286704993665,
                                              0.4786286704993665, 0.2369268850561891,
                                              0.2369268850561891};
  // Surface measure of the unit sphere in R^dim.
  const double sphere = dim == 1 ? 2.0 : dim == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  constexpr int kPanels = 4000;
  const double hw = 0.5 * (r_out - r_in) / kPanels;
  double acc = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double mid = r_in + (2 * p + 1) * hw;
    for (std::size_t q = 0; q < x.size(); ++q) {
      const double r = mid + hw * x[q];
      acc += w[q] * hw * std::abs(laplacian(r, dim)) * std::pow(r, dim - 1);
    }
  }
  return sphere * acc;
}

}  // namespace rdlab
