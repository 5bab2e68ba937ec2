/// @file spectral.hpp
/// @brief Thin FFTW wrapper for real periodic fields (library-internal).

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "rdlab/grid.hpp"

struct fftw_plan_s;

namespace rdlab::detail {

/// Real-to-complex transform of an n^dim array. Plans use FFTW_ESTIMATE so
/// results do not depend on run-time measurements.
class RealFft {
 public:
  RealFft(int dim, int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t real_size() const { return real_size_; }
  std::size_t spectrum_size() const { return spectrum_size_; }

  /// Copies `in` into the work array and transforms it.
  void forward(std::span<const double> in);
  /// Inverse-transforms the spectrum into `out`, dividing by n^dim.
  void backward(std::span<double> out);
  std::complex<double>* spectrum() { return spectrum_; }

  /// Sum of squared signed mode indices for every spectrum entry.
  std::vector<double> mode_index_squared() const;

 private:
  int dim_;
  int n_;
  std::size_t real_size_;
  std::size_t spectrum_size_;
  double* real_ = nullptr;
  std::complex<double>* spectrum_ = nullptr;
  fftw_plan_s* fwd_ = nullptr;
  fftw_plan_s* bwd_ = nullptr;
};

/// Applies exp(-c |k|^2) and other radial Fourier multipliers on one grid.
class SpectralOperator {
 public:
  explicit SpectralOperator(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  /// |k|^2 with k = 2 pi m / L for every spectrum entry.
  const std::vector<double>& k_squared() const { return k2_; }

  /// u <- exp(-c |k|^2) u. Multipliers are cached per distinct c.
  void heat(std::span<double> u, double c);
  /// out <- multiplier(|k|^2) applied to u.
  void apply(std::span<const double> u, std::span<double> out, const std::vector<double>& mult);
  /// Spectral Laplacian.
  void laplacian(std::span<const double> u, std::span<double> out);

 private:
  GridSpec grid_;
  RealFft fft_;
  std::vector<double> k2_;
  std::vector<double> minus_k2_;
  std::map<double, std::vector<double>> heat_cache_;
};

}  // namespace rdlab::detail
