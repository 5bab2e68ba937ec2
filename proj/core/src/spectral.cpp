#include "spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rdlab::detail {

RealFft::RealFft(int dim, int n) : dim_(dim), n_(n) {
  real_size_ = 1;
  for (int d = 0; d < dim; ++d) real_size_ *= static_cast<std::size_t>(n);
  spectrum_size_ = real_size_ / static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
  real_ = fftw_alloc_real(real_size_);
  spectrum_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(spectrum_size_));
  if (real_ == nullptr || spectrum_ == nullptr) throw std::bad_alloc();
  std::vector<int> dims(static_cast<std::size_t>(dim), n);
  auto* c = reinterpret_cast<fftw_complex*>(spectrum_);
  fwd_ = fftw_plan_dft_r2c(dim, dims.data(), real_, c, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_c2r(dim, dims.data(), c, real_, FFTW_ESTIMATE);
  if (fwd_ == nullptr || bwd_ == nullptr) throw std::runtime_error("FFTW planning failed");
}

RealFft::~RealFft() {
  fftw_destroy_plan(fwd_);
  fftw_destroy_plan(bwd_);
  fftw_free(real_);
  fftw_free(spectrum_);
}

void RealFft::forward(std::span<const double> in) {
  if (in.size() != real_size_) throw std::invalid_argument("fft: size mismatch");
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(fwd_);
}

void RealFft::backward(std::span<double> out) {
  if (out.size() != real_size_) throw std::invalid_argument("fft: size mismatch");
  fftw_execute(bwd_);
  const double scale = 1.0 / static_cast<double>(real_size_);
  for (std::size_t i = 0; i < real_size_; ++i) out[i] = real_[i] * scale;
}

std::vector<double> RealFft::mode_index_squared() const {
  std::vector<double> m2(spectrum_size_);
  const int half = n_ / 2 + 1;
  for (std::size_t idx = 0; idx < spectrum_size_; ++idx) {
    std::size_t rest = idx;
    const int last = static_cast<int>(rest % static_cast<std::size_t>(half));
    rest /= static_cast<std::size_t>(half);
    double s = static_cast<double>(last) * last;
    for (int d = 0; d < dim_ - 1; ++d) {
      int j = static_cast<int>(rest % static_cast<std::size_t>(n_));
      rest /= static_cast<std::size_t>(n_);
      if (j > n_ / 2) j -= n_;
      s += static_cast<double>(j) * j;
    }
    m2[idx] = s;
  }
  return m2;
}

SpectralOperator::SpectralOperator(const GridSpec& grid)
    : grid_(grid), fft_(grid.dim(), grid.n()) {
  const double w = 2.0 * std::numbers::pi / grid.length();
  k2_ = fft_.mode_index_squared();
  for (auto& v : k2_) v *= w * w;
  minus_k2_.resize(k2_.size());
  for (std::size_t i = 0; i < k2_.size(); ++i) minus_k2_[i] = -k2_[i];
}

void SpectralOperator::heat(std::span<double> u, double c) {
  if (c == 0.0) return;
  auto it = heat_cache_.find(c);
  if (it == heat_cache_.end()) {
    std::vector<double> f(k2_.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-c * k2_[i]);
    it = heat_cache_.emplace(c, std::move(f)).first;
  }
  apply(u, u, it->second);
}

void SpectralOperator::apply(std::span<const double> u, std::span<double> out,
                             const std::vector<double>& mult) {
  if (mult.size() != k2_.size()) throw std::invalid_argument("spectral: multiplier size mismatch");
  fft_.forward(u);
  auto* s = fft_.spectrum();
  for (std::size_t i = 0; i < mult.size(); ++i) s[i] *= mult[i];
  fft_.backward(out);
}

void SpectralOperator::laplacian(std::span<const double> u, std::span<double> out) {
  apply(u, out, minus_k2_);
}

}  // namespace rdlab::detail
