#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

namespace hbndiff {

/// In-place 2D complex FFT of size n×n on caller-owned buffers.
/// Plans are created once per instance with FFTW_ESTIMATE (no runtime tuning,
/// same plan every run) and FFTW_UNALIGNED so any std::complex buffer works.
/// Transforms execute serially; planner access is globally locked.
class Fft2D {
 public:
  explicit Fft2D(int n) : n_(n) {
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n) * n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft_2d(n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }

  ~Fft2D() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  int size() const { return n_; }

  /// Unnormalized forward transform, in place.
  void forward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(fwd_, p, p);
  }

  /// Inverse transform, in place, normalized by 1/n².
  void inverse(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(bwd_, p, p);
    double scale = 1.0 / (static_cast<double>(n_) * n_);
    std::size_t total = static_cast<std::size_t>(n_) * n_;
    for (std::size_t i = 0; i < total; ++i) data[i] *= scale;
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  int n_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace hbndiff
