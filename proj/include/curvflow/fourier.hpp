#pragma once

#include <complex>
#include <span>
#include <vector>

namespace curvflow {

/// Real-to-complex FFT of a fixed length backed by FFTW.
///
/// Plans are created once (under a process-wide lock) and executed through
/// the new-array interface, so a single instance can be shared by threads.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const noexcept { return n_; }
  int spectrum_size() const noexcept { return n_ / 2 + 1; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// Inverse transform including the 1/n normalisation. `in` is used as scratch.
  void inverse(std::span<std::complex<double>> in, std::span<double> out) const;

  /// Periodic spectral derivatives of samples on [0, 2*pi). Either output may be empty.
  /// The Nyquist mode is dropped from the first derivative.
  void derivatives(std::span<const double> in, std::span<double> d1, std::span<double> d2) const;

  /// Zero every mode above `cutoff` in place.
  void truncate(std::span<double> values, int cutoff) const;

 private:
  int n_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace curvflow
