#include "curvflow/fourier.hpp"

#include <fftw3.h>

#include <mutex>

#include "curvflow/errors.hpp"

namespace curvflow {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

RealFft::RealFft(int n) : n_(n) {
  if (n < 2) throw DomainError("FFT length must be at least 2");
  std::vector<double> real(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(spectrum_size()));
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_r2c_1d(n, real.data(), as_fftw(spec.data()), flags);
  inverse_plan_ = fftw_plan_dft_c2r_1d(n, as_fftw(spec.data()), real.data(), flags | FFTW_DESTROY_INPUT);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                       as_fftw(out.data()));
}

void RealFft::inverse(std::span<std::complex<double>> in, std::span<double> out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), as_fftw(in.data()), out.data());
  const double scale = 1.0 / n_;
  for (double& v : out) v *= scale;
}

void RealFft::derivatives(std::span<const double> in, std::span<double> d1, std::span<double> d2) const {
  const auto ns = static_cast<std::size_t>(spectrum_size());
  std::vector<std::complex<double>> spec(ns);
  std::vector<std::complex<double>> work(ns);
  forward(in, spec);
  const bool even = n_ % 2 == 0;
  if (!d1.empty()) {
    for (std::size_t m = 0; m < ns; ++m) work[m] = spec[m] * std::complex<double>(0.0, static_cast<double>(m));
    if (even) work[ns - 1] = 0.0;
    inverse(work, d1);
  }
  if (!d2.empty()) {
    for (std::size_t m = 0; m < ns; ++m) work[m] = spec[m] * -static_cast<double>(m * m);
    inverse(work, d2);
  }
}

void RealFft::truncate(std::span<double> values, int cutoff) const {
  if (cutoff >= spectrum_size() - 1) return;
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(spectrum_size()));
  forward(values, spec);
  for (int m = std::max(cutoff + 1, 0); m < spectrum_size(); ++m) spec[static_cast<std::size_t>(m)] = 0.0;
  inverse(spec, values);
}

}  // namespace curvflow
