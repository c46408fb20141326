#include "spotvol/fbm.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

#include "spotvol/errors.hpp"

namespace spotvol {

namespace {

std::mutex fftw_plan_mutex;  // fftw planning is not thread safe

// fGn autocovariance at lag k for unit-variance increments.
double fgn_cov(std::int64_t k, double hurst) {
  const double a = static_cast<double>(std::abs(k));
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(a + 1.0, h2) - 2.0 * std::pow(a, h2) +
                std::pow(std::abs(a - 1.0), h2));
}

}  // namespace

std::vector<double> fbm_path(std::size_t steps, double hurst, Rng& rng) {
  if (steps == 0) throw Error("fbm_path: need steps >= 1");
  if (!(hurst > 0.0 && hurst < 1.0)) {
    throw Error("fbm_path: Hurst index must lie in (0,1)");
  }
  const std::size_t n = steps;
  const std::size_t m = 2 * n;
  // circulant first row of the embedded covariance
  std::vector<std::complex<double>> row(m);
  for (std::size_t k = 0; k <= n; ++k) {
    row[k] = fgn_cov(static_cast<std::int64_t>(k), hurst);
  }
  for (std::size_t k = n + 1; k < m; ++k) {
    row[k] = row[m - k];
  }
  std::vector<std::complex<double>> eig(m), noise(m), out(m);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_plan p = fftw_plan_dft_1d(
        static_cast<int>(m), reinterpret_cast<fftw_complex*>(row.data()),
        reinterpret_cast<fftw_complex*>(eig.data()), FFTW_FORWARD,
        FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t k = 0; k < m; ++k) {
    double ev = eig[k].real();
    if (ev < 0.0) {
      if (ev < -1e-8 * static_cast<double>(m)) {
        throw Error("fbm_path: circulant embedding not nonnegative definite");
      }
      ev = 0.0;
    }
    const double re = gauss(rng);
    const double im = gauss(rng);
    noise[k] = std::sqrt(ev / static_cast<double>(m)) *
               std::complex<double>(re, im);
  }
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex);
    fftw_plan p = fftw_plan_dft_1d(
        static_cast<int>(m), reinterpret_cast<fftw_complex*>(noise.data()),
        reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
        FFTW_ESTIMATE);
    fftw_execute(p);
    fftw_destroy_plan(p);
  }
  // first n real parts are a stationary fGn sample; scale increments to the
  // grid step and accumulate
  const double scale = std::pow(1.0 / static_cast<double>(n), hurst);
  std::vector<double> path(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    path[k + 1] = path[k] + scale * out[k].real();
  }
  return path;
}

}  // namespace spotvol
