#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spotvol/kernel.hpp"
#include "spotvol/observation.hpp"
#include "spotvol/wavelet.hpp"

namespace spotvol {

/// Tuning of the threshold estimator. Zero/negative sentinel fields are
/// resolved from n by resolve_config: m = floor(sqrt(n)),
/// ell0 = floor((1-2 alpha0) log2 m), ell1 = floor(log2 m / (1+2 alpha0)),
/// kappa_tilde from the deviation-bound plug-in.
struct EstimatorConfig {
  std::int64_t m = 0;
  double alpha0 = 0.25;
  int ell0 = -1;
  int ell1 = -1;
  double kappa_tilde = 0.0;
  double q = 0.0;  // deviation hypothesis m 2^{-ell} >= m^q
  bool clip_nonneg = false;
};

EstimatorConfig resolve_config(EstimatorConfig cfg, std::int64_t n);

struct VolatilityEstimate {
  std::vector<double> grid;
  std::vector<double> values;
  CoefficientSet coefficients;
  EstimatorConfig config;  // resolved
  std::int64_t n = 0;
  double noise_var_hat = 0.0;
  double cbar_pilot = 0.0;
  double tau = 0.0;
};

/// Pre-averaged blocks Zbar_{i,m}, i = 2..m (result[i-2]); O(n) total.
std::vector<double> pre_average(const ObservationSet& obs,
                                const PreAveragingKernel& kernel,
                                std::int64_t m);

/// Noise bias terms b_{i,m}, i = 2..m (result[i-2]).
std::vector<double> bias_correction(const ObservationSet& obs,
                                    const PreAveragingKernel& kernel,
                                    std::int64_t m);

enum class CoefficientKind { scaling, detail };

/// E_m(h_{lk}) = sum_{i=2}^m h_{lk}((i-1)/m) [Zbar^2 - b] over cached arrays.
double estimate_coefficient(std::span<const double> zbar,
                            std::span<const double> bias,
                            const WaveletBasis& basis, int level, int k,
                            CoefficientKind kind);

/// (2n)^{-1} sum (z_j - z_{j-1})^2; consistent for the mean noise variance.
double estimate_noise_variance(const ObservationSet& obs);

/// Deviation-bound threshold constant with the drift factor set to 1 and
/// ||a||_inf replaced by sqrt(noise_var_hat).
double default_kappa(const PreAveragingKernel& kernel, double noise_var_hat,
                     double cbar);

/// x 1_{|x| >= tau}.
double hard_threshold(double x, double tau);

/// Full pipeline: coefficients, hard thresholding, reconstruction.
VolatilityEstimate estimate(const ObservationSet& obs,
                            const EstimatorConfig& config,
                            const PreAveragingKernel& kernel,
                            const WaveletBasis& basis,
                            std::span<const double> out_grid);

}  // namespace spotvol
