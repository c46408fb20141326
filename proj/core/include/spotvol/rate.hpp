#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "spotvol/estimator.hpp"
#include "spotvol/kernel.hpp"
#include "spotvol/simulate.hpp"
#include "spotvol/wavelet.hpp"

namespace spotvol {

/// (s, p, pi) smoothness/loss indices; requires s > 1/pi.
struct RateQuery {
  double s = 1.0;
  double p = 2.0;
  double pi = 2.0;
};

/// alpha(s,p,pi) = min{ s/(2s+1), (s + 1/p - 1/pi) / (1 + 2s - 2/pi) };
/// the target loss rate is n^{-alpha/2}.
double rate_exponent(const RateQuery& query);

/// L^p distance of two functions sampled on the same uniform grid over [0,1],
/// restricted to [lo, hi]; composite trapezoid.
double lp_error(std::span<const double> estimate, std::span<const double> truth,
                double p, double lo = 0.0, double hi = 1.0);

struct CampaignConfig {
  VolatilityScenario scenario = SineVol{};
  NoiseModel noise = constant_noise(0.01);
  WaveletFamily basis = WaveletFamily::daubechies4;
  std::vector<std::int64_t> n_grid;
  int replicates = 2;
  std::uint64_t seed_base = 0;
  double p = 2.0;
  double region_lo = 0.0;
  double region_hi = 1.0;
  int refinement = 16;
  int jobs = 1;
  EstimatorConfig estimator;  // sentinel fields resolved per n
};

struct CampaignResult {
  struct Cell {
    std::int64_t n = 0;
    int replicate = 0;
    double lp_error = 0.0;
  };
  struct PerN {
    std::int64_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double se = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
  };
  std::vector<Cell> cells;  // ordered by (n, replicate)
  std::vector<PerN> summary;
  double slope = 0.0;     // OLS of log(median) on log(n)
  double slope_se = 0.0;
  nlohmann::json config;  // provenance

  nlohmann::json to_json() const;
};

/// Simulate/estimate campaign over the n-grid; cell seeds derive from
/// seed_base and (n, replicate), so results are jobs-independent.
CampaignResult run_campaign(const CampaignConfig& config,
                            const PreAveragingKernel& kernel);

struct TailRow {
  double kappa = 0.0;
  int exceed = 0;
  int total = 0;
  double freq = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
};

struct TailStudyConfig {
  VolatilityScenario scenario = ConstVol{};
  NoiseModel noise = constant_noise(0.01);
  WaveletFamily basis = WaveletFamily::haar;
  std::int64_t n = 1 << 14;
  std::int64_t m = 0;  // 0 -> floor(sqrt(n))
  int level = 2;
  int position = 1;
  std::vector<double> kappa_grid;
  int replicates = 1000;
  std::uint64_t seed_base = 0;
  int refinement = 16;
  int jobs = 1;
};

/// Empirical exceedance of |E_m(psi_{lk}) - <sigma^2, psi_{lk}>| over
/// kappa sqrt(log m / m), with 95% Wilson intervals.
std::vector<TailRow> deviation_tail_study(const TailStudyConfig& config,
                                          const PreAveragingKernel& kernel);

/// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(int successes, int total);

/// Ordinary least squares y = a + b x; returns (b, se_b).
std::pair<double, double> ols_slope(std::span<const double> x,
                                    std::span<const double> y);

/// Run fn(i) for i in [0, count) on up to jobs threads; any exception is
/// rethrown on the caller thread.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace spotvol
