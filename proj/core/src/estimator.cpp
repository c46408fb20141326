#include "spotvol/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "spotvol/errors.hpp"

namespace spotvol {

EstimatorConfig resolve_config(EstimatorConfig cfg, std::int64_t n) {
  if (n < 4) throw ConfigError("need n >= 4");
  if (cfg.m <= 0) {
    cfg.m = static_cast<std::int64_t>(std::floor(std::sqrt(
        static_cast<double>(n))));
  }
  if (cfg.m < 2 || cfg.m > n) {
    throw BadBlockCount("need 2 <= m <= n, got m=" + std::to_string(cfg.m));
  }
  if (!(cfg.alpha0 > 0.0 && cfg.alpha0 < 0.5)) {
    throw ConfigError("alpha0 must lie in (0, 1/2)");
  }
  const double log2m = std::log2(static_cast<double>(cfg.m));
  if (cfg.ell0 < 0) {
    cfg.ell0 = static_cast<int>(std::floor((1.0 - 2.0 * cfg.alpha0) * log2m));
  }
  if (cfg.ell1 < 0) {
    cfg.ell1 = static_cast<int>(std::floor(log2m / (1.0 + 2.0 * cfg.alpha0)));
  }
  if (cfg.ell1 < cfg.ell0) cfg.ell1 = cfg.ell0;
  if ((std::int64_t{1} << cfg.ell1) > cfg.m) {
    throw ConfigInconsistent("2^ell1 must not exceed m");
  }
  if (cfg.q <= 0.0) {
    cfg.q = 1.0 - 1.0 / (1.0 + 2.0 * cfg.alpha0);
  }
  const double lhs = static_cast<double>(cfg.m) * std::ldexp(1.0, -cfg.ell1);
  if (lhs + 1e-9 < std::pow(static_cast<double>(cfg.m), cfg.q)) {
    throw ConfigInconsistent("m 2^{-ell1} >= m^q violated");
  }
  return cfg;
}

std::vector<double> pre_average(const ObservationSet& obs,
                                const PreAveragingKernel& kernel,
                                std::int64_t m) {
  const auto blocks = weight_table(kernel, obs.n, m);
  std::vector<double> zbar(blocks.size(), 0.0);
  for (size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    double s = 0.0;
    for (size_t r = 0; r < blk.w.size(); ++r) {
      s += blk.w[r] * obs.z[static_cast<size_t>(blk.j_begin) + r];
    }
    zbar[b] = s;
  }
  return zbar;
}

std::vector<double> bias_correction(const ObservationSet& obs,
                                    const PreAveragingKernel& kernel,
                                    std::int64_t m) {
  const auto blocks = weight_table(kernel, obs.n, m);
  std::vector<double> bias(blocks.size(), 0.0);
  for (size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    double s = 0.0;
    for (size_t r = 0; r < blk.w2.size(); ++r) {
      const size_t j = static_cast<size_t>(blk.j_begin) + r;
      const double dz = obs.z[j] - obs.z[j - 1];
      s += blk.w2[r] * dz * dz;
    }
    bias[b] = s;
  }
  return bias;
}

double estimate_coefficient(std::span<const double> zbar,
                            std::span<const double> bias,
                            const WaveletBasis& basis, int level, int k,
                            CoefficientKind kind) {
  const std::int64_t m = static_cast<std::int64_t>(zbar.size()) + 1;
  if ((std::int64_t{1} << level) > m) {
    throw LevelExceedsBlocks("2^level exceeds block count m");
  }
  if (zbar.size() != bias.size()) {
    throw GridMismatch("zbar/bias length mismatch");
  }
  double sum = 0.0;
  for (std::int64_t i = 2; i <= m; ++i) {
    const double t = static_cast<double>(i - 1) / static_cast<double>(m);
    const double h = kind == CoefficientKind::scaling
                         ? basis.scaling_value(level, k, t)
                         : basis.wavelet_value(level, k, t);
    if (h != 0.0) {
      const size_t idx = static_cast<size_t>(i - 2);
      sum += h * (zbar[idx] * zbar[idx] - bias[idx]);
    }
  }
  return sum;
}

double estimate_noise_variance(const ObservationSet& obs) {
  if (obs.n < 2) throw DataError("need n >= 2");
  double s = 0.0;
  for (std::int64_t j = 1; j <= obs.n; ++j) {
    const double dz = obs.z[static_cast<size_t>(j)] -
                      obs.z[static_cast<size_t>(j - 1)];
    s += dz * dz;
  }
  return s / (2.0 * static_cast<double>(obs.n));
}

double default_kappa(const PreAveragingKernel& kernel, double noise_var_hat,
                     double cbar) {
  if (!(cbar > 0.0)) throw ConfigError("cbar must be positive");
  const double a_inf = std::sqrt(std::max(0.0, noise_var_hat));
  const double ratio = a_inf * kernel.lambda_l2() / kernel.bar_lambda();
  return 4.0 * (cbar + std::sqrt(2.0 * cbar) * ratio + ratio * ratio);
}

double hard_threshold(double x, double tau) {
  if (tau < 0.0) throw NegativeThreshold("tau must be >= 0");
  return std::abs(x) >= tau ? x : 0.0;
}

VolatilityEstimate estimate(const ObservationSet& obs,
                            const EstimatorConfig& config,
                            const PreAveragingKernel& kernel,
                            const WaveletBasis& basis,
                            std::span<const double> out_grid) {
  VolatilityEstimate est;
  est.n = obs.n;
  est.config = resolve_config(config, obs.n);
  const auto& cfg = est.config;

  const auto zbar = pre_average(obs, kernel, cfg.m);
  const auto bias = bias_correction(obs, kernel, cfg.m);
  est.noise_var_hat = estimate_noise_variance(obs);

  CoefficientSet coeffs;
  coeffs.ell0 = cfg.ell0;
  coeffs.ell1 = cfg.ell1;
  coeffs.scaling.assign(size_t{1} << cfg.ell0, 0.0);
  for (size_t k = 0; k < coeffs.scaling.size(); ++k) {
    coeffs.scaling[k] = estimate_coefficient(zbar, bias, basis, cfg.ell0,
                                             static_cast<int>(k),
                                             CoefficientKind::scaling);
  }

  // pilot: the linear (scaling-only) estimate bounds the spot variance for the
  // threshold constant
  {
    CoefficientSet pilot = coeffs;
    pilot.ell1 = pilot.ell0;
    double cbar = 0.0;
    const int pn = 512;
    std::vector<double> pg(pn);
    for (int i = 0; i < pn; ++i) pg[i] = (i + 0.5) / pn;
    for (double v : synthesize(pilot, basis, pg)) cbar = std::max(cbar, v);
    est.cbar_pilot = std::max(cbar, 1e-8);
  }

  est.config.kappa_tilde =
      cfg.kappa_tilde > 0.0
          ? cfg.kappa_tilde
          : default_kappa(kernel, est.noise_var_hat, est.cbar_pilot);
  est.tau = est.config.kappa_tilde *
            std::sqrt(std::log(static_cast<double>(cfg.m)) /
                      static_cast<double>(cfg.m));
  coeffs.tau = est.tau;

  for (int l = cfg.ell0 + 1; l <= cfg.ell1; ++l) {
    auto& row = coeffs.detail.emplace_back(size_t{1} << l);
    for (size_t k = 0; k < row.size(); ++k) {
      const double d = estimate_coefficient(zbar, bias, basis, l,
                                            static_cast<int>(k),
                                            CoefficientKind::detail);
      row[k].value = d;
      row[k].kept = std::abs(d) >= est.tau;
    }
  }

  est.coefficients = coeffs;
  est.grid.assign(out_grid.begin(), out_grid.end());
  // synthesize skips dropped coefficients via the kept flag
  est.values = synthesize(est.coefficients, basis, est.grid);
  if (cfg.clip_nonneg) {
    for (double& v : est.values) v = std::max(v, 0.0);
  }
  return est;
}

}  // namespace spotvol
