#include "spotvol/rate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <initializer_list>
#include <mutex>
#include <thread>

#include "spotvol/errors.hpp"
#include "spotvol/rng.hpp"

namespace spotvol {

double rate_exponent(const RateQuery& query) {
  if (!(query.pi > 0.0)) throw BadExponent("need pi > 0");
  if (!(query.p >= 1.0)) throw BadExponent("need p >= 1");
  // the dense/sparse boundary s = 1/pi is admissible; only s < 1/pi is not
  if (query.s < 1.0 / query.pi) {
    throw SmoothnessTooLow("rate exponent needs s >= 1/pi");
  }
  const double dense = query.s / (2.0 * query.s + 1.0);
  const double sparse = (query.s + 1.0 / query.p - 1.0 / query.pi) /
                        (1.0 + 2.0 * query.s - 2.0 / query.pi);
  return std::min(dense, sparse);
}

double lp_error(std::span<const double> estimate, std::span<const double> truth,
                double p, double lo, double hi) {
  if (estimate.size() != truth.size() || estimate.size() < 2) {
    throw GridMismatch("lp_error needs matching grids with >= 2 points");
  }
  if (!(p >= 1.0)) throw BadExponent("need p >= 1");
  if (!(lo < hi)) throw ConfigError("empty error region");
  const size_t N = estimate.size() - 1;  // grid t_i = i/N
  auto integrand = [&](size_t i) {
    return std::pow(std::abs(estimate[i] - truth[i]), p);
  };
  const double i_lo = lo * static_cast<double>(N);
  const double i_hi = hi * static_cast<double>(N);
  const size_t first = static_cast<size_t>(std::ceil(i_lo - 1e-12));
  const size_t last = static_cast<size_t>(std::floor(i_hi + 1e-12));
  const double h = 1.0 / static_cast<double>(N);
  double acc = 0.0;
  for (size_t i = first; i < last; ++i) {
    acc += 0.5 * h * (integrand(i) + integrand(i + 1));
  }
  // partial cells at the region edges, integrand linearly interpolated
  if (static_cast<double>(first) > i_lo && first > 0) {
    const double frac = static_cast<double>(first) - i_lo;
    const double f_edge = integrand(first) +
                          (integrand(first - 1) - integrand(first)) * frac;
    acc += 0.5 * frac * h * (f_edge + integrand(first));
  }
  if (static_cast<double>(last) < i_hi && last < N) {
    const double frac = i_hi - static_cast<double>(last);
    const double f_edge = integrand(last) +
                          (integrand(last + 1) - integrand(last)) * frac;
    acc += 0.5 * frac * h * (integrand(last) + f_edge);
  }
  return std::pow(acc, 1.0 / p);
}

std::pair<double, double> wilson_interval(int successes, int total) {
  if (total <= 0) throw ConfigError("wilson_interval needs total > 0");
  const double z = 1.959963984540054;  // 97.5% quantile
  const double nd = static_cast<double>(total);
  const double phat = static_cast<double>(successes) / nd;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nd;
  const double center = phat + z2 / (2.0 * nd);
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / nd + z2 / (4.0 * nd * nd));
  return {successes == 0 ? 0.0 : std::max(0.0, (center - half) / denom),
          successes == total ? 1.0 : std::min(1.0, (center + half) / denom)};
}

std::pair<double, double> ols_slope(std::span<const double> x,
                                    std::span<const double> y) {
  const size_t k = x.size();
  if (k != y.size() || k < 2) throw GridMismatch("ols_slope needs >= 2 points");
  double xm = 0.0, ym = 0.0;
  for (size_t i = 0; i < k; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= static_cast<double>(k);
  ym /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < k; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  const double b = sxy / sxx;
  double se = 0.0;
  if (k > 2) {
    const double a = ym - b * xm;
    double rss = 0.0;
    for (size_t i = 0; i < k; ++i) {
      const double r = y[i] - a - b * x[i];
      rss += r * r;
    }
    se = std::sqrt(rss / static_cast<double>(k - 2) / sxx);
  }
  return {b, se};
}

void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

double interp_path(const std::vector<double>& path, double t) {
  const size_t n = path.size() - 1;
  const double pos = t * static_cast<double>(n);
  const double fl = std::floor(pos);
  const size_t i = std::min(static_cast<size_t>(fl), n - 1);
  const double frac = pos - static_cast<double>(i);
  return (1.0 - frac) * path[i] + frac * path[i + 1];
}

std::vector<double> quantile_sorted(std::vector<double> v,
                                    std::initializer_list<double> qs) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double q : qs) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const size_t i = static_cast<size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    out.push_back(i + 1 < v.size() ? (1.0 - frac) * v[i] + frac * v[i + 1]
                                   : v[i]);
  }
  return out;
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& config,
                            const PreAveragingKernel& kernel) {
  if (config.n_grid.empty()) throw ConfigError("campaign needs an n grid");
  if (config.replicates < 2) throw ConfigError("campaign needs replicates >= 2");
  for (std::int64_t n : config.n_grid) {
    const auto m = static_cast<std::int64_t>(std::floor(
        std::sqrt(static_cast<double>(n))));
    if (m < 4) throw ConfigError("each n must admit m = floor(sqrt(n)) >= 4");
  }
  const WaveletBasis basis(config.basis);
  const size_t cells = config.n_grid.size() *
                       static_cast<size_t>(config.replicates);

  CampaignResult result;
  result.cells.resize(cells);
  parallel_for(cells, config.jobs, [&](std::size_t c) {
    const size_t ni = c / static_cast<size_t>(config.replicates);
    const int r = static_cast<int>(c % static_cast<size_t>(config.replicates));
    const std::int64_t n = config.n_grid[ni];
    const std::uint64_t seed =
        cell_seed(config.seed_base, static_cast<std::uint64_t>(n),
                  static_cast<std::uint64_t>(r));
    const auto path = simulate_path(config.scenario, nullptr, n,
                                    config.refinement, seed);
    const auto obs = add_noise(path, config.noise, seed);
    const std::int64_t grid_n = std::min<std::int64_t>(n, 4096);
    std::vector<double> grid(static_cast<size_t>(grid_n) + 1);
    for (size_t i = 0; i < grid.size(); ++i) {
      grid[i] = static_cast<double>(i) / static_cast<double>(grid_n);
    }
    const auto est = estimate(obs, config.estimator, kernel, basis, grid);
    std::vector<double> truth(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
      truth[i] = interp_path(path.sigma2, grid[i]);
    }
    result.cells[c] = {n, r,
                       lp_error(est.values, truth, config.p, config.region_lo,
                                config.region_hi)};
  });

  std::vector<double> log_n, log_med;
  for (size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    std::vector<double> errs;
    errs.reserve(static_cast<size_t>(config.replicates));
    for (int r = 0; r < config.replicates; ++r) {
      errs.push_back(
          result.cells[ni * static_cast<size_t>(config.replicates) +
                       static_cast<size_t>(r)]
              .lp_error);
    }
    CampaignResult::PerN s;
    s.n = config.n_grid[ni];
    for (double e : errs) s.mean += e;
    s.mean /= static_cast<double>(errs.size());
    double var = 0.0;
    for (double e : errs) var += (e - s.mean) * (e - s.mean);
    var /= static_cast<double>(errs.size() - 1);
    s.se = std::sqrt(var / static_cast<double>(errs.size()));
    const auto qs = quantile_sorted(errs, {0.25, 0.5, 0.75});
    s.q25 = qs[0];
    s.median = qs[1];
    s.q75 = qs[2];
    result.summary.push_back(s);
    log_n.push_back(std::log(static_cast<double>(s.n)));
    log_med.push_back(std::log(s.median));
  }
  if (log_n.size() >= 2) {
    const auto [b, se] = ols_slope(log_n, log_med);
    result.slope = b;
    result.slope_se = se;
  }
  result.config = {
      {"scenario", scenario_to_json(config.scenario)},
      {"noise", config.noise.label},
      {"eta", eta_law_name(config.noise.eta)},
      {"basis", wavelet_family_name(config.basis)},
      {"kernel", kernel.descriptor()},
      {"n_grid", config.n_grid},
      {"replicates", config.replicates},
      {"seed_base", config.seed_base},
      {"p", config.p},
      {"region", {config.region_lo, config.region_hi}},
      {"refinement", config.refinement},
  };
  return result;
}

nlohmann::json CampaignResult::to_json() const {
  nlohmann::json j;
  j["config"] = config;
  auto& cs = j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) {
    cs.push_back({c.n, c.replicate, c.lp_error});
  }
  auto& su = j["summary"] = nlohmann::json::array();
  for (const auto& s : summary) {
    su.push_back({{"n", s.n},
                  {"mean", s.mean},
                  {"median", s.median},
                  {"se", s.se},
                  {"q25", s.q25},
                  {"q75", s.q75}});
  }
  j["slope"] = slope;
  j["slope_se"] = slope_se;
  return j;
}

std::vector<TailRow> deviation_tail_study(const TailStudyConfig& config,
                                          const PreAveragingKernel& kernel) {
  if (config.kappa_grid.empty()) throw ConfigError("empty kappa grid");
  if (config.replicates < 1) throw ConfigError("need replicates >= 1");
  const std::int64_t m =
      config.m > 0 ? config.m
                   : static_cast<std::int64_t>(std::floor(std::sqrt(
                         static_cast<double>(config.n))));
  if ((std::int64_t{1} << config.level) > m) {
    throw LevelExceedsBlocks("2^level exceeds block count m");
  }
  const WaveletBasis basis(config.basis);
  std::vector<double> deviations(static_cast<size_t>(config.replicates));
  parallel_for(deviations.size(), config.jobs, [&](std::size_t r) {
    const std::uint64_t seed =
        cell_seed(config.seed_base, static_cast<std::uint64_t>(config.n),
                  static_cast<std::uint64_t>(r));
    const auto path = simulate_path(config.scenario, nullptr, config.n,
                                    config.refinement, seed);
    const auto obs = add_noise(path, config.noise, seed);
    const auto zbar = pre_average(obs, kernel, m);
    const auto bias = bias_correction(obs, kernel, m);
    const double em = estimate_coefficient(zbar, bias, basis, config.level,
                                           config.position,
                                           CoefficientKind::detail);
    // target <sigma^2, psi_lk> from the retained truth path
    double target = 0.0;
    const double h = 1.0 / static_cast<double>(config.n);
    for (std::int64_t j = 0; j < config.n; ++j) {
      target += path.sigma2[static_cast<size_t>(j)] *
                basis.wavelet_value(config.level, config.position,
                                    static_cast<double>(j) * h);
    }
    target *= h;
    deviations[r] = std::abs(em - target);
  });
  const double rate = std::sqrt(std::log(static_cast<double>(m)) /
                                static_cast<double>(m));
  std::vector<TailRow> rows;
  for (double kappa : config.kappa_grid) {
    TailRow row;
    row.kappa = kappa;
    row.total = config.replicates;
    for (double d : deviations) {
      if (d >= kappa * rate) ++row.exceed;
    }
    row.freq = static_cast<double>(row.exceed) / row.total;
    std::tie(row.wilson_lo, row.wilson_hi) =
        wilson_interval(row.exceed, row.total);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace spotvol
