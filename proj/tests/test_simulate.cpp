#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "spotvol/errors.hpp"
#include "spotvol/fbm.hpp"
#include "spotvol/rng.hpp"
#include "spotvol/simulate.hpp"

using namespace spotvol;

TEST_CASE("reproducibility") {
  const SineVol scenario{};
  const auto p1 = simulate_path(scenario, nullptr, 512, 4, 99);
  const auto p2 = simulate_path(scenario, nullptr, 512, 4, 99);
  CHECK(p1.x == p2.x);
  CHECK(p1.sigma2 == p2.sigma2);

  const auto o1 = add_noise(p1, constant_noise(0.01), 7);
  const auto o2 = add_noise(p2, constant_noise(0.01), 7);
  CHECK(o1.z == o2.z);

  const auto p3 = simulate_path(scenario, nullptr, 512, 4, 100);
  CHECK(p1.x != p3.x);
}

TEST_CASE("degenerate SDE: sigma = 0, b = 0 gives X = 0") {
  const auto p = simulate_path(ConstVol{0.0}, nullptr, 64, 4, 1);
  for (double x : p.x) CHECK(x == 0.0);
}

TEST_CASE("negative variance rejected") {
  FunctionVol bad;
  bad.sigma2 = [](double t) { return 0.5 - t; };
  CHECK_THROWS_AS(simulate_path(bad, nullptr, 64, 4, 1), NonPositiveVol);
  CHECK_THROWS_AS(simulate_path(ConstVol{1.0}, nullptr, 64, 0, 1),
                  BadRefinement);
}

TEST_CASE("gaussian random walk increment variance") {
  const std::int64_t n = 4;
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 100000; ++seed) {
    const auto p = simulate_path(ConstVol{1.0}, nullptr, n, 4, seed);
    for (std::int64_t j = 1; j <= n; ++j) {
      const double inc = p.x[static_cast<size_t>(j)] -
                         p.x[static_cast<size_t>(j - 1)];
      sum += inc;
      sum2 += inc * inc;
      ++count;
    }
  }
  const double var = sum2 / static_cast<double>(count);
  CHECK(std::abs(var - 0.25) < 0.25 * 0.02);
  CHECK(std::abs(sum / static_cast<double>(count)) < 0.002);
}

TEST_CASE("quadratic variation matches integrated variance") {
  const std::int64_t n = 1 << 16;
  const auto p = simulate_path(SineVol{1.0, 0.5}, nullptr, n, 8, 2024);
  double qv = 0.0;
  for (std::int64_t j = 1; j <= n; ++j) {
    const double inc =
        p.x[static_cast<size_t>(j)] - p.x[static_cast<size_t>(j - 1)];
    qv += inc * inc;
  }
  // int sigma^2 = 1; sd of the QV estimator ~ sqrt(2 int sigma^4 / n)
  const double se = std::sqrt(2.0 * 1.125 / static_cast<double>(n));
  CHECK(std::abs(qv - 1.0) <= 3.0 * se);
}

TEST_CASE("drift enters the Euler scheme") {
  const auto p = simulate_path(
      ConstVol{0.0}, [](double, double) { return 2.0; }, 8, 16, 5);
  // pure drift: X_t = 2t exactly on the refined grid
  for (std::size_t j = 0; j < p.x.size(); ++j) {
    CHECK(p.x[j] == doctest::Approx(2.0 * static_cast<double>(j) / 8.0)
                        .epsilon(1e-12));
  }
}

TEST_CASE("add_noise") {
  SimulatedPath path;
  path.n = 100000;
  path.x.assign(100001, 1.0);
  path.sigma2.assign(100001, 1.0);

  SUBCASE("a = 0 is the identity") {
    const auto obs = add_noise(path, constant_noise(0.0), 3);
    CHECK(obs.z == path.x);
    REQUIRE(obs.truth.has_value());
    CHECK(obs.truth->x == path.x);
  }

  SUBCASE("constant intensity variance") {
    for (auto& v : path.x) v = 0.0;
    const auto obs = add_noise(path, constant_noise(0.01), 3);
    double s2 = 0.0;
    for (double z : obs.z) s2 += z * z;
    s2 /= static_cast<double>(obs.z.size());
    CHECK(std::abs(s2 - 1e-4) < 0.05 * 1e-4);
  }

  SUBCASE("state-dependent intensity") {
    NoiseModel model;
    model.a = [](double, double x) { return 0.01 * (1.0 + std::abs(x)); };
    const auto obs = add_noise(path, model, 3);
    double s2 = 0.0;
    for (std::size_t j = 0; j < obs.z.size(); ++j) {
      const double e = obs.z[j] - path.x[j];
      s2 += e * e;
    }
    s2 /= static_cast<double>(obs.z.size());
    // per-point noise s.d. is 0.02
    CHECK(std::abs(s2 - 4e-4) < 0.05 * 4e-4);
  }
}

TEST_CASE("eta laws are standardized") {
  for (auto law : {EtaLaw::gaussian, EtaLaw::uniform, EtaLaw::rademacher}) {
    CAPTURE(eta_law_name(law));
    Rng rng(splitmix64(11));
    const std::size_t draws = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
      const double e = draw_eta(law, rng);
      sum += e;
      sum2 += e * e;
    }
    const double mean = sum / static_cast<double>(draws);
    const double var = sum2 / static_cast<double>(draws) - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(draws)));
    CHECK(std::abs(var - 1.0) < 0.01);
  }
  CHECK(eta_law_from_name("rademacher") == EtaLaw::rademacher);
  CHECK_THROWS_AS(eta_law_from_name("cauchy"), ConfigError);
}

TEST_CASE("noise is independent of the path") {
  const std::int64_t n = 100000;
  const auto p = simulate_path(SineVol{}, nullptr, n, 1, 17);
  const auto obs = add_noise(p, constant_noise(0.01), 18);
  double sx = 0.0, se = 0.0, sxx = 0.0, see = 0.0, sxe = 0.0;
  const auto count = static_cast<double>(obs.z.size());
  for (std::size_t j = 0; j < obs.z.size(); ++j) {
    const double e = (obs.z[j] - p.x[j]) / 0.01;
    sx += p.x[j];
    se += e;
    sxx += p.x[j] * p.x[j];
    see += e * e;
    sxe += p.x[j] * e;
  }
  const double cov = sxe / count - (sx / count) * (se / count);
  const double vx = sxx / count - (sx / count) * (sx / count);
  const double ve = see / count - (se / count) * (se / count);
  const double corr = cov / std::sqrt(vx * ve);
  CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("refinement consistency of the weak Euler error") {
  const std::int64_t n = 16;
  const int reps = 10000;
  auto terminal_stats = [&](int refinement, std::uint64_t salt) {
    double s = 0.0, s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto p = simulate_path(SineVol{}, nullptr, n, refinement,
                                   splitmix64(salt) + static_cast<std::uint64_t>(r));
      const double x1 = p.x.back();
      s += x1;
      s2 += x1 * x1;
    }
    const double mean = s / reps;
    return std::pair<double, double>{mean, s2 / reps - mean * mean};
  };
  const auto [m8, v8] = terminal_stats(8, 1);
  const auto [m16, v16] = terminal_stats(16, 2);
  // X_1 ~ N(0, 1): the mean SE is sqrt(1/reps), the variance SE ~ sqrt(2/reps)
  const double se_mean = std::sqrt(1.0 / reps) * std::numbers::sqrt2;
  const double se_var = std::sqrt(2.0 / reps) * std::numbers::sqrt2;
  CHECK(std::abs(m16 - m8) < 3.0 * se_mean);
  CHECK(std::abs(v16 - v8) < 3.0 * se_var);
}

TEST_CASE("stochastic volatility scenarios") {
  SUBCASE("ito volatility stays positive and is reproducible") {
    const auto p1 = simulate_path(ItoVol{}, nullptr, 1024, 4, 55);
    const auto p2 = simulate_path(ItoVol{}, nullptr, 1024, 4, 55);
    CHECK(p1.x == p2.x);
    CHECK(p1.sigma2 == p2.sigma2);
    for (double s2 : p1.sigma2) {
      CHECK(s2 > 0.0);
      CHECK(std::isfinite(s2));
    }
  }
  SUBCASE("fbm volatility stays positive and is reproducible") {
    const auto p1 = simulate_path(FbmVol{}, nullptr, 1024, 2, 56);
    const auto p2 = simulate_path(FbmVol{}, nullptr, 1024, 2, 56);
    CHECK(p1.sigma2 == p2.sigma2);
    for (double s2 : p1.sigma2) {
      CHECK(s2 > 0.0);
      CHECK(std::isfinite(s2));
    }
  }
}

TEST_CASE("fractional Brownian motion marginals") {
  SUBCASE("terminal variance is 1 for H = 0.3") {
    Rng rng(splitmix64(3));
    const int reps = 2000;
    double s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto b = fbm_path(256, 0.3, rng);
      s2 += b.back() * b.back();
    }
    s2 /= reps;
    CHECK(std::abs(s2 - 1.0) < 0.1);
  }
  SUBCASE("H = 1/2 reduces to Brownian increments") {
    Rng rng(splitmix64(4));
    const int reps = 2000;
    const std::size_t steps = 256;
    double s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto b = fbm_path(steps, 0.5, rng);
      for (std::size_t i = 1; i <= steps; ++i) {
        const double inc = b[i] - b[i - 1];
        s2 += inc * inc;
      }
    }
    s2 /= static_cast<double>(reps) * static_cast<double>(steps);
    CHECK(std::abs(s2 - 1.0 / 256.0) < 0.03 / 256.0);
  }
}

TEST_CASE("scenario serialization round trip") {
  for (const VolatilityScenario& sc :
       {VolatilityScenario{ConstVol{2.0}}, VolatilityScenario{SineVol{1.0, 0.25}},
        VolatilityScenario{ItoVol{4.0, 0.1, 0.3, -0.4, 0.2}},
        VolatilityScenario{FbmVol{0.4, 0.6}}}) {
    const auto j = scenario_to_json(sc);
    const auto back = scenario_from_json(j);
    CHECK(scenario_to_json(back) == j);
  }
}
