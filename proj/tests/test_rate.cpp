#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <vector>

#include "spotvol/rate.hpp"

using namespace spotvol;

TEST_CASE("rate exponent table") {
  CHECK(std::abs(rate_exponent({1.0, 2.0, 2.0}) - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(rate_exponent({2.0, 2.0, 2.0}) - 2.0 / 5.0) < 1e-12);
  CHECK(std::abs(rate_exponent({0.5, 4.0, 2.0}) - 0.25) < 1e-12);
  CHECK_THROWS_AS(rate_exponent({0.4, 2.0, 2.0}), SmoothnessTooLow);
  CHECK_THROWS_AS(rate_exponent({1.0, 0.5, 2.0}), BadExponent);
}

TEST_CASE("rate exponent shape") {
  double prev = 0.0;
  for (double s = 0.6; s <= 3.01; s += 0.2) {
    const double a = rate_exponent({s, 2.0, 2.0});
    CHECK(a >= prev);
    CHECK(a < 0.5);
    prev = a;
  }
  CHECK(rate_exponent({100.0, 2.0, 2.0}) > 0.49);
}

TEST_CASE("lp_error") {
  const size_t N = 1 << 12;
  std::vector<double> zero(N + 1, 0.0), same(N + 1, 0.0);

  SUBCASE("identical inputs") {
    CHECK(lp_error(zero, same, 2.0) == 0.0);
  }

  SUBCASE("constant difference is its own norm") {
    std::vector<double> c(N + 1, 0.7);
    for (double p : {1.0, 2.0, 3.0}) {
      CHECK(lp_error(c, zero, p) == doctest::Approx(0.7).epsilon(1e-10));
    }
    CHECK(lp_error(c, zero, 2.0, 0.2, 0.7) ==
          doctest::Approx(0.7 * std::sqrt(0.5)).epsilon(1e-9));
  }

  SUBCASE("linear difference, analytic L2 norm") {
    std::vector<double> lin(N + 1);
    for (size_t i = 0; i <= N; ++i) {
      lin[i] = static_cast<double>(i) / static_cast<double>(N);
    }
    CHECK(std::abs(lp_error(lin, zero, 2.0) - 1.0 / std::sqrt(3.0)) < 1e-6);
  }

  SUBCASE("grid mismatch") {
    std::vector<double> shorter(N, 0.0);
    CHECK_THROWS_AS(lp_error(shorter, zero, 2.0), GridMismatch);
  }

  SUBCASE("triangle inequality on random triples") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> f(65), g(65), h(65);
      for (size_t i = 0; i < 65; ++i) {
        f[i] = unif(rng);
        g[i] = unif(rng);
        h[i] = unif(rng);
      }
      for (double p : {1.0, 1.5, 2.0}) {
        CHECK(lp_error(f, h, p) <= lp_error(f, g, p) + lp_error(g, h, p) + 1e-9);
      }
    }
  }
}

TEST_CASE("wilson interval") {
  const auto [lo0, hi0] = wilson_interval(0, 100);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
  CHECK(hi0 < 0.05);

  const auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo < 0.5);
  CHECK(hi > 0.5);
  CHECK(hi - lo < 0.25);
  CHECK_THROWS_AS(wilson_interval(0, 0), ConfigError);
}

TEST_CASE("ols slope") {
  std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = 2.0 - 3.0 * x[i];
  const auto [b, se] = ols_slope(x, y);
  CHECK(b == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(se == doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS(ols_slope(std::vector<double>{1.0}, std::vector<double>{1.0}),
                  GridMismatch);
}

TEST_CASE("parallel_for") {
  std::atomic<std::int64_t> sum{0};
  parallel_for(1000, 4, [&](std::size_t i) {
    sum += static_cast<std::int64_t>(i);
  });
  CHECK(sum == 999 * 1000 / 2);

  CHECK_THROWS_AS(
      parallel_for(16, 4,
                   [](std::size_t i) {
                     if (i == 7) throw ConfigError("boom");
                   }),
      ConfigError);
}

TEST_CASE("campaign on a noiseless flat scenario") {
  CampaignConfig cc;
  cc.scenario = ConstVol{1.0};
  cc.noise = constant_noise(0.0);
  cc.basis = WaveletFamily::haar;
  cc.n_grid = {256, 4096, 65536};
  cc.replicates = 30;
  cc.seed_base = 77;
  cc.refinement = 4;
  cc.jobs = 4;
  const auto kernel = PreAveragingKernel::step();
  const auto res = run_campaign(cc, kernel);

  REQUIRE(res.summary.size() == 3);
  CHECK(res.summary[0].median > res.summary[1].median);
  CHECK(res.summary[1].median > res.summary[2].median);
  CHECK(res.slope < 0.0);
}

TEST_CASE("campaign determinism across job counts") {
  CampaignConfig cc;
  cc.scenario = ConstVol{1.0};
  cc.noise = constant_noise(0.01);
  cc.basis = WaveletFamily::haar;
  cc.n_grid = {256, 1024};
  cc.replicates = 5;
  cc.seed_base = 77;
  cc.refinement = 4;
  cc.jobs = 4;
  const auto kernel = PreAveragingKernel::step();
  const auto res = run_campaign(cc, kernel);

  auto cc1 = cc;
  cc1.jobs = 1;
  const auto res1 = run_campaign(cc1, kernel);
  const auto res2 = run_campaign(cc, kernel);
  REQUIRE(res1.cells.size() == res.cells.size());
  for (size_t i = 0; i < res.cells.size(); ++i) {
    CHECK(res1.cells[i].lp_error == res.cells[i].lp_error);
    CHECK(res2.cells[i].lp_error == res.cells[i].lp_error);
    CHECK(res1.cells[i].n == res.cells[i].n);
    CHECK(res1.cells[i].replicate == res.cells[i].replicate);
  }
  CHECK(res1.slope == res.slope);
}

TEST_CASE("campaign config validation") {
  CampaignConfig cc;
  cc.scenario = ConstVol{1.0};
  cc.noise = constant_noise(0.0);
  cc.n_grid = {256, 1024};
  cc.replicates = 2;
  cc.seed_base = 1;
  const auto kernel = PreAveragingKernel::step();
  auto bad = cc;
  bad.replicates = 1;
  CHECK_THROWS_AS(run_campaign(bad, kernel), ConfigError);
  bad = cc;
  bad.n_grid = {8, 256, 1024};  // floor(sqrt(8)) = 2 < 4
  CHECK_THROWS_AS(run_campaign(bad, kernel), ConfigError);
}

TEST_CASE("deviation tail study endpoints") {
  TailStudyConfig tc;
  tc.scenario = ConstVol{1.0};
  tc.noise = constant_noise(0.01);
  tc.n = 1024;
  tc.level = 2;
  tc.position = 1;
  tc.kappa_grid = {0.0, 1e9};
  tc.replicates = 50;
  tc.seed_base = 5;
  tc.refinement = 4;
  tc.jobs = 4;
  const auto rows = deviation_tail_study(tc, PreAveragingKernel::step());
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].freq == 1.0);  // kappa = 0: any deviation exceeds
  CHECK(rows[1].freq == 0.0);  // kappa huge: none do
  CHECK(rows[0].wilson_hi == 1.0);
  CHECK(rows[1].wilson_lo == 0.0);
  for (const auto& row : rows) CHECK(row.total == 50);
}
