#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "spotvol/observation.hpp"
#include "spotvol/rng.hpp"

namespace spotvol {

/// sigma^2(t) = value
struct ConstVol {
  double value = 1.0;
};

/// sigma^2(t) = base + amp * sin(2 pi t)
struct SineVol {
  double base = 1.0;
  double amp = 0.5;
};

/// arbitrary deterministic sigma^2(t) > 0
struct FunctionVol {
  std::function<double(double)> sigma2;
  std::string label = "function";
};

/// log-variance OU: sigma^2 = exp(v), dv = -kappa (v - theta) dt + xi dB,
/// corr(B, W) = rho_lev
struct ItoVol {
  double kappa = 5.0;
  double theta = 0.0;
  double xi = 0.5;
  double rho_lev = -0.5;
  double v0 = 0.0;
};

/// sigma^2(t) = exp(gamma * B^H_t)
struct FbmVol {
  double hurst = 0.3;
  double gamma = 0.5;
};

using VolatilityScenario =
    std::variant<ConstVol, SineVol, FunctionVol, ItoVol, FbmVol>;

nlohmann::json scenario_to_json(const VolatilityScenario& scenario);
VolatilityScenario scenario_from_json(const nlohmann::json& j);

using DriftFn = std::function<double(double, double)>;  // b(t, x)

/// Latent path on the observation grid plus the spot-variance path that
/// generated it.
struct SimulatedPath {
  std::int64_t n = 0;
  std::vector<double> x;       // n+1 values, x[0] = 0
  std::vector<double> sigma2;  // n+1 values
  std::uint64_t seed = 0;
  nlohmann::json scenario;
};

/// Euler-Maruyama on n*refinement substeps, subsampled to t_j = j/n.
/// Deterministic in seed.
SimulatedPath simulate_path(const VolatilityScenario& scenario,
                            const DriftFn& drift, std::int64_t n,
                            int refinement, std::uint64_t seed);

enum class EtaLaw { gaussian, uniform, rademacher };

EtaLaw eta_law_from_name(const std::string& name);
std::string eta_law_name(EtaLaw law);

/// Noise intensity a(t,x) plus the standardized law of eta.
struct NoiseModel {
  std::function<double(double, double)> a;
  EtaLaw eta = EtaLaw::gaussian;
  std::string label = "const";
};

NoiseModel constant_noise(double a, EtaLaw law = EtaLaw::gaussian);

/// z_j = x_j + a(j/n, x_j) eta_j; keeps the truth alongside.
ObservationSet add_noise(const SimulatedPath& path, const NoiseModel& model,
                         std::uint64_t seed);

/// One draw of eta per call: mean 0, variance 1.
double draw_eta(EtaLaw law, Rng& rng);

}  // namespace spotvol
