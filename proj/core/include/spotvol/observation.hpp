#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

namespace spotvol {

/// Noisy samples z_j = x_{j/n} + eps_j on the uniform grid t_j = j/n over
/// [0,1]. Simulated sets optionally keep the hidden truth alongside.
struct ObservationSet {
  std::int64_t n = 0;
  std::vector<double> z;  // n+1 values

  struct Truth {
    std::vector<double> x;       // latent path on the same grid
    std::vector<double> sigma2;  // spot variance on the same grid
    std::uint64_t seed = 0;
    nlohmann::json scenario;
  };
  std::optional<Truth> truth;
};

}  // namespace spotvol
