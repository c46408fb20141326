#pragma once

#include <cstddef>
#include <vector>

#include "spotvol/rng.hpp"

namespace spotvol {

/// Fractional Brownian motion B^H at times k/steps, k = 0..steps, by
/// circulant embedding of the fractional Gaussian noise covariance
/// (Davies-Harte). Throws Error if the embedding is not nonnegative
/// definite beyond rounding.
std::vector<double> fbm_path(std::size_t steps, double hurst, Rng& rng);

}  // namespace spotvol
