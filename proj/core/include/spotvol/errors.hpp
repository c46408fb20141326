#pragma once

#include <stdexcept>
#include <string>

namespace spotvol {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SPOTVOL_DEFINE_ERROR(Name)              \
  struct Name : Error {                         \
    using Error::Error;                         \
  }

// kernel construction / block windows
SPOTVOL_DEFINE_ERROR(NotAntisymmetric);
SPOTVOL_DEFINE_ERROR(DegenerateKernel);
SPOTVOL_DEFINE_ERROR(InvalidDomain);
SPOTVOL_DEFINE_ERROR(BadBlockCount);

// simulation
SPOTVOL_DEFINE_ERROR(NonPositiveVol);
SPOTVOL_DEFINE_ERROR(BadRefinement);

// wavelet basis
SPOTVOL_DEFINE_ERROR(LevelTooFine);
SPOTVOL_DEFINE_ERROR(GridTooCoarse);
SPOTVOL_DEFINE_ERROR(BadExponent);

// estimator
SPOTVOL_DEFINE_ERROR(LevelExceedsBlocks);
SPOTVOL_DEFINE_ERROR(NegativeThreshold);
SPOTVOL_DEFINE_ERROR(ConfigInconsistent);

// rate harness
SPOTVOL_DEFINE_ERROR(SmoothnessTooLow);
SPOTVOL_DEFINE_ERROR(GridMismatch);

// io / cli
SPOTVOL_DEFINE_ERROR(NonUniformGrid);
SPOTVOL_DEFINE_ERROR(DataError);
SPOTVOL_DEFINE_ERROR(ConfigError);

#undef SPOTVOL_DEFINE_ERROR

}  // namespace spotvol
