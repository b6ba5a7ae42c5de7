#pragma once

#include <stdexcept>
#include <string>

namespace brwlab {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define BRWLAB_ERROR_TYPE(Name) \
  struct Name : Error {         \
    explicit Name(const std::string& msg) : Error(msg) {} \
  }

// walk_kernel
BRWLAB_ERROR_TYPE(AsymmetricKernel);
BRWLAB_ERROR_TYPE(NegativeIntensity);
BRWLAB_ERROR_TYPE(ZeroSupport);
BRWLAB_ERROR_TYPE(TailDivergence);
BRWLAB_ERROR_TYPE(QuadratureNotConverged);

// spectral
BRWLAB_ERROR_TYPE(BracketFailure);

// branching_law
BRWLAB_ERROR_TYPE(ArityMismatch);

// moment_solver
BRWLAB_ERROR_TYPE(TruncationTooSmall);
BRWLAB_ERROR_TYPE(StiffnessFailure);
BRWLAB_ERROR_TYPE(NonPositiveValues);
BRWLAB_ERROR_TYPE(DegenerateWindow);
BRWLAB_ERROR_TYPE(NoConvergence);

// montecarlo
BRWLAB_ERROR_TYPE(WrongRegime);

// asymptotics
BRWLAB_ERROR_TYPE(TailUnbounded);
BRWLAB_ERROR_TYPE(WindowTooShort);
BRWLAB_ERROR_TYPE(UnsupportedCombination);

// cli / config
BRWLAB_ERROR_TYPE(ConfigError);

#undef BRWLAB_ERROR_TYPE

}  // namespace brwlab
