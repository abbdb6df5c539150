// SPDX-License-Identifier: Apache-2.0
//
// mcadet - analog in-memory massive MIMO linear detection simulator

#pragma once

#include <stdexcept>

namespace mcadet {

// Base class for data- and model-driven failures. Programming errors use
// assertions instead.
class SimError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define MCADET_DEFINE_ERROR(Name)                                              \
    class Name : public SimError {                                             \
      public:                                                                   \
        using SimError::SimError;                                               \
    }

MCADET_DEFINE_ERROR(SingularMatrix);
MCADET_DEFINE_ERROR(SingularGram);
MCADET_DEFINE_ERROR(SingularFeedback);
MCADET_DEFINE_ERROR(SingularSystem);
MCADET_DEFINE_ERROR(NonPositiveLambda);
MCADET_DEFINE_ERROR(ZeroMatrix);
MCADET_DEFINE_ERROR(InfeasibleMapping);
MCADET_DEFINE_ERROR(DynamicRangeExceeded);
MCADET_DEFINE_ERROR(StabilityViolation);
MCADET_DEFINE_ERROR(NoConvergence);
MCADET_DEFINE_ERROR(BadLength);
MCADET_DEFINE_ERROR(ZeroSignal);
MCADET_DEFINE_ERROR(ConfigError);
MCADET_DEFINE_ERROR(IoError);

#undef MCADET_DEFINE_ERROR

}  // namespace mcadet
