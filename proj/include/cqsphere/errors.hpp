#pragma once

#include <stdexcept>
#include <string>

namespace cqsphere {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CQSPHERE_DEFINE_ERROR(Name)        \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

CQSPHERE_DEFINE_ERROR(InvalidArgument);
CQSPHERE_DEFINE_ERROR(AntipodalPoints);
CQSPHERE_DEFINE_ERROR(PerimeterTooLarge);
CQSPHERE_DEFINE_ERROR(EmptyOrDegenerate);
CQSPHERE_DEFINE_ERROR(NoConvergence);
CQSPHERE_DEFINE_ERROR(WitnessInfeasible);
// Raised when a guarantee of the convergence proofs fails at runtime. These
// indicate a bug, never a data condition.
CQSPHERE_DEFINE_ERROR(FeasibilityViolated);
CQSPHERE_DEFINE_ERROR(MonotonicityViolated);
CQSPHERE_DEFINE_ERROR(DegenerateInput);
CQSPHERE_DEFINE_ERROR(NoFeasibleGridPoint);

#undef CQSPHERE_DEFINE_ERROR

}  // namespace cqsphere
