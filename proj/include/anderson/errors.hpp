#pragma once

#include <stdexcept>
#include <string>

namespace anderson {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ANDERSON_DEFINE_ERROR(Name)          \
  class Name : public Error {                \
   public:                                   \
    explicit Name(const std::string& what)   \
        : Error(#Name ": " + what) {}        \
  }

// Point outside the analyticity strip of a density or coefficient function.
ANDERSON_DEFINE_ERROR(StripViolation);
// Off-axis routine called with a real energy.
ANDERSON_DEFINE_ERROR(RealAxisInput);
// Gap powers requested at coincident energies.
ANDERSON_DEFINE_ERROR(CoincidentPoints);
ANDERSON_DEFINE_ERROR(ConvexHullViolation);
ANDERSON_DEFINE_ERROR(Overflow);
// Walk enumeration exceeded its node budget.
ANDERSON_DEFINE_ERROR(ResourceLimit);
ANDERSON_DEFINE_ERROR(MissingPotential);
// Certified tail bound requested outside the convergence radius.
ANDERSON_DEFINE_ERROR(RadiusViolation);
ANDERSON_DEFINE_ERROR(SolverFailure);
ANDERSON_DEFINE_ERROR(ToleranceNotMet);
ANDERSON_DEFINE_ERROR(ConfigError);
ANDERSON_DEFINE_ERROR(InvalidArgument);

#undef ANDERSON_DEFINE_ERROR

}  // namespace anderson
