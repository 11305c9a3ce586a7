#pragma once

#include <stdexcept>
#include <string>

namespace emtopo {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define EMTOPO_ERROR(Name)                 \
  class Name : public Error {              \
   public:                                 \
    explicit Name(const std::string& msg)  \
        : Error(#Name ": " + msg) {}       \
  }

EMTOPO_ERROR(NonHermitianField);
EMTOPO_ERROR(MalformedCoefficients);
EMTOPO_ERROR(AmbiguousClass);
EMTOPO_ERROR(SingularBasis);
EMTOPO_ERROR(EmptySet);
EMTOPO_ERROR(DimensionMismatch);
EMTOPO_ERROR(SolverFailure);
EMTOPO_ERROR(IndefiniteWeight);
EMTOPO_ERROR(DegenerateGap);
EMTOPO_ERROR(QuadratureUnderResolved);
EMTOPO_ERROR(SingularLink);
EMTOPO_ERROR(NotConverged);
EMTOPO_ERROR(GapClosed);
EMTOPO_ERROR(ConfigError);

#undef EMTOPO_ERROR

}  // namespace emtopo
