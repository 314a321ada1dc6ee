#pragma once

#include <stdexcept>
#include <string>

namespace dspace {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DSPACE_DEFINE_ERROR(Name)          \
  class Name : public ::dspace::Error {    \
   public:                                 \
    using ::dspace::Error::Error;          \
  }

// general
DSPACE_DEFINE_ERROR(InvalidArgument);

// geometry
DSPACE_DEFINE_ERROR(DegenerateInput);
DSPACE_DEFINE_ERROR(DimensionMismatch);
DSPACE_DEFINE_ERROR(DegenerateSimplex);
DSPACE_DEFINE_ERROR(EmptyShape);

// sampling / problem definition
DSPACE_DEFINE_ERROR(InvalidBounds);
DSPACE_DEFINE_ERROR(ConfigError);

// process model
DSPACE_DEFINE_ERROR(IntegrationFailure);
DSPACE_DEFINE_ERROR(SaturationSingularity);
DSPACE_DEFINE_ERROR(ModelFailure);  // too many rows of a batch failed

// surrogate
DSPACE_DEFINE_ERROR(DivergedTraining);
DSPACE_DEFINE_ERROR(EmptyInput);

// identification
DSPACE_DEFINE_ERROR(MissingKpi);
DSPACE_DEFINE_ERROR(BracketInvalid);
DSPACE_DEFINE_ERROR(NoUnifiedShape);

// analysis
DSPACE_DEFINE_ERROR(NopOutsideSpace);
DSPACE_DEFINE_ERROR(EmptyRegion);

#undef DSPACE_DEFINE_ERROR

}  // namespace dspace
