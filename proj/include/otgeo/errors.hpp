#pragma once

#include <stdexcept>
#include <string>

namespace otgeo {

// Base class for all recoverable library errors. code() is a stable
// machine-readable tag; what() carries the formatted detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define OTGEO_ERROR(Name)                            \
  class Name : public Error {                        \
   public:                                           \
    explicit Name(const std::string& what = "")      \
        : Error(#Name, what) {}                      \
  };

// space
OTGEO_ERROR(TriangleInequalityViolated)
OTGEO_ERROR(AsymmetricDistance)
OTGEO_ERROR(NegativeWeight)
OTGEO_ERROR(EmptySupport)
OTGEO_ERROR(DimensionMismatch)
OTGEO_ERROR(EmptySubset)
OTGEO_ERROR(ChecksumMismatch)
OTGEO_ERROR(BadInput)

// coeffs
OTGEO_ERROR(InvalidParameter)

// transport
OTGEO_ERROR(Infeasible)
OTGEO_ERROR(NumericalFailure)
OTGEO_ERROR(MapUndefinedOnSupport)

// geodesics
OTGEO_ERROR(OffGridTime)
OTGEO_ERROR(ResamplingRequired)
OTGEO_ERROR(JunctionMismatch)
OTGEO_ERROR(CapExceeded)

// construct
OTGEO_ERROR(InsufficientGeodesics)
OTGEO_ERROR(InfeasiblePolytope)
OTGEO_ERROR(NoConvergence)
OTGEO_ERROR(MapExtractionFailed)

// curvature
OTGEO_ERROR(TargetNotDirac)
OTGEO_ERROR(BadMarginal)
OTGEO_ERROR(SingularMarginal)
OTGEO_ERROR(NotMapInduced)

// uniqueness
OTGEO_ERROR(NoOverlapAtTau)
OTGEO_ERROR(MarginalMismatch)
OTGEO_ERROR(CoveringGap)
OTGEO_ERROR(FaceExplorationCapExceeded)

// instances
OTGEO_ERROR(InvalidSpec)

#undef OTGEO_ERROR

}  // namespace otgeo
