#pragma once

#include <stdexcept>
#include <string>

namespace rbe {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define RBE_DECLARE_ERROR(Name)                                   \
    class Name : public Error {                                    \
    public:                                                        \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

// mesh_io
RBE_DECLARE_ERROR(MalformedFile);
RBE_DECLARE_ERROR(NonConforming);
RBE_DECLARE_ERROR(BadRegionId);
RBE_DECLARE_ERROR(InvalidGrading);

// material_models
RBE_DECLARE_ERROR(AsymmetricConstitutive);
RBE_DECLARE_ERROR(NotPositiveDefinite);

// geometry_map
RBE_DECLARE_ERROR(DegenerateTriangle);
RBE_DECLARE_ERROR(OrientationFlip);
RBE_DECLARE_ERROR(OutOfDomain);

// truth_solver
RBE_DECLARE_ERROR(MissingTag);
RBE_DECLARE_ERROR(QuadratureDegreeUnsupported);
RBE_DECLARE_ERROR(NotSPD);
RBE_DECLARE_ERROR(SingularSystem);
RBE_DECLARE_ERROR(NoConvergence);

// rb_core
RBE_DECLARE_ERROR(NearlyDependentSnapshot);
RBE_DECLARE_ERROR(SingularReducedSystem);
RBE_DECLARE_ERROR(BadN);

// certification
RBE_DECLARE_ERROR(NegativeNormSquared);
RBE_DECLARE_ERROR(NonCoerciveDetected);
RBE_DECLARE_ERROR(LPInfeasible);
RBE_DECLARE_ERROR(EmptyConstraintSet);
RBE_DECLARE_ERROR(NonPositiveAlpha);
RBE_DECLARE_ERROR(ZeroError);

// greedy_sampler
RBE_DECLARE_ERROR(StagnationAtDependentSnapshot);

// postproc_sif
RBE_DECLARE_ERROR(StepLeavesDomain);
RBE_DECLARE_ERROR(NegativeEnergyRelease);
RBE_DECLARE_ERROR(WrongProblemKind);

// bench_problems / cli
RBE_DECLARE_ERROR(UnknownProblem);
RBE_DECLARE_ERROR(UnknownKey);
RBE_DECLARE_ERROR(OutOfRangeValue);
RBE_DECLARE_ERROR(ArchiveError);

#undef RBE_DECLARE_ERROR

} // namespace rbe
