#pragma once

#include "rbelast/geometry.hpp"
#include "rbelast/mesh.hpp"
#include "rbelast/sif.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rbe {

enum class Resolution { Coarse, Fine };

struct ProblemOptions {
    Resolution resolution = Resolution::Fine;
    std::optional<double> nu;     // Poisson ratio of every region
    std::optional<ParamBox> box;  // parameter box override
};

struct ProblemSpec {
    std::string name;
    Mesh mesh;
    std::vector<RegionSetup> regions; // indexed by region - 1
    std::vector<BoundaryCondition> bcs;
    AffineDecomposition decomp;
    ParamBox box;
    ParamBox limits; // boxes must stay inside this (open) range
    Param mu_ref;
    bool compliant = true;
    std::string output_description;
    double nu = 0.3;
    bool crack = false;
    ErrSign err_sign = ErrSign::Negative;
};

std::vector<std::string> problem_names();

/// Throws UnknownProblem or OutOfRangeValue.
ProblemSpec build_problem(const std::string& name, const ProblemOptions& options = {});

/// Everything validate checks: mesh and boundary conditions, map continuity, SPD sampling of K(mu).
std::vector<std::string> validate_problem(const ProblemSpec& spec, int spd_samples = 20);

} // namespace rbe
