#pragma once

#include "rbelast/model.hpp"

#include <cstdint>
#include <vector>

namespace rbe {

enum class Indicator { RelativeOutputBound, AbsoluteOutputBound };

struct GreedyConfig {
    std::vector<Param> train;
    double tol = 1e-4;
    int N_max = 40;
    std::uint64_t seed = 1;
    Indicator indicator = Indicator::RelativeOutputBound;
    /// Throw StagnationAtDependentSnapshot instead of stopping when a snapshot is rejected early.
    bool strict = false;
};

/// Greedy snapshot selection starting from mu_bar. The returned model carries the
/// bases, projected blocks, residual factors, `scm` and the selection history.
RBModel greedy_build(const TruthOperators& ops, const YFactor& Y, const ThetaEvaluator& theta, SCMData scm,
                     const GreedyConfig& cfg);

struct ConvergenceRow {
    int N = 0;
    double E_N = 0.0;      // max relative bound over the test sample
    double eta_bar = 0.0;  // mean effectivity over points with a nonzero error
    double eta_min = 0.0;
    double eta_max = 0.0;
    int violations = 0;    // points where the bound is below the true error
    int non_rigorous = 0;  // points where alpha_LB was replaced by alpha_UB
    double mean_time = 0.0;
};

struct TruthOutputs {
    std::vector<double> s;
    double mean_time = 0.0;
};

/// Truth outputs for a sample (shared by several studies).
TruthOutputs truth_outputs(const TruthOperators& ops, const ThetaEvaluator& theta, const std::vector<Param>& test);

std::vector<ConvergenceRow> convergence_study(const RBModel& model, const std::vector<Param>& test,
                                              const std::vector<double>& s_truth, const std::vector<int>& N_list);

} // namespace rbe
