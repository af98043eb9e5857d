#pragma once

#include "rbelast/config.hpp"
#include "rbelast/eigensolve.hpp"
#include "rbelast/model.hpp"
#include "rbelast/problems.hpp"
#include "rbelast/truth.hpp"

#include <memory>

namespace rbe {

/// Problem, assembled blocks and the factored inner product for one configuration.
struct TruthSetup {
    ProblemSpec spec;
    TruthOperators ops;
    std::unique_ptr<YFactor> Y;
    double assembly_time = 0.0;
};

TruthSetup build_truth(const RunConfig& cfg);

struct OfflineTimes {
    double scm = 0.0;
    double greedy = 0.0;
};

/// SCM offline stage followed by the greedy; the model carries the canonical configuration.
RBModel run_offline(const RunConfig& cfg, const TruthSetup& truth, OfflineTimes* times = nullptr);

/// Configuration a model was trained with.
RunConfig model_config(const RBModel& model);

} // namespace rbe
