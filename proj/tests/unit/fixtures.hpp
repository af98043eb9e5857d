#pragma once

#include "rbelast/config.hpp"
#include "rbelast/pipeline.hpp"

#include <map>
#include <memory>
#include <string>

namespace rbe::testing {

struct Trained {
    RunConfig cfg;
    TruthSetup truth;
    RBModel model;
};

/// Small coarse model, trained once per process.
inline const Trained& trained(const std::string& problem)
{
    static std::map<std::string, std::unique_ptr<Trained>> cache;
    auto& slot = cache[problem];
    if (!slot) {
        slot = std::make_unique<Trained>();
        slot->cfg = parse_config("[problem]\nname = " + problem +
                                 "\nresolution = coarse\n[greedy]\nn_train = 120\ntol = 1e-6\nn_max = 12\n"
                                 "[scm]\ntol = 0.5\nm = 8\nj_max = 40\nn_train = 200\n");
        slot->truth = build_truth(slot->cfg);
        slot->model = run_offline(slot->cfg, slot->truth);
    }
    return *slot;
}

} // namespace rbe::testing
