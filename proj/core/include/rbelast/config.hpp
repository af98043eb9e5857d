#pragma once

#include "rbelast/greedy.hpp"
#include "rbelast/problems.hpp"
#include "rbelast/scm.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace rbe {

/// Run configuration read from an INI file with sections [problem], [greedy], [scm], [online].
///
///   [problem]  name, resolution (coarse|fine), nu, mu_lo, mu_hi (comma lists)
///   [greedy]   n_train, tol, n_max, seed, indicator (relative|absolute)
///   [scm]      tol, m, j_max, n_train
///   [online]   n, delta_mu1
struct RunConfig {
    std::string problem;
    ProblemOptions options;

    int n_train = 500;
    double tol = 1e-4;
    int N_max = 40;
    std::uint64_t seed = 1;
    Indicator indicator = Indicator::RelativeOutputBound;

    SCMConfig scm;
    int scm_n_train = 500;

    int online_N = 0; // 0: use N_max of the archive
    double delta_mu1 = kDefaultCrackStep;
};

/// Throws UnknownKey, OutOfRangeValue or MalformedFile.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Canonical key=value form; stable across runs.
std::string canonical_config(const RunConfig& cfg);
/// FNV-1a 64-bit.
std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t config_hash(const RunConfig& cfg);

} // namespace rbe
