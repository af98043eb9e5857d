#pragma once

#include "rbelast/geometry.hpp"
#include "rbelast/rb.hpp"
#include "rbelast/residual.hpp"
#include "rbelast/scm.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rbe {

struct CertifiedOutput {
    int N = 0;
    double sN = 0.0;
    double deltaN = 0.0;
    double alphaLB = 0.0; // value used in the bound (alpha_UB when the LP bound was not positive)
    double alphaUB = 0.0;
    double eps_pr = 0.0, eps_du = 0.0;
    bool rigorous = true;
    double online_time = 0.0; // seconds: coefficients, reduced solve, residual norm, SCM bound
};

struct GreedyStep {
    int N = 0;
    Param mu;
    double max_indicator = 0.0; // max over the training sample after adding mu
};

/// Everything an online query needs, plus the bases for reconstruction.
struct RBModel {
    std::string problem;
    std::uint64_t config_hash = 0;
    std::string config_text; // canonical run configuration, used to rebuild the truth model
    ThetaEvaluator theta;
    bool compliant = true;
    Param mu_bar;
    ReducedBasis basis_pr, basis_du;
    ReducedOperators red;
    ResidualFactor res_pr, res_du;
    SCMData scm;
    std::vector<GreedyStep> history;
    bool stagnated = false;

    int N_max() const { return red.N; }

    CertifiedOutput query(const Param& mu, int N) const;
    /// Query with a coercivity lower bound supplied by the caller (used during training).
    CertifiedOutput query_with_alpha(const Param& mu, int N, double alpha_lb, bool rigorous) const;
};

/// alpha used by the bound at mu: the LP value when positive, else alpha_UB (non-rigorous).
struct AlphaBound {
    double value = 0.0;
    double ub = 0.0;
    bool rigorous = true;
};
AlphaBound coercivity_bound(const SCMData& scm, const Eigen::VectorXd& theta_a, const Param& mu);

} // namespace rbe
