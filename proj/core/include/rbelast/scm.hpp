#pragma once

#include "rbelast/eigensolve.hpp"
#include "rbelast/geometry.hpp"
#include "rbelast/truth.hpp"

#include <Eigen/Core>

#include <vector>

namespace rbe {

struct SCMConfig {
    double tol = 0.75; // relative gap (UB - LB) / UB
    int M = 8;         // nearest stored constraints used online
    int J_max = 40;
};

/// Coercivity constraint data for the successive constraint method.
///
/// The LP runs in coordinates phi = basis^T Theta^a. With linearly independent coefficient functions
/// basis is the identity; otherwise its orthonormal columns span the sampled coefficient vectors and
/// the stiffness terms are recombined accordingly, so dependent coefficients cost no LP variables.
struct SCMData {
    Eigen::MatrixXd basis;                 // Qa x R
    Eigen::VectorXd y_min, y_max;          // continuity box per reduced term
    std::vector<Param> mu;                 // constraint sample C_J
    std::vector<Eigen::VectorXd> theta;    // phi at each mu_j
    std::vector<double> alpha;             // coercivity constant at mu_j (Ritz value minus residual)
    std::vector<Eigen::VectorXd> ystar;    // reduced-term Rayleigh quotients of the minimizing eigenvector
    std::vector<double> max_gap;           // greedy history: max relative gap before each addition
    ParamBox box;
    int M = 8;
    double tol = 0.75;
    int J_max = 40;

    int J() const { return static_cast<int>(mu.size()); }
    int R() const { return static_cast<int>(basis.cols()); }
};

/// SCM coordinate basis from Theta^a over `sample` plus a fixed uniform sample of the box.
Eigen::MatrixXd theta_span_basis(const ThetaEvaluator& theta, const std::vector<Param>& sample);

/// Indices of the M stored points nearest to mu in box-normalized distance.
std::vector<int> nearest_constraints(const SCMData& scm, const Param& mu, int M);

/// LP lower bound using the M nearest constraints (M < 0: use scm.M). May be <= 0; see CertifiedOutput::rigorous.
double scm_lower_bound(const SCMData& scm, const Eigen::VectorXd& theta_a, const Param& mu, int M = -1);

/// min over the M nearest stored points of Theta(mu) . y*(mu'). Throws EmptyConstraintSet when M == 0 or J == 0.
double scm_upper_bound(const SCMData& scm, const Eigen::VectorXd& theta_a, const Param& mu, int M = -1);

/// Reduced basis of coefficients, box from extremal eigenvalues, then greedy on the relative gap over `train`.
SCMData scm_offline(const ThetaEvaluator& theta, const TruthOperators& ops, const YFactor& Y,
                    const std::vector<Param>& train, const SCMConfig& cfg = {});

/// Append the exact constraint at mu (used by the greedy and in tests).
void scm_add_constraint(SCMData& scm, const ThetaEvaluator& theta, const TruthOperators& ops, const YFactor& Y,
                        const Param& mu);

} // namespace rbe
