#pragma once

#include <Eigen/Core>

namespace rbe {

struct LPResult {
    double value = 0.0;
    Eigen::VectorXd x;
    int pivots = 0;
};

/// min c^T x  subject to  A x >= b  and  lo <= x <= hi.
/// Dense two-phase tableau simplex, Dantzig pricing with a Bland fallback. Throws LPInfeasible.
LPResult lp_minimize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

} // namespace rbe
