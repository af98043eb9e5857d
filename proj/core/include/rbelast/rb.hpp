#pragma once

#include "rbelast/geometry.hpp"
#include "rbelast/truth.hpp"

#include <Eigen/Core>

#include <vector>

namespace rbe {

/// Y-orthonormal basis, columns in greedy order.
struct ReducedBasis {
    Eigen::MatrixXd Z;
    std::vector<Param> snapshot_params;

    int size() const { return static_cast<int>(Z.cols()); }
};

/// Append u after two Gram-Schmidt passes in the Y inner product.
/// Throws NearlyDependentSnapshot (basis unchanged) if the remainder is below 1e-10 ||u||_Y.
void gram_schmidt_append(ReducedBasis& basis, const Eigen::VectorXd& u, const SpMat& Y, const Param& mu = {});

/// Projected blocks; leading N x N parts are valid for every N <= size.
struct ReducedOperators {
    bool compliant = true;
    int N = 0;
    std::vector<Eigen::MatrixXd> Kpp;      // Z_pr^T K_q Z_pr
    std::vector<Eigen::VectorXd> Fp;       // Z_pr^T F_q
    std::vector<Eigen::VectorXd> Lp;       // Z_pr^T L_q
    std::vector<Eigen::MatrixXd> Kdd, Kdp; // Z_du^T K_q Z_du, Z_du^T K_q Z_pr
    std::vector<Eigen::VectorXd> Fd, Ld;   // Z_du^T F_q, Z_du^T L_q

    int Qa() const { return static_cast<int>(Kpp.size()); }
};

/// Bring `red` up to the current basis sizes; only new rows and columns are computed.
/// For compliant problems `dual` is ignored.
void project_operators(ReducedOperators& red, const ReducedBasis& primal, const ReducedBasis* dual,
                       const TruthOperators& ops);
ReducedOperators project_operators(const ReducedBasis& primal, const ReducedBasis* dual, const TruthOperators& ops);

struct RBSolution {
    Eigen::VectorXd uN;
    Eigen::VectorXd psiN; // empty for compliant problems
    double sN = 0.0;
};

/// Dense N x N Galerkin solve (plus dual solve and output correction when non-compliant).
RBSolution online_solve(const ReducedOperators& red, const ThetaValues& theta, int N);

Eigen::MatrixXd reduced_stiffness(const ReducedOperators& red, const Eigen::VectorXd& theta_a, int N);

Eigen::VectorXd reconstruct(const ReducedBasis& basis, const Eigen::VectorXd& uN);

double reduced_condition_number(const ReducedOperators& red, const Eigen::VectorXd& theta_a, int N);

} // namespace rbe
