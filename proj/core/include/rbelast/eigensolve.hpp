#pragma once

#include "rbelast/truth.hpp"

#include <Eigen/Core>

namespace rbe {

/// Cholesky factor of the inner-product matrix, Y = W W^T with W = P^T L.
class YFactor {
public:
    explicit YFactor(const SpMat& Y);

    const SpMat& Y() const { return Y_; }
    int size() const { return static_cast<int>(Y_.rows()); }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
    Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const { return llt_.solve(B); }
    Eigen::VectorXd apply_Winv(const Eigen::VectorXd& v) const;  // L^{-1} P v
    Eigen::VectorXd apply_WinvT(const Eigen::VectorXd& z) const; // P^T L^{-T} z
    Eigen::VectorXd apply_W(const Eigen::VectorXd& z) const;     // P^T L z
    Eigen::VectorXd apply_WT(const Eigen::VectorXd& v) const;    // L^T P v
    double norm(const Eigen::VectorXd& v) const { return std::sqrt(v.dot(Y_ * v)); }

private:
    SpMat Y_;
    Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
};

struct EigPair {
    double lambda = 0.0;
    Eigen::VectorXd chi;   // chi^T Y chi = 1
    double residual = 0.0; // || A chi - lambda Y chi ||_{Y^{-1}}, bounds the eigenvalue error
};

struct ExtremalEigs {
    double y_min = 0.0, y_max = 0.0; // widened outward
    EigPair lo, hi;
};

/// Below this size the dense generalized solver is used.
inline constexpr int kDenseEigThreshold = 500;

EigPair smallest_generalized_eig(const SpMat& A, const YFactor& Y, double tol = 1e-10);
/// Rough Lanczos locates each end of the spectrum; shift-invert on the SPD matrix +-(A - cY) with c just
/// outside that end then refines it. Residuals are those of the original pencil.
ExtremalEigs extremal_generalized_eigs(const SpMat& A, const YFactor& Y, double tol = 1e-6);

/// Both ends of the spectrum of (A, Y) without widening.
std::pair<EigPair, EigPair> generalized_eig_bounds(const SpMat& A, const YFactor& Y, double tol);

} // namespace rbe
