#pragma once

#include "rbelast/eigensolve.hpp"
#include "rbelast/rb.hpp"

#include <Eigen/Core>

#include <vector>

namespace rbe {

/// Online part of the residual dual norm.
///
/// Column c of the pseudo-solution set is P^f_c (c < Qf) or P^a_{q,n} = Y^{-1} K_q zeta_n at
/// c = Qf + n*Qa + q, so the leading columns are those of any smaller basis. G holds all
/// Y inner products of these columns (the blocks CFF, CFA, CAA); R is an upper-trapezoidal
/// factor with R^T R = G obtained from a Y-orthonormal QR of the columns, which evaluates
/// the same quadratic form without the cancellation of c^T G c.
struct ResidualFactor {
    int Qf = 0, Qa = 0, N = 0;
    Eigen::MatrixXd G;
    Eigen::MatrixXd R;
    std::vector<int> rank_at; // rows of R used by the first k columns

    int cols(int N_) const { return Qf + Qa * N_; }

    /// Coefficients of the residual in the pseudo-solution columns.
    Eigen::VectorXd coefficients(const Eigen::VectorXd& load_coef, const Eigen::VectorXd& theta_a,
                                 const Eigen::VectorXd& uN) const;

    /// ||residual||^2_{Y^-1} via the factor; never negative.
    double norm_sq(const Eigen::VectorXd& load_coef, const Eigen::VectorXd& theta_a, const Eigen::VectorXd& uN) const;

    /// Same value via c^T G c. Negative roundoff is clamped to 0 (flagged below -1e-14 of the
    /// term scale); below -1e-10 of the scale NegativeNormSquared is thrown.
    double norm_sq_gram(const Eigen::VectorXd& load_coef, const Eigen::VectorXd& theta_a, const Eigen::VectorXd& uN,
                        bool* flagged = nullptr) const;

    Eigen::MatrixXd CFF() const { return G.topLeftCorner(Qf, Qf); }
    /// Inner products of P^f_i with P^a_{q,n}, n < N.
    Eigen::VectorXd CFA(int i, int q) const;
    /// Inner products of P^a_{q,n} with P^a_{q',n'}, n, n' < N.
    Eigen::MatrixXd CAA(int q, int qp) const;
};

/// Offline builder holding truth-sized pseudo-solutions.
class ResidualBuilder {
public:
    ResidualBuilder(const YFactor& Y, const std::vector<Eigen::VectorXd>& loads, const std::vector<SpMat>& Kq);

    /// Add pseudo-solutions for basis columns not yet seen.
    void extend(const Eigen::MatrixXd& Z);

    const ResidualFactor& factor() const { return f_; }

private:
    void add_column(const Eigen::VectorXd& rhs);

    const YFactor& Y_;
    const std::vector<SpMat>& Kq_;
    Eigen::MatrixXd P_, Q_, YQ_;
    int k_ = 0, rank_ = 0;
    ResidualFactor f_;
};

/// Direct Riesz computation ||Y^{-1}(F - K Z u_N)||_Y^2 for testing.
double residual_norm_sq_direct(const YFactor& Y, const SpMat& K, const Eigen::VectorXd& F, const Eigen::VectorXd& u);

double output_bound_compliant(double eps, double alpha_lb);
double output_bound_primal_dual(double eps_pr, double eps_du, double alpha_lb);
/// Delta / |s_truth - s_rb|; throws ZeroError when the two agree to roundoff.
double effectivity(double delta, double s_truth, double s_rb);

} // namespace rbe
