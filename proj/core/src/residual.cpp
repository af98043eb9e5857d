#include "rbelast/residual.hpp"

#include "rbelast/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rbe {

Eigen::VectorXd ResidualFactor::coefficients(const Eigen::VectorXd& load_coef, const Eigen::VectorXd& theta_a,
                                             const Eigen::VectorXd& uN) const
{
    const int n = static_cast<int>(uN.size());
    if (n > N)
        throw BadN("residual data built for N <= " + std::to_string(N));
    Eigen::VectorXd c(cols(n));
    c.head(Qf) = load_coef;
    for (int j = 0; j < n; ++j)
        c.segment(Qf + j * Qa, Qa) = -uN[j] * theta_a;
    return c;
}

double ResidualFactor::norm_sq(const Eigen::VectorXd& load_coef, const Eigen::VectorXd& theta_a,
                               const Eigen::VectorXd& uN) const
{
    const Eigen::VectorXd c = coefficients(load_coef, theta_a, uN);
    const auto k = c.size();
    const int r = rank_at[static_cast<std::size_t>(k)];
    return (R.topLeftCorner(r, k) * c).squaredNorm();
}

double ResidualFactor::norm_sq_gram(const Eigen::VectorXd& load_coef, const Eigen::VectorXd& theta_a,
                                    const Eigen::VectorXd& uN, bool* flagged) const
{
    const Eigen::VectorXd c = coefficients(load_coef, theta_a, uN);
    const auto k = c.size();
    const auto Gk = G.topLeftCorner(k, k);
    const double e2 = c.dot(Gk * c);
    const double scale = c.cwiseAbs().dot(Gk.cwiseAbs() * c.cwiseAbs());
    if (flagged)
        *flagged = e2 < -1e-14 * scale;
    if (e2 < -1e-10 * scale)
        throw NegativeNormSquared(std::to_string(e2) + " against term scale " + std::to_string(scale));
    return std::max(e2, 0.0);
}

Eigen::VectorXd ResidualFactor::CFA(int i, int q) const
{
    Eigen::VectorXd v(N);
    for (int n = 0; n < N; ++n)
        v[n] = G(i, Qf + n * Qa + q);
    return v;
}

Eigen::MatrixXd ResidualFactor::CAA(int q, int qp) const
{
    Eigen::MatrixXd M(N, N);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < N; ++m)
            M(n, m) = G(Qf + n * Qa + q, Qf + m * Qa + qp);
    return M;
}

ResidualBuilder::ResidualBuilder(const YFactor& Y, const std::vector<Eigen::VectorXd>& loads,
                                 const std::vector<SpMat>& Kq)
    : Y_(Y), Kq_(Kq)
{
    f_.Qf = static_cast<int>(loads.size());
    f_.Qa = static_cast<int>(Kq.size());
    f_.rank_at.push_back(0);
    for (const auto& F : loads)
        add_column(F);
}

void ResidualBuilder::add_column(const Eigen::VectorXd& rhs)
{
    const auto n = rhs.size();
    const Eigen::VectorXd p = Y_.solve(rhs);
    if (P_.cols() <= k_) {
        const auto cap = std::max<Eigen::Index>(2 * P_.cols(), 16);
        P_.conservativeResize(n, cap);
        Q_.conservativeResize(n, cap);
        YQ_.conservativeResize(n, cap);
    }
    P_.col(k_) = p;

    // Gram column: (p_i, p)_Y = p_i^T rhs
    const Eigen::VectorXd g = P_.leftCols(k_ + 1).transpose() * rhs;
    f_.G.conservativeResize(k_ + 1, k_ + 1);
    f_.G.col(k_) = g;
    f_.G.row(k_) = g.transpose();

    // CGS2 in the Y inner product
    Eigen::VectorXd z = p;
    Eigen::VectorXd rcol = Eigen::VectorXd::Zero(rank_ + 1);
    for (int pass = 0; pass < 2 && rank_ > 0; ++pass) {
        const Eigen::VectorXd h = YQ_.leftCols(rank_).transpose() * z;
        z -= Q_.leftCols(rank_) * h;
        rcol.head(rank_) += h;
    }
    const double pnorm = std::sqrt(std::max(0.0, p.dot(rhs)));
    const Eigen::VectorXd Yz = Y_.Y() * z;
    const double znorm = std::sqrt(std::max(0.0, z.dot(Yz)));
    int rank = rank_;
    if (znorm > 1e-13 * pnorm && znorm > 0.0) {
        Q_.col(rank_) = z / znorm;
        YQ_.col(rank_) = Yz / znorm;
        rcol[rank_] = znorm;
        rank = rank_ + 1;
    }
    f_.R.conservativeResize(rank, k_ + 1);
    if (rank > rank_)
        f_.R.row(rank_).setZero();
    f_.R.col(k_) = rcol.head(rank);
    rank_ = rank;
    ++k_;
    f_.rank_at.push_back(rank_);
}

void ResidualBuilder::extend(const Eigen::MatrixXd& Z)
{
    for (auto n = f_.N; n < Z.cols(); ++n) {
        for (int q = 0; q < f_.Qa; ++q)
            add_column(Kq_[q] * Z.col(n));
        f_.N = static_cast<int>(n + 1);
    }
}

double residual_norm_sq_direct(const YFactor& Y, const SpMat& K, const Eigen::VectorXd& F, const Eigen::VectorXd& u)
{
    const Eigen::VectorXd r = F - K * u;
    return r.dot(Y.solve(r));
}

double output_bound_compliant(double eps, double alpha_lb)
{
    if (!(alpha_lb > 0.0))
        throw NonPositiveAlpha("alpha_LB = " + std::to_string(alpha_lb));
    return eps * eps / alpha_lb;
}

double output_bound_primal_dual(double eps_pr, double eps_du, double alpha_lb)
{
    if (!(alpha_lb > 0.0))
        throw NonPositiveAlpha("alpha_LB = " + std::to_string(alpha_lb));
    return (eps_pr / std::sqrt(alpha_lb)) * (eps_du / std::sqrt(alpha_lb));
}

double effectivity(double delta, double s_truth, double s_rb)
{
    const double err = std::abs(s_truth - s_rb);
    if (err <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(s_truth), std::abs(s_rb)))
        throw ZeroError("truth and reduced outputs agree to roundoff");
    return delta / err;
}

} // namespace rbe
