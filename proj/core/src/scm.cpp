#include "rbelast/scm.hpp"

#include "rbelast/errors.hpp"
#include "rbelast/lp.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rbe {

std::vector<int> nearest_constraints(const SCMData& scm, const Param& mu, int M)
{
    std::vector<int> idx(scm.mu.size());
    std::iota(idx.begin(), idx.end(), 0);
    const auto m = std::min<std::size_t>(static_cast<std::size_t>(std::max(M, 0)), idx.size());
    std::vector<double> dist(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j)
        dist[j] = scm.box.scaled_distance(mu, scm.mu[j]);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m), idx.end(), [&](int a, int b) {
        return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)] ||
               (dist[static_cast<std::size_t>(a)] == dist[static_cast<std::size_t>(b)] && a < b);
    });
    idx.resize(m);
    return idx;
}

double scm_lower_bound(const SCMData& scm, const Eigen::VectorXd& theta_a, const Param& mu, int M)
{
    const auto near = nearest_constraints(scm, mu, M < 0 ? scm.M : M);
    const Eigen::VectorXd phi = scm.basis.transpose() * theta_a;
    const auto Q = phi.size();
    Eigen::MatrixXd A(static_cast<Eigen::Index>(near.size()), Q);
    Eigen::VectorXd b(static_cast<Eigen::Index>(near.size()));
    for (std::size_t k = 0; k < near.size(); ++k) {
        A.row(static_cast<Eigen::Index>(k)) = scm.theta[static_cast<std::size_t>(near[k])].transpose();
        b[static_cast<Eigen::Index>(k)] = scm.alpha[static_cast<std::size_t>(near[k])];
    }
    return lp_minimize(phi, A, b, scm.y_min, scm.y_max).value;
}

double scm_upper_bound(const SCMData& scm, const Eigen::VectorXd& theta_a, const Param& mu, int M)
{
    const auto near = nearest_constraints(scm, mu, M < 0 ? scm.M : M);
    if (near.empty())
        throw EmptyConstraintSet("no stored constraints to build an upper bound");
    const Eigen::VectorXd phi = scm.basis.transpose() * theta_a;
    double ub = std::numeric_limits<double>::infinity();
    for (int j : near)
        ub = std::min(ub, phi.dot(scm.ystar[static_cast<std::size_t>(j)]));
    return ub;
}

void scm_add_constraint(SCMData& scm, const ThetaEvaluator& theta, const TruthOperators& ops, const YFactor& Y,
                        const Param& mu)
{
    const auto th = theta.eval(mu);
    const SpMat K = combine(ops.Kq, th.a);
    const auto eig = smallest_generalized_eig(K, Y);
    const double alpha = eig.lambda - eig.residual;
    if (!(alpha > 0.0)) {
        std::ostringstream os;
        os << "smallest eigenvalue " << eig.lambda << " at mu = (";
        for (std::size_t i = 0; i < mu.size(); ++i)
            os << (i ? ", " : "") << mu[i];
        os << ")";
        throw NonCoerciveDetected(os.str());
    }
    Eigen::VectorXd yq(static_cast<Eigen::Index>(ops.Kq.size()));
    for (std::size_t q = 0; q < ops.Kq.size(); ++q)
        yq[static_cast<Eigen::Index>(q)] = eig.chi.dot(ops.Kq[q] * eig.chi);
    Eigen::VectorXd y = scm.basis.transpose() * yq;
    // the eigenvector's Rayleigh quotients always lie in the continuity box; guard against roundoff
    y = y.cwiseMax(scm.y_min).cwiseMin(scm.y_max);
    scm.mu.push_back(mu);
    scm.theta.push_back(scm.basis.transpose() * th.a);
    scm.alpha.push_back(alpha);
    scm.ystar.push_back(y);
}

Eigen::MatrixXd theta_span_basis(const ThetaEvaluator& theta, const std::vector<Param>& sample)
{
    const auto extra = uniform_sample(theta.box(), 4 * static_cast<std::size_t>(theta.Qa()) + 64, 7);
    Eigen::MatrixXd T(static_cast<Eigen::Index>(sample.size() + extra.size()), theta.Qa());
    Eigen::Index row = 0;
    for (const auto* set : {&sample, &extra})
        for (const auto& mu : *set)
            T.row(row++) = theta.eval(mu).a.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(T, Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s[rank] > 1e-14 * s[0])
        ++rank;
    if (rank == T.cols())
        return Eigen::MatrixXd::Identity(T.cols(), T.cols());
    return svd.matrixV().leftCols(std::max<Eigen::Index>(rank, 1));
}

SCMData scm_offline(const ThetaEvaluator& theta, const TruthOperators& ops, const YFactor& Y,
                    const std::vector<Param>& train, const SCMConfig& cfg)
{
    if (train.empty())
        throw EmptyConstraintSet("empty SCM training sample");
    SCMData scm;
    scm.box = theta.box();
    scm.M = cfg.M;
    scm.tol = cfg.tol;
    scm.J_max = cfg.J_max;

    scm.basis = theta_span_basis(theta, train);
    const auto R = static_cast<Eigen::Index>(scm.R());
    scm.y_min.resize(R);
    scm.y_max.resize(R);
    for (Eigen::Index q = 0; q < R; ++q) {
        const Eigen::VectorXd c = scm.basis.col(q);
        const auto ex = extremal_generalized_eigs(combine(ops.Kq, c), Y);
        scm.y_min[q] = ex.y_min;
        scm.y_max[q] = ex.y_max;
    }

    std::vector<Eigen::VectorXd> th(train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
        th[i] = theta.eval(train[i]).a;

    scm_add_constraint(scm, theta, ops, Y, ops.mu_bar.empty() ? scm.box.centroid() : ops.mu_bar);

    // bounds only change at training points whose nearest-M set gains the new constraint
    const auto inf = std::numeric_limits<double>::infinity();
    std::vector<double> lb(train.size()), ub(train.size()), kth(train.size(), inf);
    auto refresh = [&](std::size_t i) {
        const auto near = nearest_constraints(scm, train[i], scm.M);
        kth[i] = static_cast<int>(near.size()) < scm.M ? inf
                                                        : scm.box.scaled_distance(train[i], scm.mu[near.back()]);
        ub[i] = scm_upper_bound(scm, th[i], train[i]);
        lb[i] = scm_lower_bound(scm, th[i], train[i]);
    };
    for (std::size_t i = 0; i < train.size(); ++i)
        refresh(i);

    while (scm.J() < cfg.J_max) {
        double worst = -1.0;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            const double gap = (ub[i] - lb[i]) / std::abs(ub[i]);
            if (gap > worst) {
                worst = gap;
                arg = i;
            }
        }
        scm.max_gap.push_back(worst);
        if (worst <= cfg.tol)
            break;
        scm_add_constraint(scm, theta, ops, Y, train[arg]);
        const Param& added = scm.mu.back();
        for (std::size_t i = 0; i < train.size(); ++i)
            if (scm.box.scaled_distance(train[i], added) < kth[i])
                refresh(i);
    }
    return scm;
}

} // namespace rbe
