#include "rbelast/model.hpp"

#include "rbelast/errors.hpp"

#include <chrono>
#include <cmath>

namespace rbe {

AlphaBound coercivity_bound(const SCMData& scm, const Eigen::VectorXd& theta_a, const Param& mu)
{
    AlphaBound a;
    a.ub = scm_upper_bound(scm, theta_a, mu);
    const double lb = scm_lower_bound(scm, theta_a, mu);
    if (lb > 0.0) {
        a.value = lb;
    } else {
        a.value = a.ub;
        a.rigorous = false;
    }
    return a;
}

namespace {

CertifiedOutput certify(const RBModel& m, const ThetaValues& th, int N, double alpha, double alpha_ub, bool rigorous)
{
    if (N < 1 || N > m.N_max())
        throw BadN("N = " + std::to_string(N) + " outside [1, " + std::to_string(m.N_max()) + "]");
    CertifiedOutput out;
    out.N = N;
    const auto sol = online_solve(m.red, th, N);
    out.sN = sol.sN;
    out.eps_pr = std::sqrt(m.res_pr.norm_sq(th.f, th.a, sol.uN));
    out.alphaLB = alpha;
    out.alphaUB = alpha_ub;
    out.rigorous = rigorous;
    if (m.compliant) {
        out.deltaN = output_bound_compliant(out.eps_pr, alpha);
    } else {
        out.eps_du = std::sqrt(m.res_du.norm_sq(-th.l, th.a, sol.psiN));
        out.deltaN = output_bound_primal_dual(out.eps_pr, out.eps_du, alpha);
    }
    return out;
}

} // namespace

CertifiedOutput RBModel::query(const Param& mu, int N) const
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto th = theta.eval(mu);
    const auto a = coercivity_bound(scm, th.a, mu);
    auto out = certify(*this, th, N, a.value, a.ub, a.rigorous);
    out.online_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

CertifiedOutput RBModel::query_with_alpha(const Param& mu, int N, double alpha_lb, bool rigorous) const
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto th = theta.eval(mu);
    auto out = certify(*this, th, N, alpha_lb, alpha_lb, rigorous);
    out.online_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

} // namespace rbe
