#include "rbelast/sif.hpp"

#include "rbelast/errors.hpp"

#include <cmath>
#include <string>
#include <tuple>

namespace rbe {

double err_fd(double s_mu, double s_mu_step, double delta_mu1, ErrSign sign)
{
    if (!(delta_mu1 > 0.0))
        throw StepLeavesDomain("finite-difference step must be positive");
    return static_cast<double>(static_cast<int>(sign)) * (s_mu_step - s_mu) / delta_mu1;
}

Param crack_step(const ParamBox& box, const Param& mu, double delta_mu1)
{
    if (!(delta_mu1 > 0.0))
        throw StepLeavesDomain("finite-difference step must be positive");
    Param next = mu;
    next.at(0) += delta_mu1;
    if (!box.contains(mu) || !box.contains(next))
        throw StepLeavesDomain("mu_1 = " + std::to_string(mu[0]) + " + " + std::to_string(delta_mu1) +
                               " is outside the parameter box");
    return next;
}

std::pair<double, double> err_rb_bound(const RBModel& model, const Param& mu, int N, double delta_mu1, ErrSign sign)
{
    if (!model.compliant)
        throw WrongProblemKind("energy release rate needs a compliant output");
    const Param next = crack_step(model.theta.box(), mu, delta_mu1);
    const auto a = model.query(mu, N);
    const auto b = model.query(next, N);
    // s_N <= s <= s_N + Delta at both points
    double G = 0.0;
    if (sign == ErrSign::Negative)
        G = (a.sN - b.sN - b.deltaN) / delta_mu1;
    else
        G = (b.sN - a.sN - a.deltaN) / delta_mu1;
    const double dG = (a.deltaN + b.deltaN) / delta_mu1;
    return {G, dG};
}

std::pair<double, double> sif_from_err(double G, double dG, double nu)
{
    if (G - dG < 0.0)
        throw NegativeEnergyRelease("G = " + std::to_string(G) + " is below its bound " + std::to_string(dG));
    const double c = 2.0 * std::sqrt(1.0 - nu * nu);
    const double hi = std::sqrt(G + dG), lo = std::sqrt(G - dG);
    return {(hi + lo) / c, (hi - lo) / c};
}

SifResult sif_rb(const RBModel& model, const Param& mu, int N, double nu, double delta_mu1, ErrSign sign)
{
    SifResult r;
    r.delta_mu1 = delta_mu1;
    std::tie(r.G_N, r.dG) = err_rb_bound(model, mu, N, delta_mu1, sign);
    std::tie(r.SIF_N, r.dSIF) = sif_from_err(r.G_N, r.dG, nu);
    return r;
}

} // namespace rbe
