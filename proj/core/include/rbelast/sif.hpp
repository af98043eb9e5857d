#pragma once

#include "rbelast/model.hpp"

namespace rbe {

inline constexpr double kDefaultCrackStep = 1e-3;

/// Sign of the energy release rate relative to the output slope in mu_1:
/// Negative gives G = -(s(mu+d) - s(mu))/d, Positive gives G = (s(mu+d) - s(mu))/d.
enum class ErrSign { Negative = -1, Positive = 1 };

struct SifResult {
    double G_N = 0.0;
    double dG = 0.0;
    double SIF_N = 0.0;
    double dSIF = 0.0;
    double delta_mu1 = kDefaultCrackStep;
};

/// Forward difference of two outputs. Throws StepLeavesDomain for a non-positive step.
double err_fd(double s_mu, double s_mu_step, double delta_mu1, ErrSign sign = ErrSign::Negative);

/// Shift of mu by delta in the first component; throws StepLeavesDomain if it leaves the box.
Param crack_step(const ParamBox& box, const Param& mu, double delta_mu1);

/// Certified ERR: G_N is the lower end of the interval implied by the two output bounds, dG its width.
std::pair<double, double> err_rb_bound(const RBModel& model, const Param& mu, int N,
                                       double delta_mu1 = kDefaultCrackStep, ErrSign sign = ErrSign::Negative);

/// Half-sum and half-difference of sqrt((G +- dG) / (1 - nu^2)). Throws NegativeEnergyRelease if G < dG.
std::pair<double, double> sif_from_err(double G, double dG, double nu);

SifResult sif_rb(const RBModel& model, const Param& mu, int N, double nu, double delta_mu1 = kDefaultCrackStep,
                 ErrSign sign = ErrSign::Negative);

} // namespace rbe
