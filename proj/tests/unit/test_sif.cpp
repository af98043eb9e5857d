#include "fixtures.hpp"

#include "rbelast/errors.hpp"
#include "rbelast/sif.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rbe;
using rbe::testing::trained;

TEST_CASE("finite-difference energy release rate")
{
    CHECK(err_fd(2.0, 1.5, 0.5) == doctest::Approx(1.0));
    CHECK(err_fd(2.0, 1.5, 0.5, ErrSign::Positive) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(err_fd(1.0, 1.0, 0.0), StepLeavesDomain);

    const ParamBox box{{0.2, 1.0}, {0.5, 2.0}};
    const Param next = crack_step(box, {0.3, 1.5}, 0.01);
    CHECK(next[0] == doctest::Approx(0.31));
    CHECK(next[1] == 1.5);
    CHECK_THROWS_AS(crack_step(box, {0.5, 1.5}, 0.01), StepLeavesDomain);
    CHECK_THROWS_AS(crack_step(box, {0.3, 1.5}, -0.01), StepLeavesDomain);
}

TEST_CASE("stress intensity from an energy release interval")
{
    auto [k, dk] = sif_from_err(4.0, 0.0, 0.0);
    CHECK(k == doctest::Approx(2.0));
    CHECK(dk == doctest::Approx(0.0));
    std::tie(k, dk) = sif_from_err(5.0, 4.0, 0.0);
    CHECK(k == doctest::Approx(2.0));
    CHECK(dk == doctest::Approx(1.0));
    std::tie(k, dk) = sif_from_err(5.0, 4.0, 0.6);
    CHECK(k == doctest::Approx(2.0 / 0.8));
    CHECK(dk == doctest::Approx(1.0 / 0.8));
    CHECK_THROWS_AS(sif_from_err(1.0, 1.5, 0.3), NegativeEnergyRelease);
}

TEST_CASE("certified energy release interval contains the truth value")
{
    const auto& t = trained("center_crack");
    const RBModel& m = t.model;
    const ErrSign sign = t.truth.spec.err_sign;
    const ParamBox& box = t.truth.spec.box;
    ParamBox inner = box;
    inner.hi[0] -= 2 * kDefaultCrackStep;
    int checked = 0;
    for (const Param& mu : uniform_sample(inner, 20, 12)) {
        const double s0 = truth_solve(t.truth.ops, m.theta, mu).s;
        const double s1 = truth_solve(t.truth.ops, m.theta, crack_step(box, mu, kDefaultCrackStep)).s;
        const double G = err_fd(s0, s1, kDefaultCrackStep, sign);
        CHECK(G > 0.0);
        for (int N : {4, m.N_max()}) {
            if (!m.query(mu, N).rigorous)
                continue;
            ++checked;
            const auto [GN, dG] = err_rb_bound(m, mu, N, kDefaultCrackStep, sign);
            CHECK(GN <= G * (1.0 + 1e-9));
            CHECK(G <= (GN + dG) * (1.0 + 1e-9));
        }
    }
    CHECK(checked > 0);

    CHECK_THROWS_AS(err_rb_bound(m, box.hi, m.N_max()), StepLeavesDomain);
    CHECK_THROWS_AS(err_rb_bound(trained("woven_composite").model, trained("woven_composite").truth.spec.box.centroid(), 1),
                    WrongProblemKind);
}

TEST_CASE("short crack in a tall plate approaches the infinite-plate stress intensity")
{
    const ProblemSpec p = build_problem("center_crack", {.resolution = Resolution::Coarse});
    TruthOperators ops = assemble_parameter_independent(p.mesh, p.decomp, p.bcs);
    build_inner_product(ops, p.decomp.theta, p.mu_ref);
    const Param mu{0.3, 2.0};
    const double s0 = truth_solve(ops, p.decomp.theta, mu).s;
    const double s1 = truth_solve(ops, p.decomp.theta, crack_step(p.box, mu, kDefaultCrackStep)).s;
    const double G = err_fd(s0, s1, kDefaultCrackStep, p.err_sign);
    const double K = std::sqrt(G / (1.0 - p.nu * p.nu));
    CHECK(std::abs(K / std::sqrt(std::numbers::pi * 0.3) - 1.0) < 0.1);
}
