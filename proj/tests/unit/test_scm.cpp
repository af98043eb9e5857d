#include "fixtures.hpp"

#include "rbelast/errors.hpp"
#include "rbelast/scm.hpp"

#include <Eigen/Dense>
#include <doctest.h>

using namespace rbe;
using rbe::testing::trained;

namespace {

double true_alpha(const rbe::testing::Trained& t, const Param& mu)
{
    const SpMat K = combine(t.truth.ops.Kq, t.model.theta.eval(mu).a);
    return smallest_generalized_eig(K, *t.truth.Y, 1e-12).lambda;
}

} // namespace

TEST_CASE("SCM bounds sandwich the coercivity constant")
{
    for (const auto& name : problem_names()) {
        CAPTURE(name);
        const auto& t = trained(name);
        const SCMData& scm = t.model.scm;
        REQUIRE(scm.J() > 0);
        CHECK(scm.basis.rows() == t.model.theta.Qa());
        CHECK((scm.basis.transpose() * scm.basis - Eigen::MatrixXd::Identity(scm.R(), scm.R())).norm() < 1e-12);
        for (const Param& mu : uniform_sample(t.truth.spec.box, 15, 101)) {
            const Eigen::VectorXd th = t.model.theta.eval(mu).a;
            const double a = true_alpha(t, mu);
            const double lb = scm_lower_bound(scm, th, mu);
            const double ub = scm_upper_bound(scm, th, mu);
            CHECK(lb <= a * (1.0 + 1e-9));
            CHECK(ub >= a * (1.0 - 1e-9));
            // fewer constraints can only loosen the lower bound
            CHECK(scm_lower_bound(scm, th, mu, 0) <= lb + 1e-12 * std::abs(a));
        }
    }
}

TEST_CASE("lower bound is tight at a constraint point")
{
    const auto& t = trained("center_crack");
    const SCMData& scm = t.model.scm;
    for (int j = 0; j < scm.J(); ++j) {
        const Param& mu = scm.mu[j];
        const Eigen::VectorXd th = t.model.theta.eval(mu).a;
        const double lb = scm_lower_bound(scm, th, mu);
        CHECK(lb >= scm.alpha[j] * (1.0 - 1e-9));
        CHECK(lb <= true_alpha(t, mu) * (1.0 + 1e-9));
    }
}

TEST_CASE("without constraints the lower bound is the per-coordinate box minimum")
{
    const auto& t = trained("multi_material");
    const SCMData& scm = t.model.scm;
    for (const Param& mu : uniform_sample(t.truth.spec.box, 10, 5)) {
        const Eigen::VectorXd th = t.model.theta.eval(mu).a;
        const Eigen::VectorXd phi = scm.basis.transpose() * th;
        double expect = 0.0;
        for (int r = 0; r < scm.R(); ++r)
            expect += std::min(phi(r) * scm.y_min(r), phi(r) * scm.y_max(r));
        CHECK(scm_lower_bound(scm, th, mu, 0) == doctest::Approx(expect).epsilon(1e-10));
        CHECK_THROWS_AS(scm_upper_bound(scm, th, mu, 0), EmptyConstraintSet);
    }
}

TEST_CASE("adding a constraint makes the bound exact there")
{
    const auto& t = trained("multi_material");
    SCMData scm = t.model.scm;
    const Param mu = uniform_sample(t.truth.spec.box, 1, 999).front();
    scm_add_constraint(scm, t.model.theta, t.truth.ops, *t.truth.Y, mu);
    CHECK(scm.J() == t.model.scm.J() + 1);
    const Eigen::VectorXd th = t.model.theta.eval(mu).a;
    const double a = true_alpha(t, mu);
    CHECK(scm_lower_bound(scm, th, mu) == doctest::Approx(a).epsilon(1e-6));
    CHECK(scm_upper_bound(scm, th, mu) == doctest::Approx(a).epsilon(1e-6));
}

TEST_CASE("nearest constraints are sorted by scaled distance")
{
    const auto& t = trained("woven_composite");
    const SCMData& scm = t.model.scm;
    const Param mu = scm.box.centroid();
    const auto idx = nearest_constraints(scm, mu, 5);
    REQUIRE(idx.size() == std::min<std::size_t>(5, scm.mu.size()));
    for (std::size_t k = 1; k < idx.size(); ++k)
        CHECK(scm.box.scaled_distance(mu, scm.mu[idx[k - 1]]) <= scm.box.scaled_distance(mu, scm.mu[idx[k]]));
    for (int j = 0; j < scm.J(); ++j)
        if (std::find(idx.begin(), idx.end(), j) == idx.end())
            CHECK(scm.box.scaled_distance(mu, scm.mu[j]) >= scm.box.scaled_distance(mu, scm.mu[idx.back()]));
}
