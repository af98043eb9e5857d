#include "rbelast/eigensolve.hpp"
#include "rbelast/errors.hpp"
#include "rbelast/problems.hpp"
#include "rbelast/truth.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <random>

using namespace rbe;

namespace {

std::vector<VolumeForm> forms_of(const ElasticTensor& S)
{
    std::vector<VolumeForm> out;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            if (S.coeff[0](i, j) != 0.0)
                out.push_back({.region = 1, .slot_a = i, .slot_b = j, .coef = S.coeff[0](i, j)});
    return out;
}

// Unit square, E = mu_0, nu = 0.3; u1 = 0 on the left, u2 = 0 on the bottom, unit pull on the right.
struct Patch {
    Mesh mesh;
    std::vector<BoundaryCondition> bcs;
    AffineDecomposition decomp;
    TruthOperators ops;
};

Patch make_patch(bool with_output)
{
    Patch p;
    p.mesh = generate_structured_rect(6, 5, [](int, int) { return 1; }, 0.8);
    MaterialExpr m;
    m.E1 = Expr::param(0);
    m.nu12 = 0.3;
    const std::vector<RegionSetup> regions{{m, identity_map()}};
    p.bcs = {BoundaryCondition::dirichlet(4, true, false), BoundaryCondition::dirichlet(1, false, true),
             BoundaryCondition::traction(2, 1.0, 0.0)};
    if (with_output)
        p.bcs.push_back(BoundaryCondition::output(3, 0.0, 1.0));
    const ParamBox box{{1.0}, {4.0}};
    p.decomp = collapse_decomposition(expand_forms(p.mesh, regions, p.bcs), box, {2.0}, !with_output, false);
    p.ops = assemble_parameter_independent(p.mesh, p.decomp, p.bcs);
    build_inner_product(p.ops, p.decomp.theta, {2.0});
    return p;
}

double nodal(const TruthOperators& ops, const Eigen::VectorXd& u, int node, int comp)
{
    const int d = ops.dofs(node, comp);
    return d < 0 ? 0.0 : u(d);
}

} // namespace

TEST_CASE("element matrix: symmetry, rigid-body null space and the B^T E B oracle")
{
    MaterialSpec s;
    s.mode = MaterialMode::PlaneStressOrthotropic;
    s.E1 = 3.0;
    s.E2 = 1.0;
    s.nu12 = 0.25;
    s.theta = 0.6;
    const auto forms = forms_of(build_Sa(s));
    const std::array<Eigen::Vector2d, 3> x{Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(1.3, 0.4),
                                           Eigen::Vector2d(0.5, 1.1)};
    Eigen::Matrix<double, 6, 6> K = Eigen::Matrix<double, 6, 6>::Zero();
    for (const auto& f : forms)
        K += element_matrix(x, f);
    CHECK((K - K.transpose()).norm() < 1e-13 * K.norm());

    Eigen::Matrix<double, 6, 3> rigid;
    for (int k = 0; k < 3; ++k) {
        rigid.row(2 * k) << 1, 0, -x[k].y();
        rigid.row(2 * k + 1) << 0, 1, x[k].x();
    }
    CHECK((K * rigid).norm() < 1e-13 * K.norm());

    Eigen::Matrix3d M;
    for (int k = 0; k < 3; ++k)
        M.row(k) << 1.0, x[k].x(), x[k].y();
    const Eigen::Matrix3d C = M.inverse();
    Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
    for (int k = 0; k < 3; ++k) {
        B(0, 2 * k) = C(1, k);
        B(1, 2 * k + 1) = C(2, k);
        B(2, 2 * k) = C(2, k);
        B(2, 2 * k + 1) = C(1, k);
    }
    const Eigen::Matrix<double, 6, 6> oracle = 0.5 * std::abs(M.determinant()) * B.transpose() * build_E_matrix(s) * B;
    CHECK((K - oracle).norm() < 1e-13 * oracle.norm());

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(K);
    CHECK(std::abs(es.eigenvalues()(2)) < 1e-12 * es.eigenvalues()(5));
    CHECK(es.eigenvalues()(3) > 1e-6 * es.eigenvalues()(5));
}

TEST_CASE("uniaxial patch test is reproduced exactly")
{
    Patch p = make_patch(false);
    TruthSolver solver(p.ops, p.decomp.theta);
    for (double E : {1.0, 2.5, 4.0}) {
        const TruthSolution sol = solver.solve({E});
        double err = 0.0;
        for (std::size_t n = 0; n < p.mesh.n_nodes(); ++n) {
            const Eigen::Vector2d& x = p.mesh.nodes[n];
            err = std::max(err, std::abs(nodal(p.ops, sol.u, static_cast<int>(n), 0) - x.x() / E));
            err = std::max(err, std::abs(nodal(p.ops, sol.u, static_cast<int>(n), 1) + 0.3 * x.y() / E));
        }
        CHECK(err < 1e-12);
        // compliance: int over the right face of u1
        CHECK(sol.s == doctest::Approx(1.0 / E).epsilon(1e-12));
        CHECK(sol.solve_time >= 0.0);
    }
}

TEST_CASE("dual problem and shared factorization")
{
    Patch p = make_patch(true);
    REQUIRE_FALSE(p.ops.compliant);
    TruthSolver solver(p.ops, p.decomp.theta);
    const Param mu{3.0};
    const TruthSolution pr = solver.solve(mu);
    // l(u) = int_top u2 = -0.3 / E
    CHECK(pr.s == doctest::Approx(-0.1).epsilon(1e-12));
    const TruthSolution du = solver.solve_dual(mu);
    const auto [pr2, du2] = solver.solve_both(mu);
    CHECK((pr2.u - pr.u).norm() < 1e-14);
    CHECK((du2.u - du.u).norm() < 1e-14);
    const SpMat K = solver.stiffness(mu);
    const Eigen::VectorXd L = combine(p.ops.Lq, p.decomp.theta.eval(mu).l);
    CHECK((K * du.u + L).norm() < 1e-10 * L.norm());
    // F(psi) = -l(u)
    const Eigen::VectorXd F = combine(p.ops.Fq, p.decomp.theta.eval(mu).f);
    CHECK(F.dot(du.u) == doctest::Approx(-pr.s).epsilon(1e-10));
}

TEST_CASE("truth solver errors")
{
    const Mesh mesh = generate_structured_rect(3, 3, [](int, int) { return 1; });
    MaterialExpr m;
    const std::vector<RegionSetup> regions{{m, identity_map()}};
    const ParamBox box{{1.0}, {2.0}};

    // nothing fixed: rigid motions make Y singular
    const std::vector<BoundaryCondition> free_bcs{BoundaryCondition::traction(2, 1.0, 0.0)};
    auto d = collapse_decomposition(expand_forms(mesh, regions, free_bcs), box, {1.0}, true, false);
    TruthOperators ops = assemble_parameter_independent(mesh, d, free_bcs);
    CHECK_THROWS_AS(build_inner_product(ops, d.theta, {1.0}), NotSPD);

    const std::vector<BoundaryCondition> bad{BoundaryCondition::dirichlet(4, true, true),
                                             BoundaryCondition::traction(9, 1.0, 0.0)};
    CHECK_THROWS_AS(expand_forms(mesh, regions, bad), MissingTag);
}

TEST_CASE("Krylov extremal eigenvalues agree with a dense solve")
{
    const ProblemSpec p = build_problem("woven_composite", {.resolution = Resolution::Coarse});
    TruthOperators ops = assemble_parameter_independent(p.mesh, p.decomp, p.bcs);
    const SpMat Y = build_inner_product(ops, p.decomp.theta, p.mu_ref);
    REQUIRE(ops.N_h > kDenseEigThreshold);
    const YFactor Yf(Y);
    const Eigen::MatrixXd Yd(Y);

    std::vector<SpMat> mats;
    for (const Param& mu : uniform_sample(p.box, 2, 8))
        mats.push_back(combine(ops.Kq, p.decomp.theta.eval(mu).a));
    mats.push_back(ops.Kq[0]); // semi-definite single term
    mats.push_back(ops.Kq[1] - ops.Kq[0]);

    for (const SpMat& A : mats) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(Eigen::MatrixXd(A), Yd);
        const double lo = dense.eigenvalues()(0), hi = dense.eigenvalues()(ops.N_h - 1);
        const double scale = std::max(std::abs(lo), std::abs(hi));
        const ExtremalEigs e = extremal_generalized_eigs(A, Yf);
        CHECK(std::abs(e.lo.lambda - lo) < 1e-6 * scale);
        CHECK(std::abs(e.hi.lambda - hi) < 1e-6 * scale);
        CHECK(e.y_min <= lo + 1e-12 * scale);
        CHECK(e.y_max >= hi - 1e-12 * scale);
        CHECK(e.lo.chi.dot(Y * e.lo.chi) == doctest::Approx(1.0).epsilon(1e-10));
    }

    const EigPair s = smallest_generalized_eig(mats[0], Yf, 1e-10);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(Eigen::MatrixXd(mats[0]), Yd,
                                                                    Eigen::EigenvaluesOnly);
    CHECK(s.lambda == doctest::Approx(dense.eigenvalues()(0)).epsilon(1e-9));
    CHECK(s.lambda - s.residual <= dense.eigenvalues()(0) + 1e-12);
}

TEST_CASE("dense path below the threshold")
{
    const ProblemSpec p = build_problem("multi_material", {.resolution = Resolution::Coarse});
    TruthOperators ops = assemble_parameter_independent(p.mesh, p.decomp, p.bcs);
    const SpMat Y = build_inner_product(ops, p.decomp.theta, p.mu_ref);
    REQUIRE(ops.N_h < kDenseEigThreshold);
    const YFactor Yf(Y);
    const SpMat A = combine(ops.Kq, p.decomp.theta.eval(p.box.hi).a);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(Eigen::MatrixXd(A), Eigen::MatrixXd(Y),
                                                                    Eigen::EigenvaluesOnly);
    const auto [lo, hi] = generalized_eig_bounds(A, Yf, 1e-10);
    CHECK(lo.lambda == doctest::Approx(dense.eigenvalues()(0)).epsilon(1e-10));
    CHECK(hi.lambda == doctest::Approx(dense.eigenvalues()(ops.N_h - 1)).epsilon(1e-10));
    // Y itself has every eigenvalue equal to one
    const EigPair one = smallest_generalized_eig(Y, Yf);
    CHECK(one.lambda == doctest::Approx(1.0).epsilon(1e-12));
}
