#include "rbelast/errors.hpp"
#include "rbelast/lp.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <limits>
#include <random>

using namespace rbe;

namespace {

// Brute force: every choice of n active rows among A x >= b and the bounds.
double vertex_enumeration(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi)
{
    const int n = static_cast<int>(c.size()), m = static_cast<int>(A.rows());
    Eigen::MatrixXd G(m + 2 * n, n);
    Eigen::VectorXd h(m + 2 * n);
    G << A, Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
    h << b, lo, -hi;
    const int rows = static_cast<int>(G.rows());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pick(n);
    auto rec = [&](auto&& self, int start, int depth) -> void {
        if (depth == n) {
            Eigen::MatrixXd S(n, n);
            Eigen::VectorXd r(n);
            for (int k = 0; k < n; ++k) {
                S.row(k) = G.row(pick[k]);
                r(k) = h(pick[k]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
            if (lu.rank() < n)
                return;
            const Eigen::VectorXd x = lu.solve(r);
            if (((G * x - h).array() >= -1e-9).all())
                best = std::min(best, c.dot(x));
            return;
        }
        for (int i = start; i < rows; ++i) {
            pick[depth] = i;
            self(self, i + 1, depth + 1);
        }
    };
    rec(rec, 0, 0);
    return best;
}

} // namespace

TEST_CASE("box-only LP picks the cheaper end of each coordinate")
{
    Eigen::VectorXd c(4), lo(4), hi(4);
    c << 1.0, -2.0, 0.5, -0.1;
    lo << -1.0, 0.0, 2.0, -3.0;
    hi << 1.0, 5.0, 4.0, 3.0;
    const LPResult r = lp_minimize(c, Eigen::MatrixXd(0, 4), Eigen::VectorXd(0), lo, hi);
    Eigen::VectorXd expect(4);
    expect << -1.0, 5.0, 2.0, 3.0;
    CHECK((r.x - expect).norm() < 1e-12);
    CHECK(r.value == doctest::Approx(c.dot(expect)));
}

TEST_CASE("random LPs agree with vertex enumeration")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 3, m = 1 + trial % 6;
        Eigen::VectorXd c(n), lo(n), hi(n), x0(n);
        Eigen::MatrixXd A(m, n);
        for (int i = 0; i < n; ++i) {
            c(i) = u(rng);
            lo(i) = -1.0 + 0.5 * u(rng);
            hi(i) = 1.0 + 0.5 * u(rng);
            x0(i) = 0.5 * u(rng);
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                A(i, j) = u(rng);
        // feasible by construction: x0 satisfies every row with some slack
        Eigen::VectorXd b = A * x0;
        for (int i = 0; i < m; ++i)
            b(i) -= 0.3 * std::abs(u(rng));
        CAPTURE(trial);
        const LPResult r = lp_minimize(c, A, b, lo, hi);
        CHECK(r.value == doctest::Approx(vertex_enumeration(c, A, b, lo, hi)).epsilon(1e-9));
        CHECK(((A * r.x - b).array() >= -1e-9).all());
        CHECK(((r.x - lo).array() >= -1e-12).all());
        CHECK(((hi - r.x).array() >= -1e-12).all());
        CHECK(c.dot(r.x) == doctest::Approx(r.value));
    }
}

TEST_CASE("degenerate LP: many constraints through one vertex")
{
    // every row passes through (0.5, 0.5, 0.5)
    const int n = 3, m = 40;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd A(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            A(i, j) = u(rng);
    const Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 0.5);
    const Eigen::VectorXd b = A * v;
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(n), hi = Eigen::VectorXd::Ones(n);
    for (int k = 0; k < 20; ++k) {
        Eigen::VectorXd c(n);
        c << u(rng), u(rng), u(rng);
        const LPResult r = lp_minimize(c, A, b, lo, hi);
        CHECK(r.value == doctest::Approx(vertex_enumeration(c, A, b, lo, hi)).epsilon(1e-9));
    }
}

TEST_CASE("infeasible LP")
{
    Eigen::VectorXd c(2), lo(2), hi(2), b(1);
    c << 1.0, 1.0;
    lo << 0.0, 0.0;
    hi << 1.0, 1.0;
    Eigen::MatrixXd A(1, 2);
    A << 1.0, 1.0;
    b << 2.5;
    CHECK_THROWS_AS(lp_minimize(c, A, b, lo, hi), LPInfeasible);
    b << 2.0;
    CHECK(lp_minimize(c, A, b, lo, hi).value == doctest::Approx(2.0));
}
