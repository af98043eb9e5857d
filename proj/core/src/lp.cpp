#include "rbelast/lp.hpp"

#include "rbelast/errors.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace rbe {

namespace {

constexpr double kPivotTol = 1e-11;

struct Tableau {
    Eigen::MatrixXd T; // constraint rows, then objective row; last column is the rhs
    std::vector<int> basis;
    int pivots = 0;

    Eigen::Index rows() const { return T.rows() - 1; }
    Eigen::Index rhs() const { return T.cols() - 1; }

    void pivot(Eigen::Index r, Eigen::Index c)
    {
        T.row(r) /= T(r, c);
        for (Eigen::Index i = 0; i < T.rows(); ++i)
            if (i != r && T(i, c) != 0.0)
                T.row(i) -= T(i, c) * T.row(r);
        basis[static_cast<std::size_t>(r)] = static_cast<int>(c);
        ++pivots;
    }

    // Minimize the objective row over columns [0, ncols). Dantzig's rule, switching to Bland's
    // rule after a run of degenerate pivots so that cycling cannot occur.
    void run(Eigen::Index ncols)
    {
        const int limit = 50000;
        int degenerate = 0;
        for (int it = 0; it < limit; ++it) {
            const bool bland = degenerate > 50;
            Eigen::Index enter = -1;
            double most = -kPivotTol;
            for (Eigen::Index j = 0; j < ncols; ++j)
                if (T(rows(), j) < most) {
                    enter = j;
                    if (bland)
                        break;
                    most = T(rows(), j);
                }
            if (enter < 0)
                return;
            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < rows(); ++i) {
                if (T(i, enter) <= kPivotTol)
                    continue;
                const double ratio = T(i, rhs()) / T(i, enter);
                if (ratio < best - 1e-14 ||
                    (ratio <= best + 1e-14 && leave >= 0 && basis[i] < basis[static_cast<std::size_t>(leave)])) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave < 0)
                throw LPInfeasible("objective unbounded below; the variable box is not closed");
            degenerate = best <= 1e-14 ? degenerate + 1 : 0;
            pivot(leave, enter);
        }
        throw LPInfeasible("simplex iteration limit reached");
    }
};

} // namespace

LPResult lp_minimize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi)
{
    const Eigen::Index n = c.size(), m = A.rows();
    if ((hi - lo).minCoeff() < 0.0)
        throw LPInfeasible("empty variable box");
    const Eigen::VectorXd u = hi - lo;
    const Eigen::VectorXd bp = b - A * lo; // constraints on z = x - lo

    std::vector<Eigen::Index> art_row;
    for (Eigen::Index i = 0; i < m; ++i)
        if (bp[i] > 0.0)
            art_row.push_back(i);
    const auto na = static_cast<Eigen::Index>(art_row.size());

    // columns: z (n) | surplus s (m) | upper slack t (n) | artificial (na) | rhs
    const Eigen::Index cz = 0, cs = n, ct = n + m, ca = n + m + n, ncol = ca + na;
    Tableau tab;
    tab.T = Eigen::MatrixXd::Zero(m + n + 1, ncol + 1);
    tab.basis.assign(static_cast<std::size_t>(m + n), -1);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (bp[i] > 0.0) {
            // a z - s + art = b'
            tab.T.row(i).segment(cz, n) = A.row(i);
            tab.T(i, cs + i) = -1.0;
            tab.T(i, ca + k) = 1.0;
            tab.T(i, ncol) = bp[i];
            tab.basis[static_cast<std::size_t>(i)] = static_cast<int>(ca + k);
            ++k;
        } else {
            // -a z + s = -b'
            tab.T.row(i).segment(cz, n) = -A.row(i);
            tab.T(i, cs + i) = 1.0;
            tab.T(i, ncol) = -bp[i];
            tab.basis[static_cast<std::size_t>(i)] = static_cast<int>(cs + i);
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        tab.T(m + j, cz + j) = 1.0;
        tab.T(m + j, ct + j) = 1.0;
        tab.T(m + j, ncol) = u[j];
        tab.basis[static_cast<std::size_t>(m + j)] = static_cast<int>(ct + j);
    }

    const Eigen::Index obj = m + n;
    if (na > 0) {
        // phase 1: minimize the artificial sum, objective row expressed in nonbasic variables
        for (Eigen::Index a = 0; a < na; ++a)
            tab.T.row(obj) -= tab.T.row(art_row[static_cast<std::size_t>(a)]);
        for (Eigen::Index a = 0; a < na; ++a)
            tab.T(obj, ca + a) = 0.0;
        tab.run(ncol);
        const double infeas = -tab.T(obj, ncol);
        const double scale = std::max(1.0, bp.cwiseAbs().maxCoeff());
        if (infeas > 1e-9 * scale)
            throw LPInfeasible("constraints are inconsistent (phase-1 residual " + std::to_string(infeas) + ")");
        // move remaining zero-level artificials out of the basis
        for (Eigen::Index i = 0; i < obj; ++i) {
            if (tab.basis[static_cast<std::size_t>(i)] < ca)
                continue;
            for (Eigen::Index j = 0; j < ca; ++j)
                if (std::abs(tab.T(i, j)) > kPivotTol) {
                    tab.pivot(i, j);
                    break;
                }
        }
        // redundant rows keep their artificial basic at zero; zero its column elsewhere by dropping it
        tab.T.middleCols(ca, na).setZero();
        for (Eigen::Index i = 0; i < obj; ++i)
            if (tab.basis[static_cast<std::size_t>(i)] >= ca)
                tab.T.row(i).setZero();
    }

    // phase 2 objective row: c_z with basic columns eliminated
    tab.T.row(obj).setZero();
    tab.T.row(obj).segment(cz, n) = c.transpose();
    for (Eigen::Index i = 0; i < obj; ++i) {
        const auto bcol = tab.basis[static_cast<std::size_t>(i)];
        if (bcol < ca && tab.T(obj, bcol) != 0.0)
            tab.T.row(obj) -= tab.T(obj, bcol) * tab.T.row(i);
    }
    tab.run(ca);

    LPResult res;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < obj; ++i) {
        const auto bcol = tab.basis[static_cast<std::size_t>(i)];
        if (bcol >= cz && bcol < cz + n)
            z[bcol - cz] = tab.T(i, ncol);
    }
    res.x = lo + z.cwiseMax(0.0).cwiseMin(u);
    res.value = c.dot(res.x);
    res.pivots = tab.pivots;
    return res;
}

} // namespace rbe
