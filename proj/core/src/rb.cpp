#include "rbelast/rb.hpp"

#include "rbelast/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>

namespace rbe {

void gram_schmidt_append(ReducedBasis& basis, const Eigen::VectorXd& u, const SpMat& Y, const Param& mu)
{
    if (!u.allFinite())
        throw NearlyDependentSnapshot("snapshot has non-finite entries");
    const double unorm = std::sqrt(u.dot(Y * u));
    Eigen::VectorXd z = u;
    for (int pass = 0; pass < 2 && basis.size() > 0; ++pass)
        z -= basis.Z * (basis.Z.transpose() * (Y * z));
    const double znorm = std::sqrt(std::max(0.0, z.dot(Y * z)));
    if (!(znorm > 1e-10 * unorm))
        throw NearlyDependentSnapshot("remainder " + std::to_string(znorm) + " vs snapshot norm " +
                                      std::to_string(unorm));
    const auto n = basis.Z.cols();
    basis.Z.conservativeResize(u.size(), n + 1);
    basis.Z.col(n) = z / znorm;
    basis.snapshot_params.push_back(mu);
}

namespace {

// Grow a symmetric projection A^T K A where A gained columns [old, new).
void grow_square(Eigen::MatrixXd& M, const Eigen::MatrixXd& KZ, const Eigen::MatrixXd& Z, int old)
{
    const auto N = Z.cols();
    M.conservativeResize(N, N);
    for (auto j = old; j < N; ++j) {
        const Eigen::VectorXd col = Z.transpose() * KZ.col(j);
        M.col(j) = col;
        M.row(j) = col.transpose();
    }
}

void grow_vector(Eigen::VectorXd& v, const Eigen::MatrixXd& Z, const Eigen::VectorXd& F, int old)
{
    const auto N = Z.cols();
    v.conservativeResize(N);
    for (auto j = old; j < N; ++j)
        v[j] = Z.col(j).dot(F);
}

} // namespace

void project_operators(ReducedOperators& red, const ReducedBasis& primal, const ReducedBasis* dual,
                       const TruthOperators& ops)
{
    const int Qa = static_cast<int>(ops.Kq.size());
    red.compliant = ops.compliant;
    if (red.Kpp.empty()) {
        red.Kpp.assign(Qa, Eigen::MatrixXd(0, 0));
        red.Fp.assign(ops.Fq.size(), Eigen::VectorXd(0));
        red.Lp.assign(ops.Lq.size(), Eigen::VectorXd(0));
        if (!ops.compliant) {
            red.Kdd.assign(Qa, Eigen::MatrixXd(0, 0));
            red.Kdp.assign(Qa, Eigen::MatrixXd(0, 0));
            red.Fd.assign(ops.Fq.size(), Eigen::VectorXd(0));
            red.Ld.assign(ops.Lq.size(), Eigen::VectorXd(0));
        }
    }
    const int old = red.N;
    const int N = primal.size();
    if (!ops.compliant && (!dual || dual->size() != N))
        throw BadN("primal and dual bases must have the same size");

    const Eigen::MatrixXd& Zp = primal.Z;
    for (int q = 0; q < Qa; ++q) {
        const Eigen::MatrixXd KZp_new = ops.Kq[q] * Zp.rightCols(N - old);
        Eigen::MatrixXd KZp(Zp.rows(), N);
        KZp.rightCols(N - old) = KZp_new;
        grow_square(red.Kpp[q], KZp, Zp, old);
        if (ops.compliant)
            continue;

        const Eigen::MatrixXd& Zd = dual->Z;
        Eigen::MatrixXd KZd(Zd.rows(), N);
        KZd.rightCols(N - old) = ops.Kq[q] * Zd.rightCols(N - old);
        grow_square(red.Kdd[q], KZd, Zd, old);

        // mixed block: rows dual, columns primal
        auto& M = red.Kdp[q];
        M.conservativeResize(N, N);
        for (int j = old; j < N; ++j) {
            M.col(j) = Zd.transpose() * KZp.col(j); // new primal columns against all dual rows
            M.row(j) = (Zp.transpose() * KZd.col(j)).transpose(); // new dual rows against all primal
        }
    }
    for (std::size_t q = 0; q < ops.Fq.size(); ++q) {
        grow_vector(red.Fp[q], Zp, ops.Fq[q], old);
        if (!ops.compliant)
            grow_vector(red.Fd[q], dual->Z, ops.Fq[q], old);
    }
    for (std::size_t q = 0; q < ops.Lq.size(); ++q) {
        grow_vector(red.Lp[q], Zp, ops.Lq[q], old);
        grow_vector(red.Ld[q], dual->Z, ops.Lq[q], old);
    }
    red.N = N;
}

ReducedOperators project_operators(const ReducedBasis& primal, const ReducedBasis* dual, const TruthOperators& ops)
{
    ReducedOperators red;
    project_operators(red, primal, dual, ops);
    return red;
}

namespace {

Eigen::MatrixXd sum_blocks(const std::vector<Eigen::MatrixXd>& blocks, const Eigen::VectorXd& c, int N)
{
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t q = 0; q < blocks.size(); ++q)
        A.noalias() += c[static_cast<Eigen::Index>(q)] * blocks[q].topLeftCorner(N, N);
    return A;
}

Eigen::VectorXd sum_vectors(const std::vector<Eigen::VectorXd>& v, const Eigen::VectorXd& c, int N)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
    for (std::size_t q = 0; q < v.size(); ++q)
        out.noalias() += c[static_cast<Eigen::Index>(q)] * v[q].head(N);
    return out;
}

Eigen::VectorXd dense_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
{
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    if (!(lu.rcond() > 1e-14))
        throw SingularReducedSystem("reciprocal condition estimate " + std::to_string(lu.rcond()));
    return lu.solve(b);
}

} // namespace

Eigen::MatrixXd reduced_stiffness(const ReducedOperators& red, const Eigen::VectorXd& theta_a, int N)
{
    if (N < 1 || N > red.N)
        throw BadN("N = " + std::to_string(N) + " outside [1, " + std::to_string(red.N) + "]");
    return sum_blocks(red.Kpp, theta_a, N);
}

RBSolution online_solve(const ReducedOperators& red, const ThetaValues& theta, int N)
{
    const Eigen::MatrixXd A = reduced_stiffness(red, theta.a, N);
    const Eigen::VectorXd F = sum_vectors(red.Fp, theta.f, N);
    RBSolution sol;
    sol.uN = dense_solve(A, F);
    if (red.compliant) {
        sol.sN = F.dot(sol.uN);
        return sol;
    }
    const Eigen::MatrixXd Ad = sum_blocks(red.Kdd, theta.a, N);
    const Eigen::VectorXd Ld = sum_vectors(red.Ld, theta.l, N);
    sol.psiN = dense_solve(Ad, -Ld);
    const Eigen::VectorXd Lp = sum_vectors(red.Lp, theta.l, N);
    const Eigen::VectorXd Fd = sum_vectors(red.Fd, theta.f, N);
    const Eigen::MatrixXd Kdp = sum_blocks(red.Kdp, theta.a, N);
    // s_N = l(u_N) - r(psi_N) with r(v) = f(v) - a(u_N, v)
    sol.sN = Lp.dot(sol.uN) - (sol.psiN.dot(Fd) - sol.psiN.dot(Kdp * sol.uN));
    return sol;
}

Eigen::VectorXd reconstruct(const ReducedBasis& basis, const Eigen::VectorXd& uN)
{
    if (uN.size() > basis.size())
        throw BadN("coefficient vector longer than the basis");
    return basis.Z.leftCols(uN.size()) * uN;
}

double reduced_condition_number(const ReducedOperators& red, const Eigen::VectorXd& theta_a, int N)
{
    const Eigen::MatrixXd A = reduced_stiffness(red, theta_a, N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return ev[N - 1] / ev[0];
}

} // namespace rbe
