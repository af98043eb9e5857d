#include "rbelast/eigensolve.hpp"

#include "rbelast/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

namespace rbe {

YFactor::YFactor(const SpMat& Y) : Y_(Y)
{
    llt_.compute(Y_);
    if (llt_.info() != Eigen::Success)
        throw NotSPD("inner-product matrix is not positive definite");
}

Eigen::VectorXd YFactor::apply_Winv(const Eigen::VectorXd& v) const
{
    Eigen::VectorXd x = llt_.permutationP() * v;
    llt_.matrixL().solveInPlace(x);
    return x;
}

Eigen::VectorXd YFactor::apply_WinvT(const Eigen::VectorXd& z) const
{
    Eigen::VectorXd x = z;
    llt_.matrixU().solveInPlace(x);
    return llt_.permutationPinv() * x;
}

Eigen::VectorXd YFactor::apply_W(const Eigen::VectorXd& z) const
{
    const Eigen::VectorXd x = llt_.matrixL() * z;
    return llt_.permutationPinv() * x;
}

Eigen::VectorXd YFactor::apply_WT(const Eigen::VectorXd& v) const
{
    const Eigen::VectorXd x = llt_.permutationP() * v;
    return llt_.matrixU() * x;
}

namespace {

using Op = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

double residual_norm(const SpMat& A, const YFactor& Y, const Eigen::VectorXd& chi, double lambda)
{
    const Eigen::VectorXd r = A * chi - lambda * (Y.Y() * chi);
    return std::sqrt(std::max(0.0, r.dot(Y.solve(r))));
}

std::pair<EigPair, EigPair> dense_bounds(const SpMat& A, const YFactor& Y)
{
    const Eigen::MatrixXd Ad = Eigen::MatrixXd(A);
    const Eigen::MatrixXd Yd = Eigen::MatrixXd(Y.Y());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad, Yd);
    if (es.info() != Eigen::Success)
        throw NoConvergence("dense generalized eigensolver failed");
    const Eigen::Index n = Ad.rows();
    auto pair = [&](Eigen::Index k) {
        EigPair p;
        p.lambda = es.eigenvalues()[k];
        p.chi = es.eigenvectors().col(k);
        p.residual = residual_norm(A, Y, p.chi, p.lambda);
        return p;
    };
    return {pair(0), pair(n - 1)};
}

struct Ritz {
    double theta = 0.0;
    Eigen::VectorXd z;
    double residual = 0.0; // |beta_k s_k|
};

struct LanczosEnds {
    Ritz lo, hi;
    bool converged = false;
};

// Symmetric Lanczos with full reorthogonalization (two passes).
LanczosEnds lanczos(const Op& op, int n, double tol, bool need_lo, bool need_hi, int kmax,
                    const Eigen::VectorXd* start = nullptr)
{
    kmax = std::min(kmax, n);
    Eigen::MatrixXd V(n, kmax);
    std::vector<double> alpha, beta;

    std::mt19937_64 rng(0x1a2c'705eULL);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = gauss(rng);
    if (start) // keep a little of everything else so a poor start cannot hide the end
        v = *start / start->norm() + 1e-3 * v / v.norm();
    V.col(0) = v.normalized();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes;
    LanczosEnds out;
    int k = 0;
    double beta_last = 0.0;
    for (int j = 0; j < kmax; ++j) {
        Eigen::VectorXd w = op(V.col(j));
        alpha.push_back(V.col(j).dot(w));
        for (int pass = 0; pass < 2; ++pass)
            w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
        const double b = w.norm();
        k = j + 1;
        beta_last = b;

        double scale = 0.0;
        for (double x : alpha)
            scale = std::max(scale, std::abs(x));
        for (double x : beta)
            scale = std::max(scale, x);
        const bool breakdown = b <= 1e-13 * std::max(scale, 1e-300) || k == n;

        if (breakdown || k % 5 == 0 || k == kmax) {
            const Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), k);
            const Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), k - 1);
            tes.computeFromTridiagonal(diag, sub);
            const auto& ev = tes.eigenvalues();
            const double spread = std::max({std::abs(ev[0]), std::abs(ev[k - 1]), 1e-300});
            const double r_lo = std::abs(b * tes.eigenvectors()(k - 1, 0));
            const double r_hi = std::abs(b * tes.eigenvectors()(k - 1, k - 1));
            if (breakdown || ((!need_lo || r_lo <= tol * spread) && (!need_hi || r_hi <= tol * spread))) {
                out.converged = true;
                break;
            }
        }
        if (j + 1 < kmax) {
            beta.push_back(b);
            V.col(j + 1) = w / b;
        }
    }

    auto ritz = [&](Eigen::Index i) {
        Ritz r;
        r.theta = tes.eigenvalues()[i];
        r.z = V.leftCols(k) * tes.eigenvectors().col(i);
        r.residual = std::abs(beta_last * tes.eigenvectors()(k - 1, i));
        return r;
    };
    out.lo = ritz(0);
    out.hi = ritz(k - 1);
    return out;
}

constexpr int kRoughSteps = 400;
constexpr double kRoughTol = 1e-3;
constexpr int kRefineSteps = 300;
constexpr int kRefineRounds = 4;

// Refine one end of the spectrum of (A, Y). `side` is +1 for the top, -1 for the bottom.
EigPair refine_end(const SpMat& A, const YFactor& Y, double tol, int side, const Ritz& rough, double scale)
{
    // B = side * (c Y - A) is SPD exactly when c lies beyond that end of the spectrum
    Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
    auto try_shift = [&](double c) {
        const SpMat B = side * (c * Y.Y() - A);
        llt.compute(B);
        return llt.info() == Eigen::Success;
    };
    double margin = std::max({rough.residual, 1e-3 * scale, 1e-12});
    double c = 0.0;
    bool ok = false;
    for (int attempt = 0; attempt < 40 && !ok; ++attempt, margin *= 4.0) {
        c = rough.theta + side * margin;
        ok = try_shift(c);
    }
    if (!ok)
        throw NoConvergence("no shift outside the spectrum found");

    // W^T B^{-1} W has eigenvalues 1 / (side * (c - lambda))
    const Op op = [&](const Eigen::VectorXd& z) {
        const Eigen::VectorXd x = llt.solve(Y.apply_W(z));
        return Y.apply_WT(x);
    };
    EigPair p;
    Eigen::VectorXd start;
    bool converged = false;
    for (int round = 0; round < kRefineRounds; ++round) {
        const auto si = lanczos(op, Y.size(), std::max(tol * 1e-3, 1e-14), false, true, kRefineSteps,
                                round ? &start : nullptr);
        p.chi = Y.apply_WinvT(si.hi.z);
        p.chi /= Y.norm(p.chi);
        // Rayleigh quotient of the normalized vector is at least as accurate as the Ritz value
        p.lambda = p.chi.dot(A * p.chi);
        p.residual = residual_norm(A, Y, p.chi, p.lambda);
        converged = si.converged || p.residual <= tol * scale;
        if (converged || round + 1 == kRefineRounds)
            break;
        // restart from the current vector with the shift moved up to the Rayleigh quotient
        start = si.hi.z;
        const double old = side * (c - p.lambda);
        for (double m = std::max(p.residual, 1e-10 * scale); m < old; m *= 4.0)
            if (try_shift(p.lambda + side * m)) {
                c = p.lambda + side * m;
                break;
            }
        if (side * (c - p.lambda) >= old && !try_shift(c))
            throw NoConvergence("lost the shift factorization");
    }
    // a tight cluster at the end can stall the Ritz vector while the value is already accurate;
    // the widened value lambda -/+ residual stays valid, so only reject a residual that is large
    if (!converged && !(p.residual <= std::max(tol, 1e-6) * scale)) {
        std::ostringstream os;
        os << "shift-invert Lanczos did not converge in " << kRefineRounds << " x " << kRefineSteps
           << " steps (residual " << p.residual << ", scale " << scale << ")";
        throw NoConvergence(os.str());
    }
    return p;
}

std::pair<EigPair, EigPair> krylov_bounds(const SpMat& A, const YFactor& Y, double tol, bool need_hi)
{
    const Op op = [&](const Eigen::VectorXd& z) { return Y.apply_Winv(A * Y.apply_WinvT(z)); };
    const auto rough = lanczos(op, Y.size(), kRoughTol, true, need_hi, kRoughSteps);
    const double scale = std::max({std::abs(rough.lo.theta), std::abs(rough.hi.theta), 1e-300});
    EigPair lo = refine_end(A, Y, tol, -1, rough.lo, scale);
    EigPair hi;
    if (need_hi)
        hi = refine_end(A, Y, tol, +1, rough.hi, scale);
    return {std::move(lo), std::move(hi)};
}

} // namespace

std::pair<EigPair, EigPair> generalized_eig_bounds(const SpMat& A, const YFactor& Y, double tol)
{
    if (Y.size() < kDenseEigThreshold)
        return dense_bounds(A, Y);
    return krylov_bounds(A, Y, tol, true);
}

EigPair smallest_generalized_eig(const SpMat& A, const YFactor& Y, double tol)
{
    if (Y.size() < kDenseEigThreshold)
        return dense_bounds(A, Y).first;
    return krylov_bounds(A, Y, tol, false).first;
}

ExtremalEigs extremal_generalized_eigs(const SpMat& A, const YFactor& Y, double tol)
{
    auto [lo, hi] = generalized_eig_bounds(A, Y, tol);
    ExtremalEigs out;
    // Ritz values sit inside the spectrum; push out by the residual and a relative margin
    out.y_min = lo.lambda - lo.residual;
    out.y_max = hi.lambda + hi.residual;
    out.y_min -= 1e-6 * (std::abs(out.y_min) + 1.0);
    out.y_max += 1e-6 * (std::abs(out.y_max) + 1.0);
    out.lo = std::move(lo);
    out.hi = std::move(hi);
    return out;
}

} // namespace rbe
