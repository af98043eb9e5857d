#include "rbelast/truth.hpp"

#include "rbelast/errors.hpp"
#include "rbelast/quadrature.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace rbe {

namespace {

double monomial(const Eigen::Vector2d& p, int m, int n)
{
    double v = 1.0;
    for (int k = 0; k < m; ++k)
        v *= p.x();
    for (int k = 0; k < n; ++k)
        v *= p.y();
    return v;
}

SpMat build_pattern(const Mesh& mesh, const DofMap& dofs)
{
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.triangles.size() * 36);
    for (const auto& tri : mesh.triangles)
        for (int a = 0; a < 6; ++a) {
            const int i = dofs(tri[a / 2], a % 2);
            if (i < 0)
                continue;
            for (int b = 0; b < 6; ++b) {
                const int j = dofs(tri[b / 2], b % 2);
                if (j >= 0)
                    trip.emplace_back(i, j, 0.0);
            }
        }
    SpMat P(dofs.n_free, dofs.n_free);
    P.setFromTriplets(trip.begin(), trip.end());
    P.makeCompressed();
    return P;
}

void check_degree(int m, int n)
{
    if (m < 0 || n < 0 || m + n > kMaxMonomialDegree)
        throw QuadratureDegreeUnsupported("monomial x1^" + std::to_string(m) + " x2^" + std::to_string(n));
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

DofMap build_dof_map(const Mesh& mesh, const std::vector<BoundaryCondition>& bcs)
{
    DofMap d;
    d.index.assign(mesh.nodes.size(), {0, 0});
    for (const auto& bc : bcs) {
        if (bc.kind != BoundaryCondition::Kind::Dirichlet)
            continue;
        bool found = false;
        for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
            if (mesh.edge_tag[e] != bc.tag)
                continue;
            found = true;
            for (int k = 0; k < 2; ++k)
                for (int c = 0; c < 2; ++c)
                    if (bc.fixed[c])
                        d.index[mesh.edges[e][k]][c] = -1;
        }
        if (!found)
            throw MissingTag("Dirichlet tag " + std::to_string(bc.tag) + " has no edges");
    }
    for (auto& node : d.index)
        for (int& i : node)
            i = i < 0 ? -1 : d.n_free++;
    return d;
}

Eigen::Matrix<double, 6, 6> element_matrix(const std::array<Eigen::Vector2d, 3>& x, const VolumeForm& form)
{
    check_degree(form.m, form.n);
    const double area2 = (x[1] - x[0]).x() * (x[2] - x[0]).y() - (x[1] - x[0]).y() * (x[2] - x[0]).x();
    double b[3], c[3];
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        b[i] = (x[j].y() - x[k].y()) / area2;
        c[i] = (x[k].x() - x[j].x()) / area2;
    }
    const int degree = form.m + form.n + (form.slot_a == 4) + (form.slot_b == 4);
    const auto& rule = triangle_rule(degree);

    auto slot_value = [&](int slot, int dof, const std::array<double, 3>& lam) {
        const int i = dof / 2, comp = dof % 2;
        switch (slot) {
        case 0: return comp == 0 ? b[i] : 0.0;
        case 1: return comp == 0 ? c[i] : 0.0;
        case 2: return comp == 1 ? b[i] : 0.0;
        case 3: return comp == 1 ? c[i] : 0.0;
        default: return comp == 0 ? lam[i] : 0.0;
        }
    };

    Eigen::Matrix<double, 6, 6> K = Eigen::Matrix<double, 6, 6>::Zero();
    for (const auto& q : rule) {
        const Eigen::Vector2d p = q.lambda[0] * x[0] + q.lambda[1] * x[1] + q.lambda[2] * x[2];
        const double w = q.weight * 0.5 * area2 * monomial(p, form.m, form.n) * form.coef;
        Eigen::Matrix<double, 6, 1> va, vb;
        for (int k = 0; k < 6; ++k) {
            va[k] = slot_value(form.slot_a, k, q.lambda);
            vb[k] = slot_value(form.slot_b, k, q.lambda);
        }
        K += w * va * vb.transpose();
        if (form.slot_a != form.slot_b)
            K += w * vb * va.transpose();
    }
    return K;
}

namespace {

void add_volume_forms(SpMat& K, const Mesh& mesh, const DofMap& dofs, const std::vector<VolumeForm>& forms)
{
    for (const auto& form : forms) {
        check_degree(form.m, form.n);
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            if (mesh.region[t] != form.region)
                continue;
            const auto& tri = mesh.triangles[t];
            const auto Ke = element_matrix({mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]}, form);
            for (int a = 0; a < 6; ++a) {
                const int i = dofs(tri[a / 2], a % 2);
                if (i < 0)
                    continue;
                for (int b = 0; b < 6; ++b) {
                    const int j = dofs(tri[b / 2], b % 2);
                    if (j >= 0 && Ke(a, b) != 0.0)
                        K.coeffRef(i, j) += Ke(a, b);
                }
            }
        }
    }
}

void add_trace_forms(Eigen::VectorXd& F, const Mesh& mesh, const std::vector<int>& owner, const DofMap& dofs,
                     const std::vector<TraceForm>& forms)
{
    for (const auto& form : forms) {
        check_degree(form.m, form.n);
        const auto& rule = line_rule(form.m + form.n + 1);
        bool found = false;
        for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
            if (mesh.edge_tag[e] != form.tag)
                continue;
            found = true;
            if (owner[e] < 0 || mesh.region[owner[e]] != form.region)
                continue;
            const int na = mesh.edges[e][0], nb = mesh.edges[e][1];
            const Eigen::Vector2d& xa = mesh.nodes[na];
            const Eigen::Vector2d& xb = mesh.nodes[nb];
            if ((canonical_tangent(xa, xb) - form.tangent).cwiseAbs().maxCoeff() > 1e-9)
                continue;
            const double len = (xb - xa).norm();
            double ia = 0.0, ib = 0.0;
            for (const auto& q : rule) {
                const double w = q.weight * len * monomial((1.0 - q.t) * xa + q.t * xb, form.m, form.n);
                ia += w * (1.0 - q.t);
                ib += w * q.t;
            }
            if (const int i = dofs(na, form.comp); i >= 0)
                F[i] += form.coef * ia;
            if (const int i = dofs(nb, form.comp); i >= 0)
                F[i] += form.coef * ib;
        }
        if (!found)
            throw MissingTag("boundary tag " + std::to_string(form.tag) + " has no edges");
    }
}

} // namespace

SpMat assemble_volume_forms(const Mesh& mesh, const DofMap& dofs, const std::vector<VolumeForm>& forms)
{
    SpMat K = build_pattern(mesh, dofs);
    add_volume_forms(K, mesh, dofs, forms);
    return K;
}

Eigen::VectorXd assemble_trace_forms(const Mesh& mesh, const DofMap& dofs, const std::vector<TraceForm>& forms)
{
    Eigen::VectorXd F = Eigen::VectorXd::Zero(dofs.n_free);
    add_trace_forms(F, mesh, edge_owner(mesh), dofs, forms);
    return F;
}

TruthOperators assemble_parameter_independent(const Mesh& mesh, const AffineDecomposition& decomp,
                                              const std::vector<BoundaryCondition>& bcs)
{
    TruthOperators ops;
    ops.dofs = build_dof_map(mesh, bcs);
    ops.N_h = ops.dofs.n_free;
    ops.compliant = decomp.compliant;
    const SpMat pattern = build_pattern(mesh, ops.dofs);
    const auto owner = edge_owner(mesh);

    for (const auto& term : decomp.a) {
        SpMat K = pattern;
        add_volume_forms(K, mesh, ops.dofs, term.forms);
        ops.Kq.push_back(std::move(K));
    }
    auto traces = [&](const std::vector<LinearTerm>& terms) {
        std::vector<Eigen::VectorXd> out;
        for (const auto& term : terms) {
            Eigen::VectorXd F = Eigen::VectorXd::Zero(ops.N_h);
            add_trace_forms(F, mesh, owner, ops.dofs, term.forms);
            out.push_back(std::move(F));
        }
        return out;
    };
    ops.Fq = traces(decomp.f);
    if (!decomp.compliant)
        ops.Lq = traces(decomp.l);
    return ops;
}

SpMat combine(const std::vector<SpMat>& Kq, const Eigen::VectorXd& c)
{
    SpMat K = Kq.front();
    auto v = Eigen::Map<Eigen::VectorXd>(K.valuePtr(), K.nonZeros());
    v.setZero();
    for (std::size_t q = 0; q < Kq.size(); ++q)
        v += c[static_cast<Eigen::Index>(q)] * Eigen::Map<const Eigen::VectorXd>(Kq[q].valuePtr(), Kq[q].nonZeros());
    return K;
}

Eigen::VectorXd combine(const std::vector<Eigen::VectorXd>& v, const Eigen::VectorXd& c)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(v.empty() ? 0 : v.front().size());
    for (std::size_t q = 0; q < v.size(); ++q)
        out += c[static_cast<Eigen::Index>(q)] * v[q];
    return out;
}

SpMat build_inner_product(TruthOperators& ops, const ThetaEvaluator& theta, const Param& mu_bar)
{
    const auto th = theta.eval(mu_bar);
    ops.mu_bar = mu_bar;
    ops.Y = combine(ops.Kq, th.a);
    SparseSPDSolver check(ops.Y);
    check.factorize(ops.Y, true);
    return ops.Y;
}

SparseSPDSolver::SparseSPDSolver(const SpMat& pattern)
    : llt_(std::make_unique<Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>>>())
{
    llt_->analyzePattern(pattern);
}

void SparseSPDSolver::factorize(const SpMat& A, bool spd_error)
{
    llt_->factorize(A);
    if (llt_->info() != Eigen::Success) {
        if (spd_error)
            throw NotSPD("sparse Cholesky factorization failed");
        throw SingularSystem("sparse Cholesky factorization failed");
    }
}

Eigen::VectorXd SparseSPDSolver::solve(const Eigen::VectorXd& b) const
{
    return llt_->solve(b);
}

TruthSolver::TruthSolver(const TruthOperators& ops, const ThetaEvaluator& theta)
    : ops_(ops), theta_(theta), solver_(ops.Kq.front())
{
}

SpMat TruthSolver::stiffness(const Param& mu) const
{
    return combine(ops_.Kq, theta_.eval(mu).a);
}

TruthSolution TruthSolver::solve(const Param& mu)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto th = theta_.eval(mu);
    solver_.factorize(combine(ops_.Kq, th.a));
    const Eigen::VectorXd F = combine(ops_.Fq, th.f);
    TruthSolution sol;
    sol.u = solver_.solve(F);
    sol.s = ops_.compliant ? F.dot(sol.u) : combine(ops_.Lq, th.l).dot(sol.u);
    sol.solve_time = seconds_since(t0);
    return sol;
}

TruthSolution TruthSolver::solve_dual(const Param& mu)
{
    return solve_both(mu).second;
}

std::pair<TruthSolution, TruthSolution> TruthSolver::solve_both(const Param& mu)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto th = theta_.eval(mu);
    solver_.factorize(combine(ops_.Kq, th.a));
    const Eigen::VectorXd F = combine(ops_.Fq, th.f);
    const Eigen::VectorXd L = ops_.compliant ? F : combine(ops_.Lq, th.l);
    TruthSolution pr, du;
    pr.u = solver_.solve(F);
    pr.s = L.dot(pr.u);
    du.u = solver_.solve(-L);
    du.s = L.dot(du.u);
    pr.solve_time = du.solve_time = seconds_since(t0);
    return {std::move(pr), std::move(du)};
}

TruthSolution truth_solve(const TruthOperators& ops, const ThetaEvaluator& theta, const Param& mu)
{
    TruthSolver s(ops, theta);
    return s.solve(mu);
}

TruthSolution truth_dual_solve(const TruthOperators& ops, const ThetaEvaluator& theta, const Param& mu)
{
    TruthSolver s(ops, theta);
    return s.solve_dual(mu);
}

} // namespace rbe
