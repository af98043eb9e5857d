#pragma once

#include "rbelast/geometry.hpp"
#include "rbelast/mesh.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <array>
#include <memory>
#include <vector>

namespace rbe {

using SpMat = Eigen::SparseMatrix<double>;

/// (node, component) -> free dof index, or -1 when eliminated by a Dirichlet condition.
struct DofMap {
    std::vector<std::array<int, 2>> index;
    int n_free = 0;

    int operator()(int node, int comp) const { return index[node][comp]; }
};

DofMap build_dof_map(const Mesh& mesh, const std::vector<BoundaryCondition>& bcs);

/// Parameter-independent blocks after Dirichlet elimination. All Kq share one
/// sparsity pattern, so K(mu) is a linear combination of their value arrays.
struct TruthOperators {
    std::vector<SpMat> Kq;
    std::vector<Eigen::VectorXd> Fq;
    std::vector<Eigen::VectorXd> Lq; // empty when compliant
    SpMat Y;
    Param mu_bar;
    DofMap dofs;
    int N_h = 0;
    bool compliant = true;

    const std::vector<Eigen::VectorXd>& output_vectors() const { return compliant ? Fq : Lq; }
};

/// Element matrix of one volume form on one triangle, local dofs ordered (node0 u1, node0 u2, node1 u1, ...).
Eigen::Matrix<double, 6, 6> element_matrix(const std::array<Eigen::Vector2d, 3>& x, const VolumeForm& form);

/// Assemble a list of forms (summed with their coefficients) into one free-dof matrix / vector.
SpMat assemble_volume_forms(const Mesh& mesh, const DofMap& dofs, const std::vector<VolumeForm>& forms);
Eigen::VectorXd assemble_trace_forms(const Mesh& mesh, const DofMap& dofs, const std::vector<TraceForm>& forms);

/// Blocks for every term of `decomp`. Y is left empty; see build_inner_product.
TruthOperators assemble_parameter_independent(const Mesh& mesh, const AffineDecomposition& decomp,
                                              const std::vector<BoundaryCondition>& bcs);

/// Y = K(mu_bar); throws NotSPD if it cannot be factorized.
SpMat build_inner_product(TruthOperators& ops, const ThetaEvaluator& theta, const Param& mu_bar);

/// Sum_q c_q Kq using the shared pattern.
SpMat combine(const std::vector<SpMat>& Kq, const Eigen::VectorXd& c);
Eigen::VectorXd combine(const std::vector<Eigen::VectorXd>& v, const Eigen::VectorXd& c);

/// Sparse Cholesky with the symbolic analysis done once for the shared pattern.
class SparseSPDSolver {
public:
    explicit SparseSPDSolver(const SpMat& pattern);
    /// Throws `SingularSystem` (or NotSPD when `spd_error` is set) if factorization fails.
    void factorize(const SpMat& A, bool spd_error = false);
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    const Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>>& llt() const { return *llt_; }

private:
    std::unique_ptr<Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>>> llt_;
};

struct TruthSolution {
    Eigen::VectorXd u;
    double s = 0.0;
    double solve_time = 0.0; // seconds: assembly from blocks + factorization + solve + output
};

class TruthSolver {
public:
    TruthSolver(const TruthOperators& ops, const ThetaEvaluator& theta);

    TruthSolution solve(const Param& mu);
    /// K(mu) psi = -L(mu); s holds L^T psi.
    TruthSolution solve_dual(const Param& mu);
    /// Primal and dual sharing one factorization.
    std::pair<TruthSolution, TruthSolution> solve_both(const Param& mu);

    SpMat stiffness(const Param& mu) const;
    const TruthOperators& ops() const { return ops_; }

private:
    const TruthOperators& ops_;
    const ThetaEvaluator& theta_;
    SparseSPDSolver solver_;
};

TruthSolution truth_solve(const TruthOperators& ops, const ThetaEvaluator& theta, const Param& mu);
TruthSolution truth_dual_solve(const TruthOperators& ops, const ThetaEvaluator& theta, const Param& mu);

} // namespace rbe
