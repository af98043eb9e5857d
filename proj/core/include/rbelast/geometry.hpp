#pragma once

#include "rbelast/expr.hpp"
#include "rbelast/material.hpp"
#include "rbelast/mesh.hpp"
#include "rbelast/param.hpp"

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace rbe {

struct AffineMap {
    Eigen::Matrix2d R = Eigen::Matrix2d::Identity();
    Eigen::Vector2d G = Eigen::Vector2d::Zero();
    double detR = 1.0;
    Eigen::Matrix2d D = Eigen::Matrix2d::Identity();

    Eigen::Vector2d apply(const Eigen::Vector2d& x) const { return R * x + G; }
};

using PointExpr = std::array<Expr, 2>;

/// x_o = R(mu) x + G(mu), entries stored row-major as expressions.
struct AffineMapExpr {
    std::array<Expr, 4> R{Expr(1.0), Expr(0.0), Expr(0.0), Expr(1.0)};
    std::array<Expr, 2> G{Expr(0.0), Expr(0.0)};
    Expr det = 1.0;
    std::array<Expr, 4> D{Expr(1.0), Expr(0.0), Expr(0.0), Expr(1.0)};

    AffineMap at(std::span<const double> mu) const;
    bool axis_aligned() const { return R[1].is_zero() && R[2].is_zero(); }
};

AffineMapExpr identity_map();
AffineMapExpr translation_map(const Expr& gx, const Expr& gy);

/// Solve the six equations T(ref_k) = mapped_k. With a box, detR is sampled
/// over it and OrientationFlip is thrown if it is not positive everywhere.
AffineMapExpr solve_affine_map(const std::array<Eigen::Vector2d, 3>& ref, const std::array<PointExpr, 3>& mapped,
                               const ParamBox* box = nullptr);

/// Maps are indexed by region - 1. Empty report means continuity holds.
std::vector<std::string> mapping_continuity_check(const std::vector<AffineMapExpr>& maps, const Mesh& mesh,
                                                  const std::vector<Param>& samples);

/// One entry of H S H^T |det R| as a polynomial term coef * x1^m in reference coordinates.
struct EffectiveEntry {
    int i = 0, j = 0; // i <= j
    int m = 0;
    Expr coef;
};

std::vector<EffectiveEntry> effective_tensor(const BasicTensor<Expr>& S, const AffineMapExpr& map);
Eigen::Matrix<double, 5, 5> effective_tensor(const Eigen::Matrix<double, 5, 5>& S, const AffineMap& map);

/// Traction or output vector pulled back to a reference edge with unit tangent t:
/// multiplied by the edge-length ratio |R t|.
std::array<Expr, 2> effective_load(const std::array<Expr, 2>& Sf, const AffineMapExpr& map, const Eigen::Vector2d& tangent);
double load_multiplier(const AffineMap& map, const Eigen::Vector2d& tangent);

// ---------------------------------------------------------------------------

/// Volume form  coef * int_region x1^m x2^n * q_a(v) q_b(w), where slot 0..3 picks a
/// displacement gradient component and slot 4 the value of w1; a symmetric pair
/// (a != b) also contributes the transposed term.
struct VolumeForm {
    int region = 0;
    int slot_a = 0, slot_b = 0;
    int m = 0, n = 0;
    double coef = 1.0;
};

/// Edge form  coef * int_{edges tagged `tag` in `region` along `tangent`} x1^m x2^n v_comp.
struct TraceForm {
    int tag = 0;
    int region = 0;
    Eigen::Vector2d tangent = Eigen::Vector2d::UnitX();
    int comp = 0;
    int m = 0, n = 0;
    double coef = 1.0;
};

template <class F>
struct AffineTerm {
    Expr theta;
    std::vector<F> forms;
};

using BilinearTerm = AffineTerm<VolumeForm>;
using LinearTerm = AffineTerm<TraceForm>;

struct ThetaValues {
    Eigen::VectorXd a, f, l;
};

/// Compiled coefficient functions; this is all the online stage needs from the decomposition.
class ThetaEvaluator {
public:
    ThetaEvaluator() = default;
    ThetaEvaluator(Tape tape, int Qa, int Qf, int Ql, ParamBox box);

    ThetaValues eval(std::span<const double> mu) const;
    void eval(std::span<const double> mu, ThetaValues& out, std::vector<double>& scratch) const;

    int Qa() const { return Qa_; }
    int Qf() const { return Qf_; }
    int Ql() const { return Ql_; }
    const ParamBox& box() const { return box_; }
    const Tape& tape() const { return tape_; }

private:
    Tape tape_;
    int Qa_ = 0, Qf_ = 0, Ql_ = 0;
    ParamBox box_;
};

struct AffineDecomposition {
    std::vector<BilinearTerm> a;
    std::vector<LinearTerm> f;
    std::vector<LinearTerm> l; // empty for compliant problems (l = f)
    ParamBox box;
    Param mu_ref;
    bool compliant = true;
    bool axisymmetric = false;
    ThetaEvaluator theta;

    int Qa() const { return static_cast<int>(a.size()); }
    int Qf() const { return static_cast<int>(f.size()); }
    int Ql() const { return compliant ? Qf() : static_cast<int>(l.size()); }
    const std::vector<LinearTerm>& output_terms() const { return compliant ? f : l; }

    void compile();
};

struct RawExpansion {
    std::vector<BilinearTerm> a;
    std::vector<LinearTerm> f, l;
};

struct RegionSetup {
    MaterialExpr material;
    AffineMapExpr map;
};

/// Uncollapsed expansion: one term per effective-tensor entry, monomial and edge group.
RawExpansion expand_forms(const Mesh& mesh, const std::vector<RegionSetup>& regions,
                          const std::vector<BoundaryCondition>& bcs);

/// Drop terms vanishing on a 32-point sample and merge proportional ones.
AffineDecomposition collapse_decomposition(const RawExpansion& raw, const ParamBox& box, const Param& mu_ref,
                                           bool compliant, bool axisymmetric);

ThetaValues eval_theta(const AffineDecomposition& decomp, std::span<const double> mu);

/// Canonical unit tangent of segment a->b (sign fixed so that x > 0, or y > 0 on verticals).
Eigen::Vector2d canonical_tangent(const Eigen::Vector2d& a, const Eigen::Vector2d& b);

} // namespace rbe
