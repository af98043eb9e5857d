#include "rbelast/greedy.hpp"

#include "rbelast/errors.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace rbe {

namespace {

void pop_column(ReducedBasis& b)
{
    b.Z.conservativeResize(b.Z.rows(), b.Z.cols() - 1);
    b.snapshot_params.pop_back();
}

} // namespace

RBModel greedy_build(const TruthOperators& ops, const YFactor& Y, const ThetaEvaluator& theta, SCMData scm,
                     const GreedyConfig& cfg)
{
    if (cfg.train.empty())
        throw Error("greedy training sample is empty");
    if (!(cfg.tol > 0.0) || cfg.N_max < 1)
        throw OutOfRangeValue("greedy tolerance must be positive and N_max >= 1");

    RBModel model;
    model.theta = theta;
    model.compliant = ops.compliant;
    model.mu_bar = ops.mu_bar;
    model.scm = std::move(scm);

    std::vector<AlphaBound> alpha(cfg.train.size());
    for (std::size_t i = 0; i < cfg.train.size(); ++i)
        alpha[i] = coercivity_bound(model.scm, theta.eval(cfg.train[i]).a, cfg.train[i]);

    TruthSolver solver(ops, theta);
    ResidualBuilder res_pr(Y, ops.Fq, ops.Kq);
    std::unique_ptr<ResidualBuilder> res_du;
    if (!ops.compliant)
        res_du = std::make_unique<ResidualBuilder>(Y, ops.Lq, ops.Kq);

    Param mu = ops.mu_bar.empty() ? theta.box().centroid() : ops.mu_bar;
    while (true) {
        const int before = model.basis_pr.size();
        try {
            if (ops.compliant) {
                gram_schmidt_append(model.basis_pr, solver.solve(mu).u, Y.Y(), mu);
            } else {
                auto [pr, du] = solver.solve_both(mu);
                gram_schmidt_append(model.basis_pr, pr.u, Y.Y(), mu);
                try {
                    gram_schmidt_append(model.basis_du, du.u, Y.Y(), mu);
                } catch (const NearlyDependentSnapshot&) {
                    pop_column(model.basis_pr);
                    throw;
                }
            }
        } catch (const NearlyDependentSnapshot& e) {
            model.stagnated = true;
            if (cfg.strict)
                throw StagnationAtDependentSnapshot(std::string("at N = ") + std::to_string(before) + ": " + e.what());
            break;
        }

        project_operators(model.red, model.basis_pr, ops.compliant ? nullptr : &model.basis_du, ops);
        res_pr.extend(model.basis_pr.Z);
        model.res_pr = res_pr.factor();
        if (res_du) {
            res_du->extend(model.basis_du.Z);
            model.res_du = res_du->factor();
        }

        const int N = model.basis_pr.size();
        double worst = -1.0;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < cfg.train.size(); ++i) {
            const auto out = model.query_with_alpha(cfg.train[i], N, alpha[i].value, alpha[i].rigorous);
            double ind = out.deltaN;
            if (cfg.indicator == Indicator::RelativeOutputBound)
                ind = std::abs(out.sN) > 0.0 ? out.deltaN / std::abs(out.sN) : std::numeric_limits<double>::infinity();
            if (ind > worst) {
                worst = ind;
                arg = i;
            }
        }
        model.history.push_back({N, mu, worst});
        if (worst <= cfg.tol || N >= cfg.N_max)
            break;
        mu = cfg.train[arg];
    }
    if (model.basis_pr.size() == 0)
        throw StagnationAtDependentSnapshot("first snapshot rejected");
    return model;
}

TruthOutputs truth_outputs(const TruthOperators& ops, const ThetaEvaluator& theta, const std::vector<Param>& test)
{
    TruthSolver solver(ops, theta);
    TruthOutputs out;
    out.s.reserve(test.size());
    for (const auto& mu : test) {
        const auto sol = solver.solve(mu);
        out.s.push_back(sol.s);
        out.mean_time += sol.solve_time;
    }
    if (!test.empty())
        out.mean_time /= static_cast<double>(test.size());
    return out;
}

std::vector<ConvergenceRow> convergence_study(const RBModel& model, const std::vector<Param>& test,
                                              const std::vector<double>& s_truth, const std::vector<int>& N_list)
{
    std::vector<ConvergenceRow> rows;
    for (int N : N_list) {
        ConvergenceRow row;
        row.N = N;
        row.eta_min = std::numeric_limits<double>::infinity();
        int counted = 0;
        for (std::size_t i = 0; i < test.size(); ++i) {
            const auto out = model.query(test[i], N);
            row.mean_time += out.online_time;
            row.E_N = std::max(row.E_N, out.deltaN / std::abs(out.sN));
            if (!out.rigorous)
                ++row.non_rigorous;
            const double err = std::abs(s_truth[i] - out.sN);
            if (out.deltaN < err)
                ++row.violations;
            try {
                const double eta = effectivity(out.deltaN, s_truth[i], out.sN);
                row.eta_bar += eta;
                row.eta_min = std::min(row.eta_min, eta);
                row.eta_max = std::max(row.eta_max, eta);
                ++counted;
            } catch (const ZeroError&) {
            }
        }
        if (counted > 0)
            row.eta_bar /= counted;
        else
            row.eta_min = 0.0;
        if (!test.empty())
            row.mean_time /= static_cast<double>(test.size());
        rows.push_back(row);
    }
    return rows;
}

} // namespace rbe
