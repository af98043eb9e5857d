// Acceptance run: one PASS/FAIL line per criterion. Models are trained from configs/*_fine.ini
// (multi_material also from the coarse config) before the checks start.

#include "rbelast/archive.hpp"
#include "rbelast/config.hpp"
#include "rbelast/errors.hpp"
#include "rbelast/greedy.hpp"
#include "rbelast/pipeline.hpp"
#include "rbelast/sif.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef RBELAST_CONFIG_DIR
#error "RBELAST_CONFIG_DIR must point at the shipped configs"
#endif

using namespace rbe;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Trained {
    RunConfig cfg;
    TruthSetup truth;
    RBModel model;
    double offline_time = 0.0;

    const ThetaEvaluator& theta() const { return truth.spec.decomp.theta; }
    const ParamBox& box() const { return truth.spec.box; }
};

const Trained& get(const std::string& problem, const std::string& resolution = "fine")
{
    static std::map<std::string, std::unique_ptr<Trained>> cache;
    auto& slot = cache[problem + "_" + resolution];
    if (!slot) {
        const auto t0 = Clock::now();
        slot = std::make_unique<Trained>();
        slot->cfg = load_config(std::string(RBELAST_CONFIG_DIR) + "/" + problem + "_" + resolution + ".ini");
        slot->truth = build_truth(slot->cfg);
        slot->model = run_offline(slot->cfg, slot->truth);
        slot->offline_time = since(t0);
        std::cout << "  [trained " << problem << " " << resolution << ": N_h = " << slot->truth.ops.N_h
                  << ", N_max = " << slot->model.N_max() << ", J = " << slot->model.scm.J() << ", "
                  << sci(slot->offline_time) << " s]\n"
                  << std::flush;
    }
    return *slot;
}

struct Verdict {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int k, const std::string& title, const std::function<Verdict()>& body)
{
    const auto t0 = Clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << k << " (" << title << "): " << v.detail << " ["
              << sci(since(t0)) << " s]\n"
              << std::flush;
}

// Criterion runtimes exclude training; `limit` is in seconds.
bool within(Clock::time_point t0, double limit, std::ostringstream& os)
{
    const double t = since(t0);
    if (t > limit) {
        os << "; runtime " << sci(t) << " s exceeds " << limit << " s";
        return false;
    }
    return true;
}

std::vector<Param> test_sample(const Trained& t, std::size_t n, std::uint64_t seed)
{
    return uniform_sample(t.box(), n, seed);
}

Verdict residual_equivalence()
{
    std::ostringstream os;
    bool ok = true;
    for (const Trained* t : {&get("multi_material", "coarse"), &get("center_crack")}) {
        const auto t0 = Clock::now();
        const RBModel& m = t->model;
        std::mt19937_64 rng(21);
        std::uniform_int_distribution<int> pickN(1, m.N_max());
        double worst = 0.0;
        for (const Param& mu : test_sample(*t, 20, 5)) {
            const int N = pickN(rng);
            const ThetaValues th = m.theta.eval(mu);
            const RBSolution rb = online_solve(m.red, th, N);
            const SpMat K = combine(t->truth.ops.Kq, th.a);
            const Eigen::VectorXd F = combine(t->truth.ops.Fq, th.f);
            const double direct = residual_norm_sq_direct(*t->truth.Y, K, F, m.basis_pr.Z.leftCols(N) * rb.uN);
            const double online = m.res_pr.norm_sq(th.f, th.a, rb.uN);
            worst = std::max(worst, std::abs(online - direct) / direct);
        }
        const bool pass = worst <= 1e-8;
        ok &= pass;
        os << m.problem << " max rel diff " << sci(worst) << " (tol 1e-8); ";
        ok &= within(t0, 60.0, os);
    }
    return {ok, os.str()};
}

struct RigorStats {
    int points = 0, violations = 0, eta_below_one = 0, non_rigorous = 0, zero_error = 0;
    double eta_min = 1e300, eta_max = 0.0;
};

RigorStats rigor(const Trained& t, const std::vector<int>& Ns, std::uint64_t seed)
{
    RigorStats r;
    TruthSolver solver(t.truth.ops, t.theta());
    for (const Param& mu : test_sample(t, 100, seed)) {
        const double s = solver.solve(mu).s;
        for (int N : Ns) {
            const CertifiedOutput c = t.model.query(mu, N);
            ++r.points;
            r.non_rigorous += c.rigorous ? 0 : 1;
            const double err = std::abs(s - c.sN);
            if (c.deltaN < err)
                ++r.violations;
            double eta = 0.0;
            try {
                eta = effectivity(c.deltaN, s, c.sN);
            } catch (const ZeroError&) {
                ++r.zero_error;
                continue;
            }
            r.eta_min = std::min(r.eta_min, eta);
            r.eta_max = std::max(r.eta_max, eta);
            r.eta_below_one += eta < 1.0 ? 1 : 0;
        }
    }
    return r;
}

std::string describe(const std::string& name, const RigorStats& r)
{
    std::ostringstream os;
    os << name << ": " << r.violations << " violations in " << r.points << ", eta in [" << sci(r.eta_min) << ", "
       << sci(r.eta_max) << "], non-rigorous " << r.non_rigorous;
    if (r.zero_error)
        os << ", zero error " << r.zero_error;
    return os.str();
}

Verdict rigor_compliant()
{
    std::ostringstream os;
    bool ok = true;
    for (const char* name : {"center_crack", "multi_material"}) {
        const Trained& t = get(name);
        const auto t0 = Clock::now();
        const RigorStats r = rigor(t, {5, 10, 20, 30}, 101);
        ok &= r.violations == 0 && r.eta_below_one == 0 && r.non_rigorous == 0;
        os << describe(name, r) << "; ";
        ok &= within(t0, 600.0, os);
    }
    return {ok, os.str()};
}

Verdict rigor_primal_dual()
{
    std::ostringstream os;
    const Trained& t = get("woven_composite");
    const auto t0 = Clock::now();
    const RigorStats r = rigor(t, {4, 8, 12, 16, 20}, 102);
    bool ok = r.violations == 0 && r.non_rigorous == 0;
    os << describe("woven_composite", r);
    ok &= within(t0, 600.0, os);
    return {ok, os.str()};
}

Verdict scm_sandwich()
{
    std::ostringstream os;
    bool ok = true;
    for (const auto& name : problem_names()) {
        const Trained& t = get(name);
        const auto t0 = Clock::now();
        int bad = 0;
        double worst_ratio = 1e300;
        for (const Param& mu : test_sample(t, 50, 103)) {
            const Eigen::VectorXd th = t.theta().eval(mu).a;
            const double alpha =
                smallest_generalized_eig(combine(t.truth.ops.Kq, th), *t.truth.Y, 1e-10).lambda;
            const double lb = scm_lower_bound(t.model.scm, th, mu);
            const double ub = scm_upper_bound(t.model.scm, th, mu);
            if (!(lb > 0.0 && lb <= alpha * (1.0 + 1e-6) && alpha <= ub * (1.0 + 1e-6)))
                ++bad;
            worst_ratio = std::min(worst_ratio, lb / alpha);
        }
        ok &= bad == 0;
        os << name << " " << bad << "/50 (min LB/alpha " << sci(worst_ratio) << "); ";
        ok &= within(t0, 300.0, os);
    }
    return {ok, os.str()};
}

Verdict convergence()
{
    std::ostringstream os;
    bool ok = true;
    struct Target {
        const char* name;
        int N;
        double tol;
    };
    for (const Target& target : {Target{"multi_material", 30, 1e-3}, Target{"center_crack", 20, 1e-4},
                                 Target{"woven_composite", 20, 1e-3}}) {
        const Trained& t = get(target.name);
        const auto t0 = Clock::now();
        const auto test = test_sample(t, 200, 3);
        const TruthOutputs truth = truth_outputs(t.truth.ops, t.theta(), test);
        if (t.model.N_max() < target.N) {
            ok = false;
            os << target.name << " has only N_max = " << t.model.N_max() << "; ";
            continue;
        }
        const auto rows = convergence_study(t.model, test, truth.s, {target.N});
        const ConvergenceRow& row = rows.front();
        bool pass = row.E_N <= target.tol;
        os << target.name << " E_" << target.N << " = " << sci(row.E_N) << " (tol " << sci(target.tol) << ")";
        if (std::string(target.name) == "multi_material") {
            pass &= row.eta_bar >= 1.0 && row.eta_bar <= 50.0;
            os << ", eta_bar " << sci(row.eta_bar) << " (in [1, 50])";
        }
        os << (pass ? "" : " MISSED") << "; ";
        ok &= pass;
        ok &= within(t0, 900.0, os);
    }
    return {ok, os.str()};
}

Verdict snapshot_reproduction()
{
    std::ostringstream os;
    bool ok = true;
    for (const auto& name : problem_names()) {
        const Trained& t = get(name);
        const RBModel& m = t.model;
        TruthSolver solver(t.truth.ops, t.theta());
        double worst = 0.0;
        for (int k = 0; k < m.basis_pr.size(); ++k) {
            const Param& mu = m.basis_pr.snapshot_params[k];
            const double s = solver.solve(mu).s;
            const double sN = m.query(mu, m.N_max()).sN;
            worst = std::max(worst, std::abs(sN - s) / std::abs(s));
        }
        ok &= worst <= 1e-8;
        os << name << " " << sci(worst) << "; ";
    }
    return {ok, os.str() + "(tol 1e-8)"};
}

Verdict orthonormality_conditioning()
{
    std::ostringstream os;
    bool ok = true;
    for (const auto& name : problem_names()) {
        const Trained& t = get(name);
        const RBModel& m = t.model;
        const SpMat& Y = t.truth.ops.Y;
        double orth = 0.0;
        for (const ReducedBasis* b : {&m.basis_pr, &m.basis_du}) {
            if (b->size() == 0)
                continue;
            const Eigen::MatrixXd G = b->Z.transpose() * (Y * b->Z);
            orth = std::max(orth, (G - Eigen::MatrixXd::Identity(b->size(), b->size())).cwiseAbs().maxCoeff());
        }
        int bad = 0;
        double worst = 0.0;
        for (const Param& mu : test_sample(t, 10, 104)) {
            const Eigen::VectorXd th = t.theta().eval(mu).a;
            const auto [lo, hi] = generalized_eig_bounds(combine(t.truth.ops.Kq, th), *t.truth.Y, 1e-10);
            const double bound = hi.lambda / lo.lambda;
            const double cond = reduced_condition_number(m.red, th, m.N_max());
            worst = std::max(worst, cond / bound);
            bad += cond <= bound * (1.0 + 1e-6) ? 0 : 1;
        }
        ok &= orth <= 1e-10 && bad == 0;
        os << name << " |Z^T Y Z - I| " << sci(orth) << ", max cond/(gamma/alpha) " << sci(worst) << "; ";
    }
    return {ok, os.str()};
}

Verdict speedup()
{
    std::ostringstream os;
    bool ok = true;
    int measured = 0;
    for (const auto& name : problem_names()) {
        const Trained& t = get(name);
        if (t.truth.ops.N_h < 5000)
            continue;
        if (t.model.N_max() < 40) {
            os << name << " skipped (N_max = " << t.model.N_max() << " < 40); ";
            continue;
        }
        ++measured;
        TruthSolver solver(t.truth.ops, t.theta());
        std::vector<double> t_rb, t_fe;
        for (const Param& mu : test_sample(t, 10, 105)) {
            t_rb.push_back(t.model.query(mu, 40).online_time);
            t_fe.push_back(solver.solve(mu).solve_time);
        }
        const double ratio = median(t_rb) / median(t_fe);
        ok &= ratio <= 0.02;
        os << name << " (N_h " << t.truth.ops.N_h << ") t_RB " << sci(median(t_rb)) << " s, t_FE " << sci(median(t_fe))
           << " s, ratio " << sci(ratio) << "; ";
    }
    ok &= measured > 0;
    return {ok, os.str() + "(limit 2e-2)"};
}

Verdict sif_certification()
{
    std::ostringstream os;
    const Trained& t = get("center_crack");
    const auto t0 = Clock::now();
    const double delta = 1e-3, mu2 = 2.0, nu = t.truth.spec.nu;
    const ErrSign sign = t.truth.spec.err_sign;
    TruthSolver solver(t.truth.ops, t.theta());
    const double a = t.box().lo[0], b = t.box().hi[0] - delta;
    int g_viol = 0, k_viol = 0, no_interval_15 = 0;
    double mean30 = 0.0, mean15 = 0.0;
    const int n = 20;
    for (int i = 0; i < n; ++i) {
        const Param mu{a + (b - a) * i / (n - 1), mu2};
        const double s0 = solver.solve(mu).s;
        const double s1 = solver.solve(crack_step(t.box(), mu, delta)).s;
        const double G_fe = err_fd(s0, s1, delta, sign);
        const double K_fe = std::sqrt(G_fe / (1.0 - nu * nu));
        const SifResult r = sif_rb(t.model, mu, 30, nu, delta, sign);
        // G_N is the lower end of [G_N, G_N + dG]
        g_viol += (G_fe >= r.G_N && G_fe <= r.G_N + r.dG) ? 0 : 1;
        k_viol += std::abs(r.SIF_N - K_fe) <= r.dSIF ? 0 : 1;
        mean30 += r.dSIF / n;
        try {
            mean15 += sif_rb(t.model, mu, 15, nu, delta, sign).dSIF / n;
        } catch (const NegativeEnergyRelease&) {
            ++no_interval_15;
        }
    }
    bool ok = g_viol == 0 && k_viol == 0;
    os << "G violations " << g_viol << ", SIF violations " << k_viol << " of " << n << "; mean dSIF N=30 "
       << sci(mean30);
    if (no_interval_15) {
        os << ", N=15 gives no SIF interval at " << no_interval_15 << " points";
    } else {
        os << " vs N=15 " << sci(mean15);
        ok &= mean30 < mean15;
    }
    ok &= within(t0, 300.0, os);
    return {ok, os.str()};
}

Verdict affine_counts()
{
    std::ostringstream os;
    bool ok = true;
    struct Expect {
        const char* name;
        int Qa, Qf, Ql;
    };
    for (const Expect& e : {Expect{"multi_material", 12, 1, 1}, Expect{"center_crack", 10, 1, 1},
                            Expect{"woven_composite", 19, 2, 1}}) {
        const ProblemSpec p = build_problem(e.name, {.resolution = Resolution::Coarse});
        const bool pass = p.decomp.Qa() == e.Qa && p.decomp.Qf() == e.Qf && p.decomp.Ql() == e.Ql;
        ok &= pass;
        os << e.name << " Qa=" << p.decomp.Qa() << " Qf=" << p.decomp.Qf() << " Ql=" << p.decomp.Ql() << "; ";
    }
    for (const char* name : {"closed_vessel", "composite_cell_polygonal"}) {
        const ProblemSpec p = build_problem(name, {.resolution = Resolution::Coarse});
        os << name << " Qa=" << p.decomp.Qa() << " Qf=" << p.decomp.Qf() << " Ql=" << p.decomp.Ql()
           << " (recorded); ";
    }
    return {ok, os.str()};
}

Verdict archive_round_trip()
{
    std::ostringstream os;
    bool ok = true;
    for (const auto& name : problem_names()) {
        const RBModel& m = get(name).model;
        std::stringstream ss;
        save_model(m, ss);
        const RBModel back = load_model(ss);
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<int> pickN(1, m.N_max());
        int diff = 0;
        for (const Param& mu : uniform_sample(m.theta.box(), 20, 106)) {
            const int N = pickN(rng);
            const CertifiedOutput a = m.query(mu, N), b = back.query(mu, N);
            for (auto [x, y] : {std::pair{a.sN, b.sN}, std::pair{a.deltaN, b.deltaN}, std::pair{a.alphaLB, b.alphaLB}})
                diff += std::memcmp(&x, &y, sizeof(double)) == 0 ? 0 : 1;
        }
        ok &= diff == 0;
        os << name << " " << diff << " differing values; ";
    }
    return {ok, os.str()};
}

} // namespace

int main()
{
    std::cout << "training models\n" << std::flush;
    for (const auto& name : problem_names())
        get(name);
    get("multi_material", "coarse");

    report(1, "offline-online residual equivalence", residual_equivalence);
    report(2, "compliant bound rigor", rigor_compliant);
    report(3, "primal-dual bound rigor", rigor_primal_dual);
    report(4, "coercivity sandwich", scm_sandwich);
    report(5, "convergence", convergence);
    report(6, "snapshot reproduction", snapshot_reproduction);
    report(7, "orthonormality and conditioning", orthonormality_conditioning);
    report(8, "online speedup", speedup);
    report(9, "stress intensity certification", sif_certification);
    report(10, "affine term counts", affine_counts);
    report(11, "archive round trip", archive_round_trip);

    std::cout << (failures ? std::to_string(failures) + " criteria failed\n" : "all criteria passed\n");
    return failures ? 1 : 0;
}
