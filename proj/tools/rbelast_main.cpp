// rbelast: offline training, online queries and studies on certified reduced-basis models.

#include "rbelast/archive.hpp"
#include "rbelast/config.hpp"
#include "rbelast/errors.hpp"
#include "rbelast/greedy.hpp"
#include "rbelast/pipeline.hpp"
#include "rbelast/sif.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", x);
    return buf;
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw UsageError("bad number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty())
        throw UsageError("empty list");
    return out;
}

rbe::RunConfig read_config(const std::string& path)
{
    if (!std::filesystem::exists(path))
        throw UsageError("config file '" + path + "' not found");
    return rbe::load_config(path);
}

rbe::RBModel read_archive(const std::string& path)
{
    if (!std::filesystem::exists(path))
        throw UsageError("archive '" + path + "' not found");
    return rbe::load_model(path);
}

/// Writes to the file if a path is given, else to stdout.
class CsvSink {
public:
    explicit CsvSink(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_)
                throw UsageError("cannot write '" + path + "'");
        }
    }
    std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

int cmd_offline(const std::string& config_path, const std::string& archive_path)
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto cfg = read_config(config_path);
    const auto truth = rbe::build_truth(cfg);
    std::cerr << "problem " << cfg.problem << ": N_h = " << truth.ops.N_h << ", Qa = " << truth.spec.decomp.Qa()
              << ", Qf = " << truth.spec.decomp.Qf() << ", Ql = " << truth.spec.decomp.Ql() << '\n';
    rbe::OfflineTimes times;
    const auto model = rbe::run_offline(cfg, truth, &times);
    rbe::save_model(model, archive_path);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double final_bound = model.history.empty() ? std::nan("") : model.history.back().max_indicator;
    std::cout << "N_max = " << model.N_max() << '\n'
              << "final max bound = " << sci(final_bound) << '\n'
              << "SCM constraints = " << model.scm.J() << '\n'
              << "stagnated = " << (model.stagnated ? "yes" : "no") << '\n'
              << "offline wall time = " << sci(wall) << " s (SCM " << sci(times.scm) << " s, greedy "
              << sci(times.greedy) << " s)\n";
    return kOk;
}

int cmd_online(const std::string& archive_path, const std::string& mu_text, int N)
{
    const auto model = read_archive(archive_path);
    const auto mu = parse_list(mu_text);
    if (N == 0)
        N = model.N_max();
    const auto out = model.query(mu, N);
    std::cout << "N = " << out.N << '\n'
              << "s_N = " << sci(out.sN) << '\n'
              << "Delta_N = " << sci(out.deltaN) << '\n'
              << "alpha_LB = " << sci(out.alphaLB) << (out.rigorous ? "" : " (upper bound, not rigorous)") << '\n'
              << "t_RB = " << sci(out.online_time) << " s\n";
    return kOk;
}

int cmd_convergence(const std::string& archive_path, int n_test, std::uint64_t seed, const std::string& N_text,
                    const std::string& csv)
{
    const auto model = read_archive(archive_path);
    std::vector<int> N_list;
    for (double v : parse_list(N_text)) {
        if (v != std::floor(v) || v < 1)
            throw UsageError("N values must be positive integers");
        N_list.push_back(static_cast<int>(v));
    }
    if (n_test < 1)
        throw UsageError("--n-test must be positive");
    const auto cfg = rbe::model_config(model);
    const auto truth = rbe::build_truth(cfg);
    const auto test = rbe::uniform_sample(truth.spec.box, static_cast<std::size_t>(n_test), seed);
    const auto s = rbe::truth_outputs(truth.ops, truth.spec.decomp.theta, test);
    const auto rows = rbe::convergence_study(model, test, s.s, N_list);

    CsvSink sink(csv);
    sink.out() << "N,E_N,eta_bar\n";
    int violations = 0;
    for (const auto& r : rows) {
        sink.out() << r.N << ',' << sci(r.E_N) << ',' << sci(r.eta_bar) << '\n';
        violations += r.violations;
        std::cerr << "N = " << r.N << ": eta in [" << sci(r.eta_min) << ", " << sci(r.eta_max)
                  << "], violations " << r.violations << ", non-rigorous " << r.non_rigorous << ", t_RB "
                  << sci(r.mean_time) << " s\n";
    }
    std::cerr << "mean truth solve time " << sci(s.mean_time) << " s\n";
    return violations == 0 ? kOk : kFailure;
}

struct Sweep {
    double a = 0.0, b = 0.0;
    int steps = 0;
};

Sweep parse_sweep(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':'))
        v.push_back(parse_list(item).at(0));
    if (v.size() != 3 || v[2] < 1 || v[2] != std::floor(v[2]))
        throw UsageError("--mu1 expects a:b:steps");
    return {v[0], v[1], static_cast<int>(v[2])};
}

int cmd_sif(const std::string& archive_path, const std::string& sweep_text, double mu2, int N, double delta,
            bool with_truth, const std::string& csv)
{
    const auto model = read_archive(archive_path);
    const auto sweep = parse_sweep(sweep_text);
    const auto cfg = rbe::model_config(model);
    if (N == 0)
        N = model.N_max();
    if (!(delta > 0.0))
        delta = cfg.delta_mu1;

    std::unique_ptr<rbe::TruthSetup> truth;
    rbe::ProblemSpec spec_only;
    const rbe::ProblemSpec* spec = nullptr;
    if (with_truth) {
        truth = std::make_unique<rbe::TruthSetup>(rbe::build_truth(cfg));
        spec = &truth->spec;
    } else {
        spec_only = rbe::build_problem(cfg.problem, cfg.options);
        spec = &spec_only;
    }
    if (!spec->crack || !model.compliant)
        throw rbe::WrongProblemKind("'" + cfg.problem + "' is not a compliant crack problem");

    CsvSink sink(csv);
    sink.out() << "mu1,mu2,G_N,dG,SIF_N,dSIF" << (with_truth ? ",G_FE,SIF_FE" : "") << '\n';
    std::unique_ptr<rbe::TruthSolver> solver;
    if (truth)
        solver = std::make_unique<rbe::TruthSolver>(truth->ops, truth->spec.decomp.theta);
    int flagged = 0;
    for (int i = 0; i < sweep.steps; ++i) {
        const double mu1 = sweep.steps == 1 ? sweep.a : sweep.a + (sweep.b - sweep.a) * i / (sweep.steps - 1);
        const rbe::Param mu{mu1, mu2};
        const auto [G, dG] = rbe::err_rb_bound(model, mu, N, delta, spec->err_sign);
        double sif = std::nan(""), dsif = std::nan("");
        try {
            std::tie(sif, dsif) = rbe::sif_from_err(G, dG, spec->nu);
        } catch (const rbe::NegativeEnergyRelease& e) {
            ++flagged;
            std::cerr << "mu1 = " << sci(mu1) << ": " << e.what() << '\n';
        }
        sink.out() << sci(mu1) << ',' << sci(mu2) << ',' << sci(G) << ',' << sci(dG) << ',' << sci(sif) << ','
                   << sci(dsif);
        if (solver) {
            const double s0 = solver->solve(mu).s;
            const double s1 = solver->solve(rbe::crack_step(spec->box, mu, delta)).s;
            const double G_fe = rbe::err_fd(s0, s1, delta, spec->err_sign);
            sink.out() << ',' << sci(G_fe) << ',' << sci(std::sqrt(std::max(G_fe, 0.0) / (1.0 - spec->nu * spec->nu)));
        }
        sink.out() << '\n';
    }
    return flagged == 0 ? kOk : kFailure;
}

int cmd_validate(const std::string& config_path)
{
    rbe::RunConfig cfg;
    try {
        cfg = read_config(config_path);
    } catch (const rbe::UnknownProblem& e) {
        throw UsageError(e.what());
    }
    const auto spec = rbe::build_problem(cfg.problem, cfg.options);
    std::cout << "problem " << spec.name << ": " << spec.mesh.nodes.size() << " nodes, " << spec.mesh.triangles.size()
              << " triangles, " << spec.regions.size() << " regions\n"
              << "affine terms: Qa = " << spec.decomp.Qa() << ", Qf = " << spec.decomp.Qf()
              << ", Ql = " << spec.decomp.Ql() << (spec.compliant ? " (compliant)" : " (non-compliant)") << '\n';
    const auto issues = rbe::validate_problem(spec);
    for (const auto& s : issues)
        std::cout << "FAIL " << s << '\n';
    std::cout << (issues.empty() ? "clean\n" : "validation failed\n");
    return issues.empty() ? kOk : kFailure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Certified reduced-basis models for parametrized linear elasticity"};
    app.require_subcommand(1);

    std::string config, archive, out, mu, N_list = "5,10,20,30,40", sweep;
    int N = 0, n_test = 200;
    std::uint64_t seed = 7;
    double mu2 = 0.0, delta = 0.0;
    bool with_truth = false;

    auto* off = app.add_subcommand("offline", "Run SCM and greedy training, write a model archive");
    off->add_option("config", config, "Configuration file")->required();
    off->add_option("-o,--output", out, "Archive path")->required();

    auto* on = app.add_subcommand("online", "Certified output at one parameter");
    on->add_option("archive", archive)->required();
    on->add_option("--mu", mu, "Comma-separated parameter values")->required();
    on->add_option("--N", N, "Basis size (default: all)");

    auto* conv = app.add_subcommand("convergence", "Bound and effectivity table against truth solves");
    conv->add_option("archive", archive)->required();
    conv->add_option("--n-test", n_test, "Test sample size");
    conv->add_option("--seed", seed, "Test sample seed");
    conv->add_option("--N", N_list, "Comma-separated basis sizes");
    conv->add_option("--csv", out, "Output file (default: stdout)");

    auto* sif = app.add_subcommand("sif", "Certified energy release rate and stress intensity factor sweep");
    sif->add_option("archive", archive)->required();
    sif->add_option("--mu1", sweep, "Crack parameter sweep a:b:steps")->required();
    sif->add_option("--mu2", mu2, "Second parameter")->required();
    sif->add_option("--N", N, "Basis size (default: all)");
    sif->add_option("--delta", delta, "Finite-difference step (default: from the archive configuration)");
    sif->add_flag("--truth", with_truth, "Add truth columns G_FE and SIF_FE");
    sif->add_option("--csv", out, "Output file (default: stdout)");

    auto* val = app.add_subcommand("validate", "Check mesh, maps and coercivity of a configured problem");
    val->add_option("config", config)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kOk : kUsage;
    }

    try {
        if (*off)
            return cmd_offline(config, out);
        if (*on)
            return cmd_online(archive, mu, N);
        if (*conv)
            return cmd_convergence(archive, n_test, seed, N_list, out);
        if (*sif)
            return cmd_sif(archive, sweep, mu2, N, delta, with_truth, out);
        if (*val)
            return cmd_validate(config);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const rbe::UnknownKey& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const rbe::MalformedFile& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
