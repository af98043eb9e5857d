#include "rbelast/pipeline.hpp"

#include "rbelast/errors.hpp"
#include "rbelast/greedy.hpp"
#include "rbelast/scm.hpp"

#include <chrono>

namespace rbe {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

TruthSetup build_truth(const RunConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    TruthSetup t;
    t.spec = build_problem(cfg.problem, cfg.options);
    t.ops = assemble_parameter_independent(t.spec.mesh, t.spec.decomp, t.spec.bcs);
    build_inner_product(t.ops, t.spec.decomp.theta, t.spec.mu_ref);
    t.Y = std::make_unique<YFactor>(t.ops.Y);
    t.assembly_time = seconds_since(t0);
    return t;
}

RBModel run_offline(const RunConfig& cfg, const TruthSetup& truth, OfflineTimes* times)
{
    const auto& theta = truth.spec.decomp.theta;
    const auto& box = truth.spec.box;

    auto t0 = std::chrono::steady_clock::now();
    // corners are where coefficient functions are most extreme; always train on them
    const auto corners = box_vertices(box);
    auto scm_train = uniform_sample(box, static_cast<std::size_t>(cfg.scm_n_train), cfg.seed + 1);
    // coercivity scales with the moduli, so also sample wide ranges near their small ends
    const auto scm_log = log_uniform_sample(box, static_cast<std::size_t>(cfg.scm_n_train) / 2, cfg.seed + 2);
    scm_train.insert(scm_train.end(), scm_log.begin(), scm_log.end());
    scm_train.insert(scm_train.end(), corners.begin(), corners.end());
    SCMData scm = scm_offline(theta, truth.ops, *truth.Y, scm_train, cfg.scm);
    const double t_scm = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    GreedyConfig g;
    g.train = uniform_sample(box, static_cast<std::size_t>(cfg.n_train), cfg.seed);
    g.train.insert(g.train.end(), corners.begin(), corners.end());
    g.tol = cfg.tol;
    g.N_max = cfg.N_max;
    g.seed = cfg.seed;
    g.indicator = cfg.indicator;
    RBModel model = greedy_build(truth.ops, *truth.Y, theta, std::move(scm), g);
    const double t_greedy = seconds_since(t0);

    model.problem = cfg.problem;
    model.config_text = canonical_config(cfg);
    model.config_hash = fnv1a(model.config_text);
    if (times)
        *times = {t_scm, t_greedy};
    return model;
}

RunConfig model_config(const RBModel& model)
{
    // canonical form is key=value with dotted section names
    std::string ini;
    std::string section;
    std::size_t pos = 0;
    const std::string& text = model.config_text;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos)
            end = text.size();
        const std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        const auto dot = line.find('.');
        if (dot == std::string::npos)
            throw ArchiveError("bad configuration line '" + line + "'");
        const std::string s = line.substr(0, dot);
        if (s != section) {
            ini += "[" + s + "]\n";
            section = s;
        }
        ini += line.substr(dot + 1) + "\n";
    }
    RunConfig cfg = parse_config(ini);
    if (config_hash(cfg) != model.config_hash)
        throw ArchiveError("stored configuration does not match its hash");
    return cfg;
}

} // namespace rbe
