#include "rbelast/config.hpp"
#include "rbelast/lp.hpp"
#include "rbelast/pipeline.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <random>
#include <string>

using namespace rbe;

namespace {

struct Trained {
    TruthSetup truth;
    RBModel model;
};

const Trained& trained(const std::string& config)
{
    static std::map<std::string, std::unique_ptr<Trained>> cache;
    auto& slot = cache[config];
    if (!slot) {
        const RunConfig cfg = load_config(std::string(RBELAST_CONFIG_DIR) + "/" + config + ".ini");
        slot = std::make_unique<Trained>();
        slot->truth = build_truth(cfg);
        slot->model = run_offline(cfg, slot->truth);
    }
    return *slot;
}

const char* const kConfigs[] = {"center_crack_coarse", "multi_material_coarse", "woven_composite_coarse"};

void BM_OnlineQuery(benchmark::State& state)
{
    const Trained& t = trained(kConfigs[state.range(0)]);
    const int N = std::min<int>(static_cast<int>(state.range(1)), t.model.N_max());
    const auto sample = uniform_sample(t.truth.spec.box, 64, 1);
    std::size_t k = 0;
    for (auto _ : state) {
        const auto out = t.model.query(sample[k++ % sample.size()], N);
        benchmark::DoNotOptimize(out.deltaN);
    }
    state.SetLabel(std::string(kConfigs[state.range(0)]) + " N=" + std::to_string(N));
}
BENCHMARK(BM_OnlineQuery)->ArgsProduct({{0, 1, 2}, {10, 40}})->Unit(benchmark::kMicrosecond);

void BM_TruthSolve(benchmark::State& state)
{
    const Trained& t = trained(kConfigs[state.range(0)]);
    TruthSolver solver(t.truth.ops, t.truth.spec.decomp.theta);
    const auto sample = uniform_sample(t.truth.spec.box, 16, 2);
    std::size_t k = 0;
    for (auto _ : state) {
        const auto sol = solver.solve(sample[k++ % sample.size()]);
        benchmark::DoNotOptimize(sol.s);
    }
    state.SetLabel(std::string(kConfigs[state.range(0)]) + " N_h=" + std::to_string(t.truth.ops.N_h));
}
BENCHMARK(BM_TruthSolve)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

void BM_ThetaEval(benchmark::State& state)
{
    const Trained& t = trained("woven_composite_coarse");
    const auto& theta = t.truth.spec.decomp.theta;
    const Param mu = t.truth.spec.box.centroid();
    ThetaValues out;
    std::vector<double> scratch;
    for (auto _ : state) {
        theta.eval(mu, out, scratch);
        benchmark::DoNotOptimize(out.a.data());
    }
}
BENCHMARK(BM_ThetaEval);

void BM_LP(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0)), m = static_cast<int>(state.range(1));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd c(n), x0(n);
    for (int j = 0; j < n; ++j) {
        c(j) = u(rng);
        x0(j) = 0.5 * u(rng);
        for (int i = 0; i < m; ++i)
            A(i, j) = u(rng);
    }
    const Eigen::VectorXd b = A * x0 - Eigen::VectorXd::Constant(m, 0.1);
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(n, -1.0), hi = Eigen::VectorXd::Constant(n, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(lp_minimize(c, A, b, lo, hi).value);
}
BENCHMARK(BM_LP)->Args({12, 16})->Args({19, 16})->Args({58, 8});

} // namespace

BENCHMARK_MAIN();
