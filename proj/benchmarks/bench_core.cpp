#include <benchmark/benchmark.h>

#include "ltb/classify.hpp"
#include "ltb/geodesics.hpp"
#include "ltb/model.hpp"
#include "ltb/roots.hpp"
#include "ltb/verify.hpp"

namespace {

void BM_SolveRoots(benchmark::State& state) {
    for (auto _ : state) {
        auto report = ltb::solve_roots(4.0);
        benchmark::DoNotOptimize(report.admissible);
    }
}
BENCHMARK(BM_SolveRoots);

void BM_CriticalBisection(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(ltb::find_critical_a_numeric());
    }
}
BENCHMARK(BM_CriticalBisection);

void BM_GeodesicShot(benchmark::State& state) {
    const ltb::Model model({1, 1.0, {}, 0.1});
    const auto start = *ltb::singular_start(model);
    for (auto _ : state) {
        auto path = ltb::integrate_from_singularity(model, start, 0.1);
        benchmark::DoNotOptimize(path.samples);
    }
}
BENCHMARK(BM_GeodesicShot);

void BM_BackwardProbe(benchmark::State& state) {
    const ltb::Model model({4, 1.0, {}, 0.1});
    const double t1 = model.horizon_time(0.05) * (1.0 - 1e-2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ltb::backward_probe(model, 0.05, t1, 1e-7));
    }
}
BENCHMARK(BM_BackwardProbe);

void BM_ClassifyNaked(benchmark::State& state) {
    const ltb::Model model({3, 4.0, {}, 0.1});
    for (auto _ : state) {
        auto report = ltb::classify(model);
        benchmark::DoNotOptimize(report.agree);
    }
}
BENCHMARK(BM_ClassifyNaked);

void BM_ClassifyCovered(benchmark::State& state) {
    const ltb::Model model({4, 1.0, {}, 0.1});
    for (auto _ : state) {
        auto report = ltb::classify(model);
        benchmark::DoNotOptimize(report.agree);
    }
}
BENCHMARK(BM_ClassifyCovered);

void BM_IdentityGrid(benchmark::State& state) {
    const ltb::Model model({2, 0.5, {}, 0.1});
    std::vector<double> grid;
    for (int i = 0; i < 40; ++i) grid.push_back(1e-4 * std::pow(1e3, i / 39.0));
    for (auto _ : state) {
        auto result = ltb::check_subsolution_margin(model, grid);
        benchmark::DoNotOptimize(result.max_rel_err);
    }
}
BENCHMARK(BM_IdentityGrid);

}  // namespace

BENCHMARK_MAIN();
