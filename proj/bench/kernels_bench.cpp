// Serial reference vs OpenMP lattice kernels on the workloads the solvers run.

#include <benchmark/benchmark.h>

#include "pathtrans/curvature.hpp"
#include "pathtrans/line_bundle.hpp"

using namespace pathtrans;

namespace {

RegionSpec cube(std::size_t n) {
    return RegionSpec::box(std::vector<Interval>(4, Interval{-1, 1}), std::vector<std::size_t>(4, n));
}

const CoefficientField& wave() {
    static const CoefficientField f =
        catalog("plane_wave", {{"eps", std::vector<double>{1, 0.5, -0.5, 0.25}}, {"k", std::vector<double>{0.5, 1, 1.5, -1}}});
    return f;
}

const CoefficientField& gauge() {
    static const CoefficientField f = catalog("pure_gauge", {{"f0", std::string("x1*x2 + sin(x0)*x3")}});
    return f;
}

void flatness(benchmark::State& state, Exec exec) {
    const auto region = cube(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(is_flat(wave(), region, kDefaultFlatnessTol, exec));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(Lattice(region).size()));
}

void normal_frame(benchmark::State& state, Exec exec) {
    const auto region = cube(static_cast<std::size_t>(state.range(0)));
    NormalFrameOptions opts;
    opts.exec = exec;
    for (auto _ : state) benchmark::DoNotOptimize(solve_normal_frame(gauge(), region, {0, 0, 0, 0}, kDefaultFlatnessTol, opts));
}

void lattice_map_exp(benchmark::State& state, Exec exec) {
    const Lattice lattice(cube(static_cast<std::size_t>(state.range(0))));
    auto f = [](const Point& p) { return std::exp(cd(p[0] * p[1], p[2] - p[3])); };
    for (auto _ : state) benchmark::DoNotOptimize(lattice_map(lattice, f, exec));
}

}  // namespace

BENCHMARK_CAPTURE(flatness, serial, Exec::Serial)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(flatness, parallel, Exec::Parallel)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(normal_frame, serial, Exec::Serial)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(normal_frame, parallel, Exec::Parallel)->Arg(5)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(lattice_map_exp, serial, Exec::Serial)->Arg(17)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(lattice_map_exp, parallel, Exec::Parallel)->Arg(17)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
