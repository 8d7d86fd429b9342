// Serial reference vs OpenMP kernels on the default 4097-node bath grid.
#include "relax/kernels.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using relax::Complex;
using relax::RVec;
using relax::Vec;

struct Grid {
    RVec x;
    Vec f;
    std::vector<Complex> z;
    explicit Grid(int n) : x(RVec::LinSpaced(n, -40.96, 40.96)), f(n) {
        for (int i = 0; i < n; ++i) f(i) = std::exp(-0.5 * x(i) * x(i)) * (1.0 + 0.3 * x(i));
        for (int i = 0; i < 512; ++i) z.emplace_back(-10.0 + 20.0 * i / 511.0, 0.05);
    }
};

const Grid& grid(int n) {
    static const Grid g4097(4097), g1025(1025);
    return n == 4097 ? g4097 : g1025;
}

void BM_pv_serial(benchmark::State& st) {
    const auto& g = grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(relax::kernels::pv_serial(g.x, g.f));
}
void BM_pv_parallel(benchmark::State& st) {
    const auto& g = grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(relax::kernels::pv_parallel(g.x, g.f));
}
void BM_cauchy_serial(benchmark::State& st) {
    const auto& g = grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(relax::kernels::cauchy_serial(g.x, g.f, g.z));
}
void BM_cauchy_parallel(benchmark::State& st) {
    const auto& g = grid(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(relax::kernels::cauchy_parallel(g.x, g.f, g.z));
}

// 16x16 complex inverses, the inner work of chi and Laplace sweeps
relax::Mat inverse_at(std::size_t i) {
    relax::Mat m = relax::Mat::Identity(16, 16) * Complex(1.0 + 0.01 * static_cast<double>(i), 0.1);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) m(r, c) += 0.05 * std::sin(r + 2.0 * c + static_cast<double>(i));
    return m.inverse();
}
void BM_map_serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(relax::kernels::serial_map(2048, inverse_at));
}
void BM_map_parallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(relax::kernels::parallel_map(2048, inverse_at));
}

}  // namespace

BENCHMARK(BM_pv_serial)->Arg(1025)->Arg(4097)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pv_parallel)->Arg(1025)->Arg(4097)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cauchy_serial)->Arg(1025)->Arg(4097)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cauchy_parallel)->Arg(1025)->Arg(4097)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_map_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_map_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
