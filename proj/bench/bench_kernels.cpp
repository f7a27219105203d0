// Parallel kernels against their serial reference versions.

#include <benchmark/benchmark.h>

#include <random>

#include "ctrf/kernels.hpp"
#include "ctrf/reference.hpp"
#include "ctrf/tensor_ring.hpp"

using namespace ctrf;

namespace {

DenseTensor random_tensor(const Shape& shape, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    DenseTensor t(shape);
    for (double& v : t.data()) v = normal(rng);
    return t;
}

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Index k = 0; k < m.size(); ++k) m.data()[k] = normal(rng);
    return m;
}

void BM_MergePairKernel(benchmark::State& state)
{
    const Index n = state.range(0);
    const auto a = random_tensor({6, n, 8}, 1), b = random_tensor({8, n, 6}, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::merge_pair(a, b));
}

void BM_MergePairReference(benchmark::State& state)
{
    const Index n = state.range(0);
    const auto a = random_tensor({6, n, 8}, 1), b = random_tensor({8, n, 6}, 2);
    for (auto _ : state) benchmark::DoNotOptimize(reference::merge_pair(a, b));
}

void BM_Mode2TtmKernel(benchmark::State& state)
{
    const Index n = state.range(0);
    const auto core = random_tensor({4, n, 4}, 3);
    const Matrix p = random_matrix(n / 4, n, 4);
    for (auto _ : state) benchmark::DoNotOptimize(mode2_ttm(core, p));
}

void BM_Mode2TtmReference(benchmark::State& state)
{
    const Index n = state.range(0);
    const auto core = random_tensor({4, n, 4}, 3);
    const Matrix p = random_matrix(n / 4, n, 4);
    for (auto _ : state) benchmark::DoNotOptimize(reference::mode2_ttm(core, p));
}

void BM_TrUnfoldKernel(benchmark::State& state)
{
    const Index n = state.range(0);
    const auto t = random_tensor({n, n, 32}, 5);
    for (auto _ : state) benchmark::DoNotOptimize(tr_unfold(t, 2));
}

void BM_TrUnfoldReference(benchmark::State& state)
{
    const Index n = state.range(0);
    const auto t = random_tensor({n, n, 32}, 5);
    for (auto _ : state) benchmark::DoNotOptimize(reference::tr_unfold(t, 2));
}

void BM_ReconstructKernel(benchmark::State& state)
{
    const Index n = state.range(0);
    const TRCores c = tr_init({n, n, 32}, {3, 12, 3}, 7);
    for (auto _ : state) benchmark::DoNotOptimize(tr_reconstruct(c));
}

void BM_ReconstructReference(benchmark::State& state)
{
    const Index n = state.range(0);
    const TRCores c = tr_init({n, n, 32}, {3, 12, 3}, 7);
    for (auto _ : state) benchmark::DoNotOptimize(reference::tr_reconstruct(c));
}

void BM_DotKernel(benchmark::State& state)
{
    const auto a = random_tensor({state.range(0)}, 8), b = random_tensor({state.range(0)}, 9);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(a.data(), b.data()));
}

void BM_DotReference(benchmark::State& state)
{
    const auto a = random_tensor({state.range(0)}, 8), b = random_tensor({state.range(0)}, 9);
    for (auto _ : state) benchmark::DoNotOptimize(reference::dot(a.data(), b.data()));
}

}  // namespace

BENCHMARK(BM_MergePairKernel)->Arg(32)->Arg(64);
BENCHMARK(BM_MergePairReference)->Arg(32)->Arg(64);
BENCHMARK(BM_Mode2TtmKernel)->Arg(64)->Arg(256);
BENCHMARK(BM_Mode2TtmReference)->Arg(64)->Arg(256);
BENCHMARK(BM_TrUnfoldKernel)->Arg(64)->Arg(128);
BENCHMARK(BM_TrUnfoldReference)->Arg(64)->Arg(128);
BENCHMARK(BM_ReconstructKernel)->Arg(32)->Arg(64);
BENCHMARK(BM_ReconstructReference)->Arg(32);
BENCHMARK(BM_DotKernel)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_DotReference)->Arg(1 << 16)->Arg(1 << 20);

BENCHMARK_MAIN();
