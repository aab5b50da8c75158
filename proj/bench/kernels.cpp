#include <random>

#include <benchmark/benchmark.h>

#include "cmslab/spinspace.hpp"
#include "cmslab/suites.hpp"
#include "cmslab/wkb.hpp"

using namespace cmslab;

namespace {

std::vector<cplx> random_amplitudes(std::size_t d) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<cplx> v(d);
    for (auto& a : v) a = cplx(g(rng), g(rng));
    return v;
}

SiteMap shift(int n) {
    SiteMap s(n);
    for (int i = 0; i < n; ++i) s[i] = (i + 1) % n;
    return s;
}

template <bool Parallel>
void BM_Permutation(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0)), N = 2;
    auto in = random_amplitudes(spin_dim(n, N));
    std::vector<cplx> out(in.size());
    const SiteMap sigma = shift(n);
    for (auto _ : st) {
        if constexpr (Parallel) apply_permutation(sigma, n, N, in.data(), out.data());
        else apply_permutation_serial(sigma, n, N, in.data(), out.data());
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long long>(in.size()));
}

template <bool Parallel>
void BM_WKBAssembly(benchmark::State& st) {
    auto pr = suites::wkb_case("cosine");
    PeriodicGrid grid{-8 * 3.141592653589793, 16 * 3.141592653589793, static_cast<int>(st.range(0))};
    for (auto _ : st) {
        auto w = Parallel ? assemble(pr, grid, 1.0, {0.05}) : assemble_serial(pr, grid, 1.0, {0.05});
        benchmark::DoNotOptimize(w.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_Pointwise(benchmark::State& st) {
    const int M = static_cast<int>(st.range(0)), N = 2;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    std::vector<CMatrix> U(M, CMatrix(N, N));
    for (auto& u : U)
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) u(a, b) = cplx(g(rng), g(rng));
    CMatrix field = CMatrix::Random(M, N);
    for (auto _ : st) {
        if constexpr (Parallel) apply_pointwise(U, field);
        else apply_pointwise_serial(U, field);
        field /= field.norm();
        benchmark::DoNotOptimize(field.data());
    }
    st.SetItemsProcessed(st.iterations() * M);
}

}  // namespace

BENCHMARK(BM_Permutation<false>)->Name("permutation/serial")->Arg(10)->Arg(14)->Arg(18);
BENCHMARK(BM_Permutation<true>)->Name("permutation/openmp")->Arg(10)->Arg(14)->Arg(18);
BENCHMARK(BM_WKBAssembly<false>)->Name("wkb_assembly/serial")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WKBAssembly<true>)->Name("wkb_assembly/openmp")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pointwise<false>)->Name("pointwise/serial")->Arg(4096)->Arg(65536);
BENCHMARK(BM_Pointwise<true>)->Name("pointwise/openmp")->Arg(4096)->Arg(65536);

BENCHMARK_MAIN();
