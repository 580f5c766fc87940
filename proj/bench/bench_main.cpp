// Serial vs parallel timings for the four OpenMP kernels. Run with
// --benchmark_counters_tabular=true for a compact comparison.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "chaoslink/chaos.hpp"
#include "chaoslink/cipher.hpp"
#include "chaoslink/image.hpp"
#include "chaoslink/metrics.hpp"
#include "chaoslink/ofdm.hpp"
#include "testutil.hpp"

using namespace chaoslink;

namespace {

Exec exec_of(const benchmark::State& state) {
    return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

const char* label(const benchmark::State& state) {
    return state.range(0) == 0 ? "serial" : "parallel";
}

img::BitVec random_bits(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    img::BitVec b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(rng() & 1u);
    return b;
}

void bm_bifurcation_scan(benchmark::State& state) {
    chaos::SystemParams params;
    chaos::IntegratorConfig cfg;
    chaos::State init{1, 1, 1, 1, 1, 1};
    std::vector<double> grid;
    for (int i = 0; i < 32; ++i) grid.push_back(2.0 + 0.05 * i);
    for (auto _ : state) {
        auto scan = chaos::bifurcation_scan("r", grid, init, params, cfg, 5000, 5000,
                                            exec_of(state));
        benchmark::DoNotOptimize(scan.points.size());
    }
    state.SetLabel(label(state));
}

void bm_diffuse(benchmark::State& state) {
    auto image = testutil::synthetic_image(1024, 1024, 0);
    auto q = cipher::q_power(20);
    for (auto _ : state) {
        auto out = cipher::diffuse(image, q, exec_of(state));
        benchmark::DoNotOptimize(out.pixels.data());
    }
    state.SetLabel(label(state));
}

void bm_ber_sweep(benchmark::State& state) {
    ofdm::OfdmConfig cfg;
    auto bits = random_bits(200'000, 42);
    std::vector<double> grid{0, 5, 10, 15, 20, 25, 30, 35};
    for (auto _ : state) {
        auto rows = ofdm::ber_sweep(bits, cfg, grid, 7, exec_of(state));
        benchmark::DoNotOptimize(rows.front().report.ber);
    }
    state.SetLabel(label(state));
}

void bm_run_suite(benchmark::State& state) {
    chaos::SystemParams params;
    chaos::IntegratorConfig cfg;
    auto cipher_img =
        cipher::encrypt(testutil::synthetic_image(256, 256, 0), cipher::CipherOptions{}, params,
                        cfg)
            .cipher;
    auto bits = img::bits_from_image(cipher_img);
    for (auto _ : state) {
        auto results = metrics::run_suite(bits, exec_of(state));
        benchmark::DoNotOptimize(results.size());
    }
    state.SetLabel(label(state));
}

BENCHMARK(bm_bifurcation_scan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_diffuse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_ber_sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_run_suite)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
