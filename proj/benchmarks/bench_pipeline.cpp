#include <benchmark/benchmark.h>

#include "irisct/image.hpp"
#include "irisct/synth.hpp"

namespace {

irisct::SynthEyeSpec bench_eye() {
    irisct::SynthEyeSpec s;
    s.pupil = {160, 140, 30};
    s.iris = {160, 140, 90};
    s.texture_seed = 42;
    s.noise_level = 0.05;
    return s;
}

void BM_SynthEye(benchmark::State& state) {
    auto spec = bench_eye();
    for (auto _ : state) {
        auto img = irisct::synth_eye(spec, 320, 280);
        benchmark::DoNotOptimize(img.pixels.data());
    }
}
BENCHMARK(BM_SynthEye);

void BM_PngRoundTrip(benchmark::State& state) {
    auto img = irisct::synth_eye(bench_eye(), 320, 280);
    for (auto _ : state) {
        auto bytes = irisct::io::encode_png(img);
        auto back = irisct::io::decode_png(bytes);
        benchmark::DoNotOptimize(back.pixels.data());
    }
}
BENCHMARK(BM_PngRoundTrip);

} // namespace

BENCHMARK_MAIN();
