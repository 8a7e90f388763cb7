// Copyright (c) 2026, siamcut contributors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <string>

#include "siamcut/datakit.hpp"
#include "siamcut/imaging.hpp"
#include "siamcut/ops.hpp"
#include "siamcut/siamese.hpp"

using namespace siamcut;

namespace {

Tensor<float> random_tensor(Shape shape, Rng& rng) {
    Tensor<float> t(shape);
    for (auto& v : t.values) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    return t;
}

void BM_Conv2dForward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    const auto x = random_tensor({16, n, n}, rng);
    const auto w = random_tensor({32, 16, 3, 3}, rng);
    for (auto _ : state) {
        ad::Tape<float> tape;
        const auto y = ad::conv2d(tape, tape.constant(x), tape.constant(w), std::nullopt, 1, ad::Padding::Same);
        benchmark::DoNotOptimize(tape.value(y).data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * 32 * 16 * 9));
}
BENCHMARK(BM_Conv2dForward)->Arg(16)->Arg(32)->Arg(64);

void BM_Otsu(benchmark::State& state) {
    Rng rng(2);
    std::array<std::uint64_t, 256> h{};
    for (auto& v : h) v = rng.index(1000);
    for (auto _ : state) benchmark::DoNotOptimize(imaging::otsu_threshold(h));
}
BENCHMARK(BM_Otsu);

void BM_SegmentCut(benchmark::State& state) {
    data::SyntheticSpec spec;
    spec.size = static_cast<int>(state.range(0));
    const Image img = data::render_synthetic(spec, 0, 0).image;
    for (auto _ : state) benchmark::DoNotOptimize(imaging::segment_cut(img).masked.data().data());
}
BENCHMARK(BM_SegmentCut)->Arg(64)->Arg(299);

void BM_DeskForwardPair(benchmark::State& state) {
    const auto cfg = backbone::BackboneConfig::load(std::string(SIAMCUT_CONFIG_DIR) + "/desk.cfg");
    Rng rng(3);
    const auto model = siamese::Model<float>::build(cfg, rng);
    const auto a = random_tensor({3, 64, 64}, rng), b = random_tensor({3, 64, 64}, rng);
    for (auto _ : state) benchmark::DoNotOptimize(siamese::forward_pair(model, a, b));
}
BENCHMARK(BM_DeskForwardPair)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
