// Microbenchmarks for the hot paths: the transform pair, the mask-gradient
// chain, head forward/training, and phantom generation.

#include <benchmark/benchmark.h>

#include "igs/grid.hpp"
#include "igs/heads.hpp"
#include "igs/igs.hpp"
#include "igs/losses.hpp"
#include "igs/phantom.hpp"
#include "igs/rng.hpp"
#include "igs/sampling.hpp"

using namespace igs;

namespace {

Image random_image(int n, uint64_t seed) {
    Rng rng{seed};
    Image img(n, n);
    for (auto& v : img.v) v = rng.uniform(0.0, 1.0);
    return img;
}

std::vector<TrainSample> phantom_samples(int count, int size, bool seg_target) {
    std::vector<TrainSample> out;
    for (int i = 0; i < count; ++i) {
        Phantom p = gen_phantom(size, 100 + i, 1.0, 0.01);
        TrainSample s;
        s.x = p.image;
        s.ygrid = seg_target ? p.seg : p.image;
        s.ypair = {double(p.label), 1.0 - p.label};
        out.push_back(std::move(s));
    }
    return out;
}

void BM_Fft2Unitary(benchmark::State& state) {
    Image img = random_image(int(state.range(0)), 7);
    for (auto _ : state) benchmark::DoNotOptimize(fft2_unitary(img));
}
BENCHMARK(BM_Fft2Unitary)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_ApplyPattern(benchmark::State& state) {
    int n = int(state.range(0));
    Image img = random_image(n, 11);
    SamplingPattern pat = center_pattern(n, n / 4);
    for (auto _ : state) benchmark::DoNotOptimize(apply_pattern(img, pat));
}
BENCHMARK(BM_ApplyPattern)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_SsimLoss(benchmark::State& state) {
    Image a = random_image(64, 3), b = random_image(64, 4);
    LossSpec spec{LossKind::Ssim, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(ssim_loss(a.v, b.v, spec));
}
BENCHMARK(BM_SsimLoss)->Unit(benchmark::kMicrosecond);

void BM_DiceLoss(benchmark::State& state) {
    Rng rng{5};
    std::vector<double> y(64 * 64), yhat(64 * 64);
    for (auto& v : y) v = rng.uniform(0.0, 1.0) < 0.3 ? 1.0 : 0.0;
    for (auto& v : yhat) v = rng.uniform(0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(dice_loss(y, yhat));
}
BENCHMARK(BM_DiceLoss)->Unit(benchmark::kMicrosecond);

void BM_HeadForward(benchmark::State& state) {
    auto kind = state.range(0) == 0 ? HeadKind::ConvSegmenter : HeadKind::ConvClassifier;
    Head head = make_head(kind, 21);
    Image img = random_image(64, 9);
    for (auto _ : state) benchmark::DoNotOptimize(head_forward(head, img));
}
BENCHMARK(BM_HeadForward)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_MaskGradient(benchmark::State& state) {
    auto samples = phantom_samples(4, int(state.range(0)), true);
    Head head = make_head(HeadKind::ConvSegmenter, 3);
    SamplingPattern pat = center_pattern(int(state.range(0)), int(state.range(0)) / 4);
    LossSpec loss{LossKind::Dice, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(mask_gradient(samples, pat, head, loss));
}
BENCHMARK(BM_MaskGradient)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_IgsRun(benchmark::State& state) {
    auto samples = phantom_samples(8, 16, false);
    Head head = make_head(HeadKind::IdentityRecon, 0);
    IgsConfig cfg;
    cfg.budget = 4;
    cfg.loss = LossSpec{LossKind::L1, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(igs_run(samples, head, cfg));
}
BENCHMARK(BM_IgsRun)->Unit(benchmark::kMillisecond);

void BM_GenPhantom(benchmark::State& state) {
    int n = int(state.range(0));
    uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(gen_phantom(n, seed++, 0.5, 0.01));
}
BENCHMARK(BM_GenPhantom)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_TrainEpoch(benchmark::State& state) {
    auto samples = phantom_samples(16, 16, true);
    LossSpec loss{LossKind::Dice, 1.0};
    for (auto _ : state) {
        Head head = make_head(HeadKind::ConvSegmenter, 13);
        train_head(head, samples, loss, 1, 4, 77, 0);
        benchmark::DoNotOptimize(head);
    }
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
