#include <benchmark/benchmark.h>

#include "sduo/experiment.hpp"
#include "sduo/rng.hpp"

using namespace sduo;

namespace {

Stream make_stream(int length) {
    StreamSpec spec = make_variant_spec(SourceKind::sea, "original");
    spec.seed = 1;
    spec.length = length;
    return Stream(spec, 10);
}

LearnerConfig stream_config(const Stream& s, double budget) {
    LearnerConfig cfg;
    cfg.num_classes = s.num_classes();
    cfg.input_dim = s.dim();
    cfg.budget = budget;
    return cfg;
}

MultiMemory full_memory(int K, int L, std::mt19937_64& rng) {
    MultiMemory mem(K, L);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int c = 1; c <= K; ++c)
        for (int i = 0; i < L; ++i)
            mem.append({Eigen::Vector2d(n(rng), n(rng)), c});
    return mem;
}

} // namespace

static void BM_StreamDraw(benchmark::State& state) {
    const Stream s = make_stream(18000);
    int t = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.at(t % 18000 + 1));
        ++t;
    }
}
BENCHMARK(BM_StreamDraw);

static void BM_BuildPairs(benchmark::State& state) {
    auto rng = make_rng(2);
    const MultiMemory mem =
        full_memory(10, static_cast<int>(state.range(0)), rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_pairs(mem, rng));
}
BENCHMARK(BM_BuildPairs)->Arg(5)->Arg(10);

static void BM_EncodeMemory(benchmark::State& state) {
    auto rng = make_rng(3);
    const MultiMemory mem = full_memory(10, 10, rng);
    const auto s1 = make_siamese_encoder_net(2, {32, 32}, 1e-4, 0.01, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(encode_all(mem, s1.encoder));
}
BENCHMARK(BM_EncodeMemory);

// One full training event of the latent pair classifier: augmentation of a
// 10x10 encoding memory, balanced pair building, one epoch.
static void BM_LatentTrainEvent(benchmark::State& state) {
    auto rng = make_rng(4);
    const MultiMemory mem = full_memory(10, 10, rng);
    auto s1 = make_siamese_encoder_net(2, {32, 32}, 1e-4, 0.01, rng);
    auto s2 = make_siamese_head_net(32, {16}, 1e-4, 0.001, rng);
    const auto enc = encode_all(mem, s1.encoder);
    AugmentConfig aug;
    for (auto _ : state) {
        const auto generated = build_generated(enc, aug, rng);
        const auto augmented = build_augmented(enc, generated);
        PairSet pairs = build_pairs_from_classes(augmented, rng);
        train_s2(s2, pairs, 64, rng);
        benchmark::DoNotOptimize(s2);
    }
}
BENCHMARK(BM_LatentTrainEvent)->Unit(benchmark::kMillisecond);

static void BM_LearnerStep(benchmark::State& state) {
    const auto kind = static_cast<LearnerKind>(state.range(0));
    const Stream s = make_stream(18000);
    auto learner = make_learner(kind, stream_config(s, 0.01), s.seed_data(), 5);
    int t = 0;
    for (auto _ : state) {
        const LabelledExample e = s.at(t % 18000 + 1);
        benchmark::DoNotOptimize(learner->step(e.x, [&] { return e.label; }));
        ++t;
    }
}
BENCHMARK(BM_LearnerStep)
    ->Arg(static_cast<int>(LearnerKind::baseline))
    ->Arg(static_cast<int>(LearnerKind::siamese))
    ->Arg(static_cast<int>(LearnerKind::siameseduo))
    ->Unit(benchmark::kMicrosecond);

static void BM_PmaucUpdate(benchmark::State& state) {
    auto rng = make_rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> cls(1, 10);
    SlidingPmauc p(10, 500);
    Eigen::VectorXd scores(10);
    for (auto _ : state) {
        for (int c = 0; c < 10; ++c)
            scores(c) = u(rng);
        scores /= scores.sum();
        p.update(scores, cls(rng));
        benchmark::DoNotOptimize(p.value());
    }
}
BENCHMARK(BM_PmaucUpdate);

BENCHMARK_MAIN();
