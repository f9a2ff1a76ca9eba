#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sduo/learners.hpp"
#include "sduo/metrics.hpp"
#include "sduo/streams.hpp"

namespace sduo {

// Fully resolved experiment description. Defaults mirror the benchmark
// settings: synthetic 18000-step streams, budget 1%, memories of 10 per
// class seeded with 10 examples per class, [32,32] encoder at lr 0.01 with
// L2 1e-4 and mini-batches of 64, [16] latent head at lr 0.001, threshold
// step 0.01 with unit randomisation over a 300-step budget window, mixed
// augmentation (3,3,3) at beta 0.1 under cosine distance, fading factor
// 0.99, AUC window 500.
struct RunConfig {
    LearnerKind learner = LearnerKind::siameseduo;
    StreamSpec stream;
    std::string variant = "original";
    double budget = 0.01;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    int seed_per_class = 10;
    int jobs = 1;
    bool scale = true; // per-feature min-max scaling fitted on the seed set

    LearnerConfig net; // num_classes/input_dim resolved per stream

    double fading = 0.99;
    int pmauc_window = 500;
    std::vector<int> checkpoints{8000, 12000, 18000};
    std::string out_dir = "results";

    // dataset tag used in result rows, e.g. "sea_abrupt"
    std::string dataset_tag() const;
};

RunConfig default_config();

// Per-feature affine map onto [0,1] fitted on the labelled seed set.
// Features with zero observed range map to 0.5; values outside the fitted
// range extrapolate linearly (no clamping). Fitting on an empty set yields
// the identity map.
struct MinMaxScaler {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    static MinMaxScaler fit(const std::vector<LabelledExample>& seed);
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

// Strict parse: unknown or ill-typed keys fail naming the key; absent keys
// keep their defaults.
RunConfig parse_config_text(const std::string& json_text);
RunConfig parse_config_file(const std::string& path);

// One prequential pass for a single seed.
RunLog run_single(const RunConfig& cfg, std::uint64_t seed);

// All seeds (parallel across seeds when cfg.jobs > 1), in seed order.
std::vector<RunLog> run_experiment(const RunConfig& cfg);

// results.csv (schema t,learner,dataset,seed,predicted,actual,queried,
// gmean,pmauc,budget_spent) and summary.json (final and per-checkpoint
// mean/std across seeds) under cfg.out_dir.
void emit_results(const RunConfig& cfg, const std::vector<RunLog>& logs);

// Write a stream as delimited rows (x1..xd,label). With seed block, the
// warm-up examples (seed_per_class per class) come first so the file can be
// replayed as a self-contained dataset.
void materialize_stream(const StreamSpec& spec, int seed_per_class,
                        bool include_seed_block, const std::string& path);

} // namespace sduo
