#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sduo/experiment.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& learner,
            const std::string& dataset, double budget,
            const std::vector<std::uint64_t>& seeds, const std::string& out,
            const std::string& variant, int jobs) {
    sduo::RunConfig cfg = config_path.empty()
                              ? sduo::default_config()
                              : sduo::parse_config_file(config_path);
    if (!learner.empty())
        cfg.learner = sduo::parse_learner(learner);
    if (!dataset.empty()) {
        cfg.stream.source = sduo::parse_source(dataset);
        if (cfg.stream.source != sduo::SourceKind::file) {
            const int length = cfg.stream.length;
            cfg.stream = sduo::make_variant_spec(cfg.stream.source, cfg.variant);
            cfg.stream.length = length;
        }
    }
    if (!variant.empty()) {
        cfg.variant = variant;
        if (cfg.stream.source != sduo::SourceKind::file) {
            const int length = cfg.stream.length;
            cfg.stream = sduo::make_variant_spec(cfg.stream.source, variant);
            cfg.stream.length = length;
        }
    }
    if (budget >= 0.0)
        cfg.budget = budget;
    if (!seeds.empty())
        cfg.seeds = seeds;
    if (!out.empty())
        cfg.out_dir = out;
    if (jobs > 0)
        cfg.jobs = jobs;

    const auto logs = sduo::run_experiment(cfg);
    sduo::emit_results(cfg, logs);

    const auto agg = sduo::aggregate_runs(logs);
    const std::size_t last = agg.gmean.mean.size() - 1;
    std::cout << "learner=" << sduo::learner_name(cfg.learner)
              << " dataset=" << cfg.dataset_tag() << " budget=" << cfg.budget
              << " seeds=" << cfg.seeds.size() << "\n"
              << "final gmean " << agg.gmean.mean[last] << " +- "
              << agg.gmean.stddev[last] << ", pmauc " << agg.pmauc.mean[last]
              << " +- " << agg.pmauc.stddev[last] << ", spent "
              << agg.budget_spent.mean[last] << "\n"
              << "results in " << cfg.out_dir << "\n";
    return 0;
}

int cmd_gen(const std::string& dataset, const std::string& variant,
            const std::string& out, std::uint64_t seed, int length,
            bool seed_block, int seed_per_class) {
    sduo::StreamSpec spec =
        sduo::make_variant_spec(sduo::parse_source(dataset), variant);
    spec.seed = seed;
    if (length > 0)
        spec.length = length;
    sduo::materialize_stream(spec, seed_per_class, seed_block, out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stream learning benchmark: active learning with siamese "
                 "networks and latent augmentation"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment");
    std::string config_path, learner, dataset, out, variant;
    double budget = -1.0;
    std::vector<std::uint64_t> seeds;
    int jobs = 0;
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--learner", learner,
                    "baseline | nn | siamese | siameseduo");
    run->add_option("--dataset", dataset, "sea | circles | blobs | file");
    run->add_option("--variant", variant,
                    "original | abrupt | imbalance | abrupt_imbalance | "
                    "recurrent");
    run->add_option("--budget", budget, "labelling budget in [0, 1]");
    run->add_option("--seeds", seeds, "run seeds (space separated)");
    run->add_option("--out", out, "output directory");
    run->add_option("--jobs", jobs, "parallel seed workers");

    auto* gen = app.add_subcommand("gen", "materialize a synthetic stream");
    std::string gen_dataset, gen_variant = "original", gen_out;
    std::uint64_t gen_seed = 1;
    int gen_length = 0, gen_seed_per_class = 10;
    bool gen_seed_block = false;
    gen->add_option("--dataset", gen_dataset, "sea | circles | blobs")
        ->required();
    gen->add_option("--variant", gen_variant,
                    "original | abrupt | imbalance | abrupt_imbalance | "
                    "recurrent");
    gen->add_option("--out", gen_out, "output file")->required();
    gen->add_option("--seed", gen_seed, "stream seed");
    gen->add_option("--length", gen_length, "steps to materialize");
    gen->add_flag("--seed-block", gen_seed_block,
                  "prepend the warm-up examples (10 per class by default)");
    gen->add_option("--seed-per-class", gen_seed_per_class,
                    "warm-up examples per class for --seed-block");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, learner, dataset, budget, seeds, out,
                           variant, jobs);
        if (gen->parsed())
            return cmd_gen(gen_dataset, gen_variant, gen_out, gen_seed,
                           gen_length, gen_seed_block, gen_seed_per_class);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
