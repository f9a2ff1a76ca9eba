#include "sduo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include <stdexcept>
#include <thread>

#include "sduo/rng.hpp"

namespace sduo {

namespace {

using nlohmann::json;

constexpr std::uint64_t kLearnerTag = 0x1ea54e4;

[[noreturn]] void bad_key(const std::string& path, const std::string& why) {
    throw std::invalid_argument("config key '" + path + "': " + why);
}

void check_keys(const json& obj, const std::string& prefix,
                const std::vector<std::string>& allowed) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            bad_key(prefix.empty() ? key : prefix + "." + key, "unknown key");
    }
}

template <typename T>
void read_field(const json& obj, const std::string& prefix,
                const std::string& key, T& out) {
    if (!obj.contains(key))
        return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        bad_key(prefix.empty() ? key : prefix + "." + key, e.what());
    }
}

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

} // namespace

std::string RunConfig::dataset_tag() const {
    if (stream.source == SourceKind::file)
        return stem_of(stream.path);
    return source_name(stream.source) + "_" + variant;
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                    e.what());
    }
    if (!root.is_object())
        throw std::invalid_argument("config root must be an object");

    RunConfig cfg;
    check_keys(root, "",
               {"learner", "dataset", "variant", "path", "header", "budget",
                "seeds", "length", "memory_length", "seed_per_class", "jobs",
                "scale", "majority_class", "imbalance_ratio", "drift_times",
                "blob_sigma", "net", "head", "al", "augment", "metrics",
                "checkpoints", "out"});

    std::string learner = learner_name(cfg.learner);
    read_field(root, "", "learner", learner);
    cfg.learner = parse_learner(learner);

    std::string dataset = source_name(cfg.stream.source);
    read_field(root, "", "dataset", dataset);
    cfg.stream.source = parse_source(dataset);

    read_field(root, "", "path", cfg.stream.path);
    read_field(root, "", "header", cfg.stream.header);

    read_field(root, "", "variant", cfg.variant);
    if (cfg.stream.source != SourceKind::file) {
        StreamSpec variant_spec = make_variant_spec(cfg.stream.source, cfg.variant);
        variant_spec.path = cfg.stream.path;
        variant_spec.header = cfg.stream.header;
        cfg.stream = variant_spec;
    } else if (cfg.variant != "original") {
        bad_key("variant", "variants apply to synthetic datasets");
    }

    read_field(root, "", "budget", cfg.budget);
    if (cfg.budget < 0.0 || cfg.budget > 1.0)
        bad_key("budget", "must lie in [0, 1]");
    read_field(root, "", "seeds", cfg.seeds);
    if (cfg.seeds.empty())
        bad_key("seeds", "needs at least one seed");
    read_field(root, "", "length", cfg.stream.length);
    if (cfg.stream.length < 1)
        bad_key("length", "must be >= 1");
    read_field(root, "", "memory_length", cfg.net.memory_length);
    if (cfg.net.memory_length < 1)
        bad_key("memory_length", "must be >= 1");
    read_field(root, "", "seed_per_class", cfg.seed_per_class);
    if (cfg.seed_per_class < 0)
        bad_key("seed_per_class", "must be >= 0");
    read_field(root, "", "jobs", cfg.jobs);
    if (cfg.jobs < 1)
        bad_key("jobs", "must be >= 1");
    read_field(root, "", "scale", cfg.scale);
    read_field(root, "", "majority_class", cfg.stream.majority_class);

    if (root.contains("imbalance_ratio")) {
        double ratio = 0.0;
        read_field(root, "", "imbalance_ratio", ratio);
        if (ratio <= 0.0 || ratio >= 1.0)
            bad_key("imbalance_ratio", "must lie in (0, 1)");
        cfg.stream.imbalance_ratio = ratio;
    }
    if (root.contains("drift_times"))
        read_field(root, "", "drift_times", cfg.stream.drift_times);
    read_field(root, "", "blob_sigma", cfg.stream.blob_sigma);
    if (cfg.stream.blob_sigma < 0.0)
        bad_key("blob_sigma", "must be >= 0");

    if (root.contains("net")) {
        const json& net = root.at("net");
        check_keys(net, "net", {"hidden", "lr", "l2", "minibatch"});
        read_field(net, "net", "hidden", cfg.net.hidden);
        if (cfg.net.hidden.empty())
            bad_key("net.hidden", "needs >= 1 layer");
        read_field(net, "net", "lr", cfg.net.lr);
        if (cfg.net.lr <= 0.0)
            bad_key("net.lr", "must be > 0");
        read_field(net, "net", "l2", cfg.net.l2);
        if (cfg.net.l2 < 0.0)
            bad_key("net.l2", "must be >= 0");
        read_field(net, "net", "minibatch", cfg.net.minibatch);
        if (cfg.net.minibatch < 1)
            bad_key("net.minibatch", "must be >= 1");
    }
    if (root.contains("head")) {
        const json& head = root.at("head");
        check_keys(head, "head", {"hidden", "lr"});
        read_field(head, "head", "hidden", cfg.net.head_hidden);
        if (cfg.net.head_hidden.empty())
            bad_key("head.hidden", "needs >= 1 layer");
        read_field(head, "head", "lr", cfg.net.head_lr);
        if (cfg.net.head_lr <= 0.0)
            bad_key("head.lr", "must be > 0");
    }
    if (root.contains("al")) {
        const json& al = root.at("al");
        check_keys(al, "al", {"step", "delta", "window"});
        read_field(al, "al", "step", cfg.net.al_step);
        if (cfg.net.al_step <= 0.0)
            bad_key("al.step", "must be > 0");
        read_field(al, "al", "delta", cfg.net.al_delta);
        if (cfg.net.al_delta < 0.0)
            bad_key("al.delta", "must be >= 0");
        read_field(al, "al", "window", cfg.net.al_window);
        if (cfg.net.al_window < 2)
            bad_key("al.window", "must be >= 2");
    }
    if (root.contains("augment")) {
        const json& aug = root.at("augment");
        check_keys(aug, "augment",
                   {"beta1", "beta2", "beta3", "counts", "distance"});
        read_field(aug, "augment", "beta1", cfg.net.augment.beta1);
        read_field(aug, "augment", "beta2", cfg.net.augment.beta2);
        read_field(aug, "augment", "beta3", cfg.net.augment.beta3);
        const std::pair<const char*, double> betas[] = {
            {"augment.beta1", cfg.net.augment.beta1},
            {"augment.beta2", cfg.net.augment.beta2},
            {"augment.beta3", cfg.net.augment.beta3}};
        for (const auto& [key, beta] : betas)
            if (beta <= 0.0 || beta >= 1.0)
                bad_key(key, "must lie in (0, 1)");
        std::vector<int> counts{cfg.net.augment.counts[0],
                                cfg.net.augment.counts[1],
                                cfg.net.augment.counts[2]};
        read_field(aug, "augment", "counts", counts);
        if (counts.size() != 3)
            bad_key("augment.counts", "needs exactly 3 entries");
        for (int c : counts)
            if (c < 0)
                bad_key("augment.counts", "entries must be >= 0");
        cfg.net.augment.counts = {counts[0], counts[1], counts[2]};
        std::string distance =
            cfg.net.augment.distance == DistanceKind::cosine ? "cosine"
                                                             : "euclidean";
        read_field(aug, "augment", "distance", distance);
        if (distance == "cosine")
            cfg.net.augment.distance = DistanceKind::cosine;
        else if (distance == "euclidean")
            cfg.net.augment.distance = DistanceKind::euclidean;
        else
            bad_key("augment.distance", "must be cosine or euclidean");
    }
    if (root.contains("metrics")) {
        const json& met = root.at("metrics");
        check_keys(met, "metrics", {"fading", "pmauc_window"});
        read_field(met, "metrics", "fading", cfg.fading);
        if (cfg.fading <= 0.0 || cfg.fading > 1.0)
            bad_key("metrics.fading", "must lie in (0, 1]");
        read_field(met, "metrics", "pmauc_window", cfg.pmauc_window);
        if (cfg.pmauc_window < 1)
            bad_key("metrics.pmauc_window", "must be >= 1");
    }
    read_field(root, "", "checkpoints", cfg.checkpoints);
    read_field(root, "", "out", cfg.out_dir);

    if (cfg.stream.source == SourceKind::file && cfg.stream.path.empty())
        bad_key("path", "file datasets need a path");
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

MinMaxScaler MinMaxScaler::fit(const std::vector<LabelledExample>& seed) {
    MinMaxScaler scaler;
    if (seed.empty())
        return scaler;
    scaler.lo = seed.front().x;
    scaler.hi = seed.front().x;
    for (const LabelledExample& ex : seed) {
        scaler.lo = scaler.lo.cwiseMin(ex.x);
        scaler.hi = scaler.hi.cwiseMax(ex.x);
    }
    return scaler;
}

Eigen::VectorXd MinMaxScaler::apply(const Eigen::VectorXd& x) const {
    if (lo.size() == 0)
        return x;
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double range = hi(i) - lo(i);
        out(i) = range > 0.0 ? (x(i) - lo(i)) / range : 0.5;
    }
    return out;
}

RunLog run_single(const RunConfig& cfg, std::uint64_t seed) {
    StreamSpec spec = cfg.stream;
    spec.seed = seed;
    Stream stream(spec, cfg.seed_per_class);

    LearnerConfig lc = cfg.net;
    lc.num_classes = stream.num_classes();
    lc.input_dim = stream.dim();
    lc.budget = cfg.budget;

    std::vector<LabelledExample> seed_data = stream.seed_data();
    MinMaxScaler scaler;
    if (cfg.scale) {
        scaler = MinMaxScaler::fit(seed_data);
        for (LabelledExample& ex : seed_data)
            ex.x = scaler.apply(ex.x);
    }

    auto learner = make_learner(cfg.learner, lc, seed_data,
                                derive_seed(seed, kLearnerTag));

    FadingGmean gmean(stream.num_classes(), cfg.fading);
    SlidingPmauc pmauc(stream.num_classes(), cfg.pmauc_window);

    RunLog log;
    log.steps.reserve(static_cast<std::size_t>(stream.length()));
    for (int t = 1; t <= stream.length(); ++t) {
        LabelledExample ex = stream.at(t);
        if (cfg.scale)
            ex.x = scaler.apply(ex.x);
        LearnerStepOutcome out;
        try {
            out = learner->step(ex.x, [&ex] { return ex.label; });
        } catch (const std::exception& e) {
            throw std::runtime_error(
                "run failed (learner=" + learner_name(cfg.learner) +
                ", dataset=" + cfg.dataset_tag() + ", seed=" +
                std::to_string(seed) + ", t=" + std::to_string(t) +
                "): " + e.what());
        }
        gmean.update(out.predicted, ex.label);
        pmauc.update(out.scores, ex.label);
        log.steps.push_back({t, out.predicted, ex.label, out.queried,
                             gmean.value(), pmauc.value(), out.budget_spent});
    }
    return log;
}

std::vector<RunLog> run_experiment(const RunConfig& cfg) {
    std::vector<RunLog> logs(cfg.seeds.size());
    const int jobs =
        std::min<int>(cfg.jobs, static_cast<int>(cfg.seeds.size()));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
            logs[i] = run_single(cfg, cfg.seeds[i]);
        return logs;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(cfg.seeds.size());
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cfg.seeds.size())
                    return;
                try {
                    logs[i] = run_single(cfg, cfg.seeds[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    for (const auto& err : errors)
        if (err)
            std::rethrow_exception(err);
    return logs;
}

namespace {

json stats_at(const AggregateLog& agg, std::size_t idx) {
    json j;
    j["gmean"] = {{"mean", agg.gmean.mean[idx]},
                  {"std", agg.gmean.stddev[idx]}};
    j["pmauc"] = {{"mean", agg.pmauc.mean[idx]},
                  {"std", agg.pmauc.stddev[idx]}};
    j["budget_spent"] = {{"mean", agg.budget_spent.mean[idx]},
                         {"std", agg.budget_spent.stddev[idx]}};
    return j;
}

} // namespace

void emit_results(const RunConfig& cfg, const std::vector<RunLog>& logs) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create '" + cfg.out_dir +
                                 "': " + ec.message());

    const fs::path csv_path = fs::path(cfg.out_dir) / "results.csv";
    std::ofstream csv(csv_path);
    if (!csv)
        throw std::runtime_error("cannot write '" + csv_path.string() + "'");
    csv << "t,learner,dataset,seed,predicted,actual,queried,gmean,pmauc,"
           "budget_spent\n";
    csv.precision(17);
    const std::string learner = learner_name(cfg.learner);
    const std::string dataset = cfg.dataset_tag();
    for (std::size_t i = 0; i < logs.size(); ++i) {
        for (const StepRecord& r : logs[i].steps) {
            csv << r.t << ',' << learner << ',' << dataset << ','
                << cfg.seeds[i] << ',' << r.predicted << ',' << r.actual << ','
                << (r.queried ? 1 : 0) << ',' << r.gmean << ',' << r.pmauc
                << ',' << r.budget_spent << '\n';
        }
    }
    if (!csv)
        throw std::runtime_error("write failed on '" + csv_path.string() + "'");
    csv.close();

    const AggregateLog agg = aggregate_runs(logs);
    const std::size_t n = agg.gmean.mean.size();

    json summary;
    summary["learner"] = learner;
    summary["dataset"] = dataset;
    summary["variant"] = cfg.variant;
    summary["budget"] = cfg.budget;
    summary["seeds"] = cfg.seeds;
    summary["steps"] = n;
    summary["final"] = stats_at(agg, n - 1);
    json checkpoints = json::object();
    for (int cp : cfg.checkpoints) {
        if (cp >= 1 && static_cast<std::size_t>(cp) <= n)
            checkpoints[std::to_string(cp)] =
                stats_at(agg, static_cast<std::size_t>(cp) - 1);
    }
    summary["checkpoints"] = checkpoints;

    const fs::path json_path = fs::path(cfg.out_dir) / "summary.json";
    std::ofstream js(json_path);
    if (!js)
        throw std::runtime_error("cannot write '" + json_path.string() + "'");
    js << summary.dump(2) << '\n';
    if (!js)
        throw std::runtime_error("write failed on '" + json_path.string() +
                                 "'");
}

void materialize_stream(const StreamSpec& spec, int seed_per_class,
                        bool include_seed_block, const std::string& path) {
    Stream stream(spec, seed_per_class);
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out.precision(17);
    auto write_row = [&out](const LabelledExample& ex) {
        for (int e = 0; e < ex.x.size(); ++e)
            out << ex.x(e) << ',';
        out << ex.label << '\n';
    };
    if (include_seed_block)
        for (const auto& ex : stream.seed_data())
            write_row(ex);
    for (int t = 1; t <= stream.length(); ++t)
        write_row(stream.at(t));
    if (!out)
        throw std::runtime_error("write failed on '" + path + "'");
}

} // namespace sduo
