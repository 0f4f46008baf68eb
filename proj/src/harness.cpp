#include "wtda/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

namespace wtda {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int epochs_to_reach(const std::vector<double>& acc, double target) {
    for (std::size_t i = 0; i < acc.size(); ++i)
        if (acc[i] >= target) return int(i) + 1;
    return -1;
}

nlohmann::json split_sizes_json(const SplitSizes& s) {
    return {{"train", s.train}, {"val", s.val}, {"test", s.test}};
}

}  // namespace

TrainConfig BasicSpec::train_cfg() const {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.seed = seed;
    return cfg;
}

nlohmann::json environment_fingerprint() {
    std::string model = "unknown";
    std::ifstream cpuinfo("/proc/cpuinfo");
    std::string line;
    while (std::getline(cpuinfo, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto pos = line.find(':');
            if (pos != std::string::npos) model = line.substr(pos + 2);
            break;
        }
    }
    return {{"cpu", model}, {"hardware_threads", std::thread::hardware_concurrency()}};
}

FeatureSet featurize_dataset(const Dataset& ds, const PIConfig& cfg, int threads) {
    std::vector<PointCloud> clouds;
    clouds.reserve(ds.wafers.size());
    for (const auto& w : ds.wafers) clouds.push_back(w.points);
    FeatureSet fs;
    fs.config = cfg;
    fs.features = featurize_many(clouds, cfg, threads);
    for (const auto& e : ds.manifest.entries) fs.labels.push_back(int(e.label));
    return fs;
}

SplitFeatures split_features(const Dataset& ds, const FeatureSet& fs) {
    SplitFeatures out;
    std::vector<std::size_t> tr, va, te;
    for (std::size_t i = 0; i < ds.manifest.entries.size(); ++i) {
        const auto& part = ds.manifest.entries[i].split;
        (part == "train" ? tr : part == "val" ? va : te).push_back(i);
    }
    auto gather = [&](const std::vector<std::size_t>& idx, Eigen::MatrixXd& X,
                      std::vector<int>& y) {
        if (idx.empty()) return;
        X.resize(Eigen::Index(idx.size()), Eigen::Index(fs.features[0].values.size()));
        for (std::size_t r = 0; r < idx.size(); ++r) {
            for (std::size_t c = 0; c < fs.features[idx[r]].values.size(); ++c)
                X(Eigen::Index(r), Eigen::Index(c)) = fs.features[idx[r]].values[c];
            y.push_back(fs.labels[idx[r]]);
        }
    };
    gather(tr, out.X_train, out.y_train);
    gather(va, out.X_val, out.y_val);
    gather(te, out.X_test, out.y_test);
    return out;
}

nlohmann::json run_basic(const BasicSpec& spec) {
    std::array<std::size_t, kNumClasses> counts;
    counts.fill(spec.per_class);

    auto t0 = Clock::now();
    const Dataset ds = generate_dataset(counts, spec.seed, spec.split);
    const double gen_s = seconds_since(t0);

    t0 = Clock::now();
    const FeatureSet fs = featurize_dataset(ds, spec.pi, spec.threads);
    const double feat_s = seconds_since(t0);

    const SplitFeatures sf = split_features(ds, fs);
    const TrainConfig cfg = spec.train_cfg();

    t0 = Clock::now();
    auto [model, curves] = train(sf.X_train, sf.y_train, sf.X_val, sf.y_val, cfg);
    const double train_s = seconds_since(t0);

    const EvalReport test = evaluate(model, sf.X_test, sf.y_test);

    nlohmann::json j;
    j["kind"] = "basic";
    j["spec"] = {{"per_class", spec.per_class},
                 {"split", split_sizes_json(spec.split)},
                 {"epochs", spec.epochs},
                 {"seed", spec.seed},
                 {"threads", spec.threads},
                 {"pi_config", pi_config_to_json(spec.pi)},
                 {"train_config", train_config_to_json(cfg)}};
    j["environment"] = environment_fingerprint();
    j["accuracy"] = test.accuracy;
    j["confusion"] = test.confusion;
    j["curves"] = eval_report_to_json(curves)["curves"];
    j["epochs_to_90pct_train"] = epochs_to_reach(curves.train_acc, 0.9);
    j["timing"] = {{"generate_seconds", gen_s},
                   {"featurize_seconds", feat_s},
                   {"train_seconds", train_s},
                   {"mean_epoch_seconds", train_s / std::max(1, spec.epochs)}};
    return j;
}

nlohmann::json run_bench(const BenchSpec& spec) {
    // a model has to exist before prediction can be timed; train a quick one
    BasicSpec train_spec;
    train_spec.epochs = spec.model_epochs;
    train_spec.seed = spec.seed;
    train_spec.threads = spec.threads;
    train_spec.pi = spec.pi;

    std::array<std::size_t, kNumClasses> counts;
    counts.fill(train_spec.per_class);
    const Dataset train_ds = generate_dataset(counts, spec.seed, train_spec.split);
    const FeatureSet train_fs = featurize_dataset(train_ds, spec.pi, spec.threads);
    const SplitFeatures sf = split_features(train_ds, train_fs);
    auto [model, curves] = train(sf.X_train, sf.y_train, sf.X_val, sf.y_val,
                                 train_spec.train_cfg());

    nlohmann::json results = nlohmann::json::array();
    std::uint64_t ds_index = 0;
    for (const double ratio : spec.ratios) {
        for (const std::size_t total : spec.totals) {
            const auto n_random = std::size_t(std::lround(double(total) * ratio));
            const std::size_t rest = total - n_random;
            std::array<std::size_t, kNumClasses> mix{};
            mix[0] = n_random;
            for (int c = 1; c < kNumClasses; ++c) mix[c] = rest / 4;
            for (std::size_t c = 0; c < rest % 4; ++c) ++mix[c + 1];

            const std::uint64_t mix_seed = splitmix64(spec.seed ^ 0x62656e6368ULL);
            const Dataset mix_ds = generate_dataset(mix, mix_seed + ds_index, {});
            ++ds_index;

            std::vector<double> feat_times, infer_times, totals_s;
            for (int rep = 0; rep < spec.repetitions; ++rep) {
                auto t0 = Clock::now();
                const FeatureSet fs = featurize_dataset(mix_ds, spec.pi, spec.threads);
                const double feat_s = seconds_since(t0);
                t0 = Clock::now();
                const std::vector<int> pred = predict(model, fs.matrix());
                const double infer_s = seconds_since(t0);
                (void)pred;
                feat_times.push_back(feat_s);
                infer_times.push_back(infer_s);
                totals_s.push_back(feat_s + infer_s);
            }
            auto median = [](std::vector<double> v) {
                std::sort(v.begin(), v.end());
                return v[v.size() / 2];
            };
            results.push_back({{"ratio", ratio},
                               {"total_wafers", total},
                               {"counts", mix},
                               {"featurize_seconds", median(feat_times)},
                               {"inference_seconds", median(infer_times)},
                               {"total_seconds", median(totals_s)},
                               {"repetitions", spec.repetitions}});
        }
    }

    nlohmann::json j;
    j["kind"] = "bench";
    j["spec"] = {{"ratios", spec.ratios},
                 {"totals", spec.totals},
                 {"repetitions", spec.repetitions},
                 {"model_epochs", spec.model_epochs},
                 {"seed", spec.seed},
                 {"threads", spec.threads},
                 {"pi_config", pi_config_to_json(spec.pi)}};
    j["environment"] = environment_fingerprint();
    j["results"] = results;
    return j;
}

nlohmann::json run_small_data(const SmallDataSpec& spec) {
    std::array<std::size_t, kNumClasses> test_counts;
    test_counts.fill(spec.test_per_class);
    const std::uint64_t test_seed = splitmix64(spec.seed ^ 0x7465737473657400ULL);
    const Dataset test_ds = generate_dataset(test_counts, test_seed, {});
    const FeatureSet test_fs = featurize_dataset(test_ds, spec.pi, spec.threads);
    const Eigen::MatrixXd X_test = test_fs.matrix();
    const std::vector<int>& y_test = test_fs.labels;

    const std::size_t max_size = *std::max_element(spec.sizes.begin(), spec.sizes.end());
    nlohmann::json per_run = nlohmann::json::array();
    std::vector<double> mean_acc(spec.sizes.size(), 0.0);

    for (int s = 0; s < spec.num_seeds; ++s) {
        // one training pool per seed; smaller training sets are its prefixes
        const std::uint64_t pool_seed = splitmix64(spec.seed + 0x9000 + std::uint64_t(s));
        std::array<std::size_t, kNumClasses> pool_counts;
        pool_counts.fill(max_size);
        const Dataset pool = generate_dataset(pool_counts, pool_seed, {});
        const FeatureSet pool_fs = featurize_dataset(pool, spec.pi, spec.threads);

        for (std::size_t si = 0; si < spec.sizes.size(); ++si) {
            const std::size_t size = spec.sizes[si];
            Eigen::MatrixXd X(Eigen::Index(size * kNumClasses),
                              Eigen::Index(pool_fs.features[0].values.size()));
            std::vector<int> y;
            Eigen::Index r = 0;
            for (int c = 0; c < kNumClasses; ++c) {
                for (std::size_t i = 0; i < size; ++i) {
                    const std::size_t idx = std::size_t(c) * max_size + i;
                    for (std::size_t k = 0; k < pool_fs.features[idx].values.size(); ++k)
                        X(r, Eigen::Index(k)) = pool_fs.features[idx].values[k];
                    y.push_back(pool_fs.labels[idx]);
                    ++r;
                }
            }
            TrainConfig cfg;
            cfg.epochs = spec.epochs;
            cfg.seed = splitmix64(pool_seed + size);
            auto [model, curves] = train(X, y, {}, {}, cfg);
            const EvalReport rep = evaluate(model, X_test, y_test);
            mean_acc[si] += rep.accuracy / double(spec.num_seeds);
            per_run.push_back({{"train_per_class", size},
                               {"seed_index", s},
                               {"pool_seed", pool_seed},
                               {"train_seed", cfg.seed},
                               {"accuracy", rep.accuracy}});
        }
    }

    nlohmann::json j;
    j["kind"] = "small_data";
    j["spec"] = {{"sizes", spec.sizes},
                 {"test_per_class", spec.test_per_class},
                 {"test_seed", test_seed},
                 {"num_seeds", spec.num_seeds},
                 {"epochs", spec.epochs},
                 {"seed", spec.seed},
                 {"threads", spec.threads},
                 {"pi_config", pi_config_to_json(spec.pi)}};
    j["environment"] = environment_fingerprint();
    j["runs"] = per_run;
    for (std::size_t si = 0; si < spec.sizes.size(); ++si)
        j["mean_accuracy_by_size"].push_back(
            {{"train_per_class", spec.sizes[si]}, {"accuracy", mean_acc[si]}});
    return j;
}

nlohmann::json run_imbalanced(const ImbalancedSpec& spec) {
    std::array<std::size_t, kNumClasses> test_counts;
    test_counts.fill(spec.test_per_class);
    const std::uint64_t test_seed = splitmix64(spec.seed ^ 0x7465737473657400ULL);
    const Dataset test_ds = generate_dataset(test_counts, test_seed, {});
    const FeatureSet test_fs = featurize_dataset(test_ds, spec.pi, spec.threads);
    const Eigen::MatrixXd X_test = test_fs.matrix();

    Rng draw_rng(splitmix64(spec.seed ^ 0x696d62616c616e63ULL));
    nlohmann::json datasets = nlohmann::json::array();
    double acc_sum = 0.0;

    for (int d = 0; d < spec.num_datasets; ++d) {
        std::array<std::size_t, kNumClasses> counts;
        for (auto& c : counts) c = std::size_t(draw_rng.uniform_int(1, 300));
        const std::uint64_t ds_seed = splitmix64(spec.seed + 0xd000 + std::uint64_t(d));
        const Dataset ds = generate_dataset(counts, ds_seed, {});
        const FeatureSet fs = featurize_dataset(ds, spec.pi, spec.threads);

        TrainConfig cfg;
        cfg.epochs = spec.epochs;
        cfg.seed = ds_seed;
        auto [model, curves] = train(fs.matrix(), fs.labels, {}, {}, cfg);
        const EvalReport rep = evaluate(model, X_test, test_fs.labels);
        acc_sum += rep.accuracy;
        datasets.push_back({{"dataset_index", d},
                            {"counts", counts},
                            {"dataset_seed", ds_seed},
                            {"accuracy", rep.accuracy}});
    }

    nlohmann::json j;
    j["kind"] = "imbalanced";
    j["spec"] = {{"num_datasets", spec.num_datasets},
                 {"test_per_class", spec.test_per_class},
                 {"test_seed", test_seed},
                 {"epochs", spec.epochs},
                 {"seed", spec.seed},
                 {"threads", spec.threads},
                 {"pi_config", pi_config_to_json(spec.pi)}};
    j["environment"] = environment_fingerprint();
    j["datasets"] = datasets;
    j["mean_accuracy"] = acc_sum / std::max(1, spec.num_datasets);
    return j;
}

}  // namespace wtda
