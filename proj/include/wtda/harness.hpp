#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "wtda/classifier.hpp"
#include "wtda/io.hpp"
#include "wtda/persistence_image.hpp"
#include "wtda/wafer_sim.hpp"

namespace wtda {

// Basic run: generate per_class wafers per class, split, featurize, train,
// evaluate on the held-out test split.
struct BasicSpec {
    std::size_t per_class = 500;
    SplitSizes split{300, 100, 100};
    int epochs = 700;
    std::uint64_t seed = 1;
    int threads = 1;
    PIConfig pi;
    TrainConfig train_cfg() const;
};

// Throughput run: prediction wall time on mixed datasets dominated by the
// random class. Times are hardware-bound, so only shapes are asserted upstream.
struct BenchSpec {
    std::vector<double> ratios{0.7, 0.8, 0.9};
    std::vector<std::size_t> totals{500, 1000};
    int repetitions = 3;  // median-of-N wall clock
    int model_epochs = 50;
    std::uint64_t seed = 1;
    int threads = 1;
    PIConfig pi;
};

// Small-data run: shared test set, one model per training-set size,
// averaged over num_seeds model/data seeds.
struct SmallDataSpec {
    std::vector<std::size_t> sizes{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::size_t test_per_class = 100;
    int num_seeds = 5;
    int epochs = 700;
    std::uint64_t seed = 1;
    int threads = 1;
    PIConfig pi;
};

// Imbalanced run: per-class training counts drawn uniformly on {1..300},
// one dataset per draw, shared test set.
struct ImbalancedSpec {
    int num_datasets = 10;
    std::size_t test_per_class = 100;
    int epochs = 700;
    std::uint64_t seed = 1;
    int threads = 1;
    PIConfig pi;
};

nlohmann::json run_basic(const BasicSpec& spec);
nlohmann::json run_bench(const BenchSpec& spec);
nlohmann::json run_small_data(const SmallDataSpec& spec);
nlohmann::json run_imbalanced(const ImbalancedSpec& spec);

// CPU model / core count, attached to every report (absolute timings are
// meaningless without it).
nlohmann::json environment_fingerprint();

// Featurize a dataset into a FeatureSet keyed by manifest order.
FeatureSet featurize_dataset(const Dataset& ds, const PIConfig& cfg, int threads);

// Split a featurized dataset by the manifest's split tags.
struct SplitFeatures {
    Eigen::MatrixXd X_train, X_val, X_test;
    std::vector<int> y_train, y_val, y_test;
};
SplitFeatures split_features(const Dataset& ds, const FeatureSet& fs);

}  // namespace wtda
