#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "wtda/ph_engine.hpp"
#include "wtda/rng.hpp"

namespace wtda {

enum class DefectLabel : int { Random = 0, Ring = 1, Scratch = 2, Dense = 3, Cluster = 4 };

inline constexpr int kNumClasses = 5;
inline constexpr double kWaferRadius = 10.0;

const char* label_name(DefectLabel label);
DefectLabel label_from_name(const std::string& name);

struct WaferMap {
    PointCloud points;  // all inside the radius-10 disk
    DefectLabel label = DefectLabel::Random;
    std::uint64_t seed = 0;
    nlohmann::json meta;  // generation parameters actually drawn
};

WaferMap gen_random(Rng& rng);
WaferMap gen_ring(Rng& rng);
WaferMap gen_scratch(Rng& rng);
WaferMap gen_dense(Rng& rng);
WaferMap gen_cluster(Rng& rng);

// Dispatch by label with a stream derived from `seed`; fills wafer.seed.
WaferMap generate_wafer(DefectLabel label, std::uint64_t seed);

// Stream key for wafer `index` of class `label` under a dataset seed;
// parallel generation with these keys matches the sequential run.
std::uint64_t wafer_seed(std::uint64_t dataset_seed, DefectLabel label, std::uint64_t index);

struct SplitSizes {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
};

struct DatasetManifest {
    std::array<std::size_t, kNumClasses> counts{};
    std::uint64_t seed = 0;
    SplitSizes split;  // per class; train+val+test == count for each class
    struct Entry {
        std::string path;  // empty for in-memory datasets
        DefectLabel label;
        std::uint64_t seed;
        std::string split;  // "train" | "val" | "test"
    };
    std::vector<Entry> entries;
};

struct Dataset {
    DatasetManifest manifest;
    std::vector<WaferMap> wafers;  // same order as manifest.entries
};

// Deterministic in (counts, seed). Per-class wafers are generated in index
// order; the first `split.train` of each class go to train, then val, test.
// A zero split assigns everything to train.
Dataset generate_dataset(const std::array<std::size_t, kNumClasses>& counts, std::uint64_t seed,
                         const SplitSizes& split = {});

// On-disk layout: DIR/manifest.json plus DIR/wafers/wafer_NNNNN.json.
void write_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

}  // namespace wtda
