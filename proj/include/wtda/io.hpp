#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "wtda/classifier.hpp"
#include "wtda/persistence_image.hpp"
#include "wtda/wafer_sim.hpp"

namespace wtda {

// diagram JSON: {"dim": k, "pairs": [[b, d], ...]}
nlohmann::json diagram_to_json(const PersistenceDiagram& d);
PersistenceDiagram diagram_from_json(const nlohmann::json& j);
void write_diagram(const PersistenceDiagram& d, const std::string& path);
PersistenceDiagram load_diagram(const std::string& path);

// wafer JSON: {"label": str, "seed": u64, "points": [[x, y], ...], "meta": {...}}
void write_wafer(const WaferMap& w, const std::string& path);
WaferMap load_wafer(const std::string& path);

nlohmann::json pi_config_to_json(const PIConfig& cfg);
PIConfig pi_config_from_json(const nlohmann::json& j);

struct FeatureSet {
    std::vector<FeatureVector> features;
    std::vector<int> labels;
    PIConfig config;

    Eigen::MatrixXd matrix() const;  // one feature vector per row
};

// CSV rows: label-name, then the feature components; no header line.
void write_features_csv(const FeatureSet& fs, const std::string& path);
FeatureSet read_features_csv(const std::string& path);

// Binary container: little-endian f64 matrix at `path`, JSON sidecar at
// `path + ".json"` recording shape, labels and the PIConfig used.
void write_features_bin(const FeatureSet& fs, const std::string& path);
FeatureSet read_features_bin(const std::string& path);

// Checkpoint: magic + u64 JSON header length + JSON header (shapes, train
// config) + flat little-endian f64 payload (W1, b1, W2, b2, scaler).
void save_model(const MLPModel& model, const TrainConfig& cfg, const std::string& path);
std::pair<MLPModel, TrainConfig> load_model(const std::string& path);

nlohmann::json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json eval_report_to_json(const EvalReport& r);

void write_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

void write_text(const std::string& text, const std::string& path);

}  // namespace wtda
