#include "wtda/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace wtda {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

}  // namespace

nlohmann::json diagram_to_json(const PersistenceDiagram& d) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : d.pairs) pairs.push_back({p.birth, p.death});
    return {{"dim", d.dim}, {"pairs", pairs}};
}

PersistenceDiagram diagram_from_json(const nlohmann::json& j) {
    PersistenceDiagram d;
    d.dim = j.at("dim").get<int>();
    for (const auto& p : j.at("pairs"))
        d.pairs.push_back({d.dim, p.at(0).get<double>(), p.at(1).get<double>()});
    return d;
}

void write_diagram(const PersistenceDiagram& d, const std::string& path) {
    write_json(diagram_to_json(d), path);
}

PersistenceDiagram load_diagram(const std::string& path) {
    return diagram_from_json(load_json(path));
}

void write_wafer(const WaferMap& w, const std::string& path) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : w.points) pts.push_back({p.x, p.y});
    write_json({{"label", label_name(w.label)}, {"seed", w.seed}, {"points", pts},
                {"meta", w.meta}},
               path);
}

WaferMap load_wafer(const std::string& path) {
    const nlohmann::json j = load_json(path);
    WaferMap w;
    w.label = label_from_name(j.at("label").get<std::string>());
    w.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& p : j.at("points"))
        w.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    w.meta = j.value("meta", nlohmann::json::object());
    return w;
}

nlohmann::json pi_config_to_json(const PIConfig& cfg) {
    return {{"grid_nx", cfg.grid_nx},     {"grid_ny", cfg.grid_ny},
            {"birth_min", cfg.birth_min}, {"birth_max", cfg.birth_max},
            {"pers_min", cfg.pers_min},   {"pers_max", cfg.pers_max},
            {"sigma2", cfg.sigma2},       {"cutoff_c", cfg.cutoff_c}};
}

PIConfig pi_config_from_json(const nlohmann::json& j) {
    PIConfig cfg;
    cfg.grid_nx = j.value("grid_nx", cfg.grid_nx);
    cfg.grid_ny = j.value("grid_ny", cfg.grid_ny);
    cfg.birth_min = j.value("birth_min", cfg.birth_min);
    cfg.birth_max = j.value("birth_max", cfg.birth_max);
    cfg.pers_min = j.value("pers_min", cfg.pers_min);
    cfg.pers_max = j.value("pers_max", cfg.pers_max);
    cfg.sigma2 = j.value("sigma2", cfg.sigma2);
    cfg.cutoff_c = j.value("cutoff_c", cfg.cutoff_c);
    cfg.validate();
    return cfg;
}

Eigen::MatrixXd FeatureSet::matrix() const {
    if (features.empty()) return {};
    Eigen::MatrixXd X(features.size(), features[0].values.size());
    for (std::size_t i = 0; i < features.size(); ++i)
        for (std::size_t j = 0; j < features[i].values.size(); ++j)
            X(Eigen::Index(i), Eigen::Index(j)) = features[i].values[j];
    return X;
}

void write_features_csv(const FeatureSet& fs, const std::string& path) {
    auto out = open_out(path);
    char buf[32];
    for (std::size_t i = 0; i < fs.features.size(); ++i) {
        out << label_name(DefectLabel(fs.labels[i]));
        for (double v : fs.features[i].values) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out << buf;
        }
        out << "\n";
    }
}

FeatureSet read_features_csv(const std::string& path) {
    auto in = open_in(path);
    FeatureSet fs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ',')) throw FormatError("features csv: bad row in " + path);
        fs.labels.push_back(int(label_from_name(cell)));
        FeatureVector fv;
        while (std::getline(ss, cell, ',')) fv.values.push_back(std::stod(cell));
        fs.features.push_back(std::move(fv));
    }
    return fs;
}

void write_features_bin(const FeatureSet& fs, const std::string& path) {
    auto out = open_out(path, std::ios::binary);
    const std::size_t cols = fs.features.empty() ? 0 : fs.features[0].values.size();
    for (const auto& fv : fs.features) {
        if (fv.values.size() != cols) throw ShapeError("features bin: ragged rows");
        out.write(reinterpret_cast<const char*>(fv.values.data()),
                  std::streamsize(cols * sizeof(double)));
    }
    nlohmann::json side;
    side["rows"] = fs.features.size();
    side["cols"] = cols;
    side["pi_config"] = pi_config_to_json(fs.config);
    for (int y : fs.labels) side["labels"].push_back(label_name(DefectLabel(y)));
    write_json(side, path + ".json");
}

FeatureSet read_features_bin(const std::string& path) {
    const nlohmann::json side = load_json(path + ".json");
    FeatureSet fs;
    fs.config = pi_config_from_json(side.at("pi_config"));
    const auto rows = side.at("rows").get<std::size_t>();
    const auto cols = side.at("cols").get<std::size_t>();
    for (const auto& name : side.at("labels"))
        fs.labels.push_back(int(label_from_name(name.get<std::string>())));
    if (fs.labels.size() != rows) throw FormatError("features bin: label count mismatch");
    auto in = open_in(path, std::ios::binary);
    for (std::size_t i = 0; i < rows; ++i) {
        FeatureVector fv;
        fv.values.resize(cols);
        in.read(reinterpret_cast<char*>(fv.values.data()), std::streamsize(cols * sizeof(double)));
        if (!in) throw FormatError("features bin: truncated payload in " + path);
        fs.features.push_back(std::move(fv));
    }
    return fs;
}

nlohmann::json train_config_to_json(const TrainConfig& cfg) {
    return {{"learning_rate", cfg.learning_rate},
            {"beta1", cfg.beta1},
            {"beta2", cfg.beta2},
            {"eps", cfg.eps},
            {"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},
            {"seed", cfg.seed},
            {"standardize", cfg.standardize},
            {"loss", "softmax_cross_entropy"},
            {"optimizer", "adam"}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.beta1 = j.value("beta1", cfg.beta1);
    cfg.beta2 = j.value("beta2", cfg.beta2);
    cfg.eps = j.value("eps", cfg.eps);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.standardize = j.value("standardize", cfg.standardize);
    cfg.validate();
    return cfg;
}

namespace {

constexpr char kCkptMagic[8] = {'W', 'T', 'D', 'A', 'C', 'K', 'P', 'T'};

void write_block(std::ofstream& out, const double* data, std::size_t count) {
    out.write(reinterpret_cast<const char*>(data), std::streamsize(count * sizeof(double)));
}

void read_block(std::ifstream& in, double* data, std::size_t count) {
    in.read(reinterpret_cast<char*>(data), std::streamsize(count * sizeof(double)));
    if (!in) throw FormatError("checkpoint: truncated weight payload");
}

}  // namespace

void save_model(const MLPModel& model, const TrainConfig& cfg, const std::string& path) {
    auto out = open_out(path, std::ios::binary);
    nlohmann::json header;
    header["input_dim"] = model.input_dim();
    header["hidden_dim"] = model.hidden_dim();
    header["num_classes"] = model.num_classes();
    header["standardized"] = model.feat_mean.size() > 0;
    header["train_config"] = train_config_to_json(cfg);
    const std::string hs = header.dump();
    const std::uint64_t len = hs.size();
    out.write(kCkptMagic, sizeof kCkptMagic);
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(hs.data(), std::streamsize(hs.size()));
    write_block(out, model.W1.data(), std::size_t(model.W1.size()));
    write_block(out, model.b1.data(), std::size_t(model.b1.size()));
    write_block(out, model.W2.data(), std::size_t(model.W2.size()));
    write_block(out, model.b2.data(), std::size_t(model.b2.size()));
    if (model.feat_mean.size() > 0) {
        write_block(out, model.feat_mean.data(), std::size_t(model.feat_mean.size()));
        write_block(out, model.feat_std.data(), std::size_t(model.feat_std.size()));
    }
}

std::pair<MLPModel, TrainConfig> load_model(const std::string& path) {
    auto in = open_in(path, std::ios::binary);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kCkptMagic, sizeof magic) != 0)
        throw FormatError("checkpoint: bad magic in " + path);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    std::string hs(len, '\0');
    in.read(hs.data(), std::streamsize(len));
    if (!in) throw FormatError("checkpoint: truncated header in " + path);
    const nlohmann::json header = nlohmann::json::parse(hs);

    MLPModel model;
    const int in_dim = header.at("input_dim").get<int>();
    const int hidden = header.at("hidden_dim").get<int>();
    const int classes = header.at("num_classes").get<int>();
    model.W1.resize(in_dim, hidden);
    model.b1.resize(hidden);
    model.W2.resize(hidden, classes);
    model.b2.resize(classes);
    read_block(in, model.W1.data(), std::size_t(model.W1.size()));
    read_block(in, model.b1.data(), std::size_t(model.b1.size()));
    read_block(in, model.W2.data(), std::size_t(model.W2.size()));
    read_block(in, model.b2.data(), std::size_t(model.b2.size()));
    if (header.value("standardized", false)) {
        model.feat_mean.resize(in_dim);
        model.feat_std.resize(in_dim);
        read_block(in, model.feat_mean.data(), std::size_t(in_dim));
        read_block(in, model.feat_std.data(), std::size_t(in_dim));
    }
    return {std::move(model), train_config_from_json(header.at("train_config"))};
}

nlohmann::json eval_report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["accuracy"] = r.accuracy;
    j["confusion"] = r.confusion;
    j["curves"] = {{"train_acc", r.train_acc},
                   {"train_loss", r.train_loss},
                   {"val_acc", r.val_acc},
                   {"val_loss", r.val_loss},
                   {"epoch_seconds", r.epoch_seconds}};
    return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

nlohmann::json load_json(const std::string& path) {
    auto in = open_in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("bad JSON in " + path + ": " + e.what());
    }
}

void write_text(const std::string& text, const std::string& path) {
    auto out = open_out(path);
    out << text;
}

}  // namespace wtda
