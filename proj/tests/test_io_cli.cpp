#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "wtda/harness.hpp"
#include "wtda/io.hpp"
#include "wtda/plot.hpp"

using namespace wtda;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(WTDA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

FeatureSet small_feature_set() {
    const Dataset ds = generate_dataset({2, 0, 2, 0, 1}, 3);
    return featurize_dataset(ds, {}, 1);
}

}  // namespace

TEST_CASE("diagram JSON round-trip") {
    TempDir tmp("wtda_io_diagram");
    PersistenceDiagram d;
    d.dim = 1;
    d.pairs = {{1, 0.25, 1.75}, {1, 2.0, 2.0 + 1e-12}};
    write_diagram(d, tmp.file("d.json"));
    const PersistenceDiagram back = load_diagram(tmp.file("d.json"));
    CHECK(back.dim == 1);
    REQUIRE(back.pairs.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back.pairs[i].birth == d.pairs[i].birth);
        CHECK(back.pairs[i].death == d.pairs[i].death);
    }
    CHECK_THROWS_AS(load_diagram(tmp.file("missing.json")), IoError);

    std::ofstream(tmp.file("bad.json")) << "{\"dim\": 1}";
    CHECK_THROWS(load_diagram(tmp.file("bad.json")));
}

TEST_CASE("wafer JSON round-trip preserves coordinates exactly") {
    TempDir tmp("wtda_io_wafer");
    const WaferMap w = generate_wafer(DefectLabel::Scratch, 77);
    write_wafer(w, tmp.file("w.json"));
    const WaferMap back = load_wafer(tmp.file("w.json"));
    CHECK(back.label == w.label);
    CHECK(back.seed == w.seed);
    REQUIRE(back.points.size() == w.points.size());
    for (std::size_t i = 0; i < w.points.size(); ++i) {
        CHECK(back.points[i].x == w.points[i].x);
        CHECK(back.points[i].y == w.points[i].y);
    }
    CHECK(back.meta == w.meta);
}

TEST_CASE("pi/train config JSON round-trips") {
    PIConfig pi;
    pi.grid_nx = 10;
    pi.sigma2 = 0.5;
    pi.cutoff_c = 3.0;
    const PIConfig pi2 = pi_config_from_json(pi_config_to_json(pi));
    CHECK(pi2.grid_nx == 10);
    CHECK(pi2.sigma2 == 0.5);
    CHECK(pi2.cutoff_c == 3.0);

    TrainConfig tc;
    tc.epochs = 12;
    tc.learning_rate = 0.25;
    tc.seed = 9;
    tc.standardize = true;
    const TrainConfig tc2 = train_config_from_json(train_config_to_json(tc));
    CHECK(tc2.epochs == 12);
    CHECK(tc2.learning_rate == 0.25);
    CHECK(tc2.seed == 9);
    CHECK(tc2.standardize);
}

TEST_CASE("feature CSV and binary round-trips") {
    TempDir tmp("wtda_io_features");
    const FeatureSet fs_in = small_feature_set();

    write_features_csv(fs_in, tmp.file("f.csv"));
    const FeatureSet fs_csv = read_features_csv(tmp.file("f.csv"));
    REQUIRE(fs_csv.features.size() == fs_in.features.size());
    CHECK(fs_csv.labels == fs_in.labels);
    for (std::size_t i = 0; i < fs_in.features.size(); ++i)
        CHECK(fs_csv.features[i].values == fs_in.features[i].values);  // %.17g is exact

    write_features_bin(fs_in, tmp.file("f.bin"));
    const FeatureSet fs_bin = read_features_bin(tmp.file("f.bin"));
    REQUIRE(fs_bin.features.size() == fs_in.features.size());
    CHECK(fs_bin.labels == fs_in.labels);
    for (std::size_t i = 0; i < fs_in.features.size(); ++i)
        CHECK(fs_bin.features[i].values == fs_in.features[i].values);
    CHECK(fs_bin.config.grid_nx == fs_in.config.grid_nx);
    CHECK(fs_bin.config.sigma2 == fs_in.config.sigma2);

    const Eigen::MatrixXd M = fs_in.matrix();
    CHECK(M.rows() == long(fs_in.features.size()));
    CHECK(M.cols() == 800);
    CHECK(M(0, 0) == fs_in.features[0].values[0]);
}

TEST_CASE("model checkpoint round-trip") {
    TempDir tmp("wtda_io_model");
    MLPModel m = init_model(4, 8, 6, 5);
    m.feat_mean = Eigen::VectorXd::LinSpaced(8, 0.0, 1.0);
    m.feat_std = Eigen::VectorXd::Constant(8, 2.0);
    TrainConfig cfg;
    cfg.epochs = 33;
    cfg.seed = 4;
    save_model(m, cfg, tmp.file("m.ckpt"));
    auto [back, cfg2] = load_model(tmp.file("m.ckpt"));
    CHECK(back.W1 == m.W1);
    CHECK(back.b1 == m.b1);
    CHECK(back.W2 == m.W2);
    CHECK(back.b2 == m.b2);
    CHECK(back.feat_mean == m.feat_mean);
    CHECK(back.feat_std == m.feat_std);
    CHECK(cfg2.epochs == 33);
    CHECK(cfg2.seed == 4);

    // without a scaler the fields stay empty
    MLPModel plain = init_model(5, 8, 6, 5);
    save_model(plain, cfg, tmp.file("p.ckpt"));
    CHECK(load_model(tmp.file("p.ckpt")).first.feat_mean.size() == 0);

    std::ofstream(tmp.file("junk.ckpt")) << "not a checkpoint";
    CHECK_THROWS_AS(load_model(tmp.file("junk.ckpt")), FormatError);
    CHECK_THROWS_AS(load_model(tmp.file("missing.ckpt")), IoError);
}

TEST_CASE("split_features respects manifest tags") {
    const Dataset ds = generate_dataset({4, 0, 0, 0, 4}, 11, {2, 1, 1});
    const FeatureSet fs = featurize_dataset(ds, {}, 2);
    const SplitFeatures sp = split_features(ds, fs);
    CHECK(sp.X_train.rows() == 4);
    CHECK(sp.X_val.rows() == 2);
    CHECK(sp.X_test.rows() == 2);
    CHECK(sp.y_train == std::vector<int>{0, 0, 4, 4});
    CHECK(sp.y_val == std::vector<int>{0, 4});
    // rows match the featurized entries they came from
    CHECK(sp.X_train.row(0).isApprox(
        Eigen::Map<const Eigen::RowVectorXd>(fs.features[0].values.data(), 800)));
}

TEST_CASE("plot outputs exist and are valid PGM") {
    TempDir tmp("wtda_plot");
    const WaferMap w = generate_wafer(DefectLabel::Ring, 5);
    plot_wafer(w, tmp.file("wafer"));
    std::ifstream pgm(tmp.file("wafer") + ".pgm", std::ios::binary);
    REQUIRE(bool(pgm));
    std::string magic;
    pgm >> magic;
    CHECK(magic == "P5");
    CHECK(fs::exists(tmp.file("wafer") + ".csv"));

    auto [d0, d1] = compute_persistence(w.points);
    plot_diagram(d1, tmp.file("pd"));
    CHECK(fs::exists(tmp.file("pd") + ".pgm"));
    plot_pi(compute_pi(d1, {}), tmp.file("pi"));
    CHECK(fs::exists(tmp.file("pi") + ".pgm"));
}

TEST_CASE("cli end-to-end: generate, featurize, train, eval, dist, plot") {
    TempDir tmp("wtda_cli");
    const std::string ds = tmp.file("ds");
    REQUIRE(run_cli("generate --counts 6,6,6,6,6 --split 4,1,1 --seed 2 --out " + ds) == 0);
    CHECK(fs::exists(fs::path(ds) / "manifest.json"));
    CHECK(fs::exists(fs::path(ds) / "wafers" / "wafer_00000.json"));

    REQUIRE(run_cli("featurize --dataset " + ds + " --out " + tmp.file("feat")) == 0);
    CHECK(fs::exists(tmp.file("feat.csv")));
    CHECK(fs::exists(tmp.file("feat.bin")));

    // train a few epochs on the whole feature file, then eval it
    write_json(train_config_to_json([] {
                   TrainConfig c;
                   c.epochs = 3;
                   return c;
               }()),
               tmp.file("tc.json"));
    REQUIRE(run_cli("train --features " + tmp.file("feat.bin") + " --config " +
                    tmp.file("tc.json") + " --out " + tmp.file("m.ckpt")) == 0);
    REQUIRE(run_cli("eval --model " + tmp.file("m.ckpt") + " --features " + tmp.file("feat.csv") +
                    " --report " + tmp.file("report.json")) == 0);
    const auto report = load_json(tmp.file("report.json"));
    CHECK(report.at("accuracy").get<double>() >= 0.0);
    CHECK(report.at("confusion").size() == 5);

    PersistenceDiagram a, b;
    a.dim = b.dim = 1;
    a.pairs = {{1, 0.0, 2.0}};
    write_diagram(a, tmp.file("a.json"));
    write_diagram(b, tmp.file("b.json"));
    REQUIRE(run_cli("dist " + tmp.file("a.json") + " " + tmp.file("b.json")) == 0);

    REQUIRE(run_cli("plot " + (fs::path(ds) / "wafers" / "wafer_00000.json").string() +
                    " --out " + tmp.file("w")) == 0);
    CHECK(fs::exists(tmp.file("w.pgm")));

    // bad inputs fail loudly
    CHECK(run_cli("generate --counts 1,2 --out " + tmp.file("bad")) != 0);
    CHECK(run_cli("eval --model " + tmp.file("nope.ckpt") + " --features " +
                  tmp.file("feat.csv")) != 0);
    CHECK(run_cli("definitely-not-a-subcommand") != 0);
}
