#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wtda/diagram_metrics.hpp"
#include "wtda/harness.hpp"
#include "wtda/io.hpp"
#include "wtda/plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::array<std::size_t, wtda::kNumClasses> parse_counts(const std::string& s) {
    std::array<std::size_t, wtda::kNumClasses> counts{};
    std::stringstream ss(s);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(ss, cell, ',')) {
        if (i >= counts.size()) throw wtda::FormatError("--counts: expected 5 values");
        counts[i++] = std::stoul(cell);
    }
    if (i != counts.size()) throw wtda::FormatError("--counts: expected 5 values");
    return counts;
}

wtda::PIConfig pi_config_from_file(const std::string& path) {
    if (path.empty()) return {};
    return wtda::pi_config_from_json(wtda::load_json(path));
}

wtda::FeatureSet read_features_any(const std::string& path) {
    if (path.ends_with(".csv")) return wtda::read_features_csv(path);
    return wtda::read_features_bin(path);
}

int run(int argc, char** argv) {
    CLI::App app{"Topological wafer-map defect classification pipeline"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "machine-readable output");

    // generate
    auto* gen = app.add_subcommand("generate", "generate a labeled wafer-map dataset");
    std::string gen_counts = "500,500,500,500,500", gen_out, gen_split = "";
    std::uint64_t gen_seed = 1;
    gen->add_option("--counts", gen_counts, "per-class counts: random,ring,scratch,dense,cluster");
    gen->add_option("--seed", gen_seed, "dataset seed");
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--split", gen_split, "per-class train,val,test sizes");

    // featurize
    auto* feat = app.add_subcommand("featurize", "wafer dataset -> feature vectors");
    std::string feat_ds, feat_out, feat_cfg;
    int feat_threads = 1;
    feat->add_option("--dataset", feat_ds, "dataset directory")->required();
    feat->add_option("--out", feat_out, "output stem (.csv/.bin emitted)")->required();
    feat->add_option("--config", feat_cfg, "persistence-image config JSON");
    feat->add_option("--threads", feat_threads, "featurization workers");

    // dist
    auto* dist = app.add_subcommand("dist", "distance between two persistence diagrams");
    std::string dist_a, dist_b;
    double dist_p = 1.0;
    bool dist_bottleneck = false;
    dist->add_option("a", dist_a, "diagram JSON")->required();
    dist->add_option("b", dist_b, "diagram JSON")->required();
    dist->add_option("--p", dist_p, "Wasserstein order");
    dist->add_flag("--bottleneck", dist_bottleneck, "bottleneck instead of Wasserstein");

    // train
    auto* tr = app.add_subcommand("train", "train the classifier on feature vectors");
    std::string tr_features, tr_cfg, tr_out, tr_val;
    tr->add_option("--features", tr_features, "training features (.csv or .bin)")->required();
    tr->add_option("--val-features", tr_val, "validation features");
    tr->add_option("--config", tr_cfg, "train config JSON");
    tr->add_option("--out", tr_out, "model checkpoint path")->required();

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
    std::string ev_model, ev_features, ev_report;
    ev->add_option("--model", ev_model, "model checkpoint")->required();
    ev->add_option("--features", ev_features, "test features")->required();
    ev->add_option("--report", ev_report, "report JSON path");

    // bench
    auto* be = app.add_subcommand("bench", "prediction-time benchmark across random ratios");
    std::string be_out;
    std::uint64_t be_seed = 1;
    int be_threads = 1;
    be->add_option("--out", be_out, "report JSON path")->required();
    be->add_option("--seed", be_seed, "seed");
    be->add_option("--threads", be_threads, "featurization workers");

    // experiment
    auto* ex = app.add_subcommand("experiment", "reproduce an experiment end to end");
    std::string ex_kind, ex_out;
    std::uint64_t ex_seed = 1;
    int ex_threads = 1, ex_epochs = -1;
    ex->add_option("kind", ex_kind, "basic | small-data | imbalanced")->required();
    ex->add_option("--out", ex_out, "report JSON path")->required();
    ex->add_option("--seed", ex_seed, "seed");
    ex->add_option("--threads", ex_threads, "featurization workers");
    ex->add_option("--epochs", ex_epochs, "override training epochs");

    // plot
    auto* pl = app.add_subcommand("plot", "render wafer/diagram/report files to PGM + CSV");
    std::string pl_in, pl_out;
    pl->add_option("input", pl_in, "wafer, diagram or report JSON")->required();
    pl->add_option("--out", pl_out, "output stem")->required();

    CLI11_PARSE(app, argc, argv);

    if (*gen) {
        wtda::SplitSizes split{};
        if (!gen_split.empty()) {
            const auto v = parse_counts(gen_split + ",0,0");  // reuse parser, first 3 used
            split = {v[0], v[1], v[2]};
        }
        const wtda::Dataset ds = wtda::generate_dataset(parse_counts(gen_counts), gen_seed, split);
        wtda::write_dataset(ds, gen_out);
        if (as_json)
            std::cout << json{{"wafers", ds.wafers.size()}, {"dir", gen_out}} << "\n";
        else
            std::cout << "wrote " << ds.wafers.size() << " wafers to " << gen_out << "\n";
    } else if (*feat) {
        const wtda::Dataset ds = wtda::load_dataset(feat_ds);
        const wtda::PIConfig cfg = pi_config_from_file(feat_cfg);
        const wtda::FeatureSet fs = wtda::featurize_dataset(ds, cfg, feat_threads);
        wtda::write_features_csv(fs, feat_out + ".csv");
        wtda::write_features_bin(fs, feat_out + ".bin");
        if (as_json)
            std::cout << json{{"rows", fs.features.size()}, {"stem", feat_out}} << "\n";
        else
            std::cout << "featurized " << fs.features.size() << " wafers -> " << feat_out
                      << ".{csv,bin}\n";
    } else if (*dist) {
        const auto A = wtda::load_diagram(dist_a);
        const auto B = wtda::load_diagram(dist_b);
        const double d = dist_bottleneck ? wtda::bottleneck_distance(A, B)
                                         : wtda::wasserstein_distance(A, B, dist_p);
        if (as_json)
            std::cout << json{{"distance", d}} << "\n";
        else
            std::printf("%.17g\n", d);
    } else if (*tr) {
        const wtda::FeatureSet fs = read_features_any(tr_features);
        wtda::TrainConfig cfg;
        if (!tr_cfg.empty()) cfg = wtda::train_config_from_json(wtda::load_json(tr_cfg));
        Eigen::MatrixXd X_val;
        std::vector<int> y_val;
        if (!tr_val.empty()) {
            const wtda::FeatureSet vs = read_features_any(tr_val);
            X_val = vs.matrix();
            y_val = vs.labels;
        }
        auto [model, report] = wtda::train(fs.matrix(), fs.labels, X_val, y_val, cfg);
        wtda::save_model(model, cfg, tr_out);
        json out = wtda::eval_report_to_json(report);
        out["final_train_acc"] = report.train_acc.back();
        if (as_json)
            std::cout << json{{"model", tr_out}, {"final_train_acc", report.train_acc.back()}}
                      << "\n";
        else
            std::cout << "saved " << tr_out << " (final train acc " << report.train_acc.back()
                      << ")\n";
    } else if (*ev) {
        auto [model, cfg] = wtda::load_model(ev_model);
        const wtda::FeatureSet fs = read_features_any(ev_features);
        const wtda::EvalReport rep = wtda::evaluate(model, fs.matrix(), fs.labels);
        json out = wtda::eval_report_to_json(rep);
        out["model"] = ev_model;
        out["features"] = ev_features;
        out["train_config"] = wtda::train_config_to_json(cfg);
        if (!ev_report.empty()) wtda::write_json(out, ev_report);
        if (as_json)
            std::cout << out << "\n";
        else
            std::cout << "accuracy " << rep.accuracy << "\n";
    } else if (*be) {
        wtda::BenchSpec spec;
        spec.seed = be_seed;
        spec.threads = be_threads;
        const json report = wtda::run_bench(spec);
        wtda::write_json(report, be_out);
        if (as_json)
            std::cout << report["results"] << "\n";
        else
            for (const auto& r : report["results"])
                std::printf("ratio %.0f%%  wafers %4zu  total %.3fs (featurize %.3fs)\n",
                            r["ratio"].get<double>() * 100, r["total_wafers"].get<std::size_t>(),
                            r["total_seconds"].get<double>(),
                            r["featurize_seconds"].get<double>());
    } else if (*ex) {
        json report;
        if (ex_kind == "basic") {
            wtda::BasicSpec spec;
            spec.seed = ex_seed;
            spec.threads = ex_threads;
            if (ex_epochs > 0) spec.epochs = ex_epochs;
            report = wtda::run_basic(spec);
        } else if (ex_kind == "small-data") {
            wtda::SmallDataSpec spec;
            spec.seed = ex_seed;
            spec.threads = ex_threads;
            if (ex_epochs > 0) spec.epochs = ex_epochs;
            report = wtda::run_small_data(spec);
        } else if (ex_kind == "imbalanced") {
            wtda::ImbalancedSpec spec;
            spec.seed = ex_seed;
            spec.threads = ex_threads;
            if (ex_epochs > 0) spec.epochs = ex_epochs;
            report = wtda::run_imbalanced(spec);
        } else {
            throw wtda::FormatError("unknown experiment kind: " + ex_kind);
        }
        wtda::write_json(report, ex_out);
        if (as_json)
            std::cout << report << "\n";
        else
            std::cout << "wrote " << ex_out << "\n";
    } else if (*pl) {
        const json j = wtda::load_json(pl_in);
        if (j.contains("points") && j.contains("label")) {
            wtda::plot_wafer(wtda::load_wafer(pl_in), pl_out);
        } else if (j.contains("pairs") && j.contains("dim")) {
            const auto d = wtda::diagram_from_json(j);
            wtda::plot_diagram(d, pl_out + "_pd");
            wtda::plot_pi(wtda::compute_pi(d, {}), pl_out + "_pi");
        } else if (j.contains("curves") || j.contains("confusion")) {
            wtda::EvalReport rep;
            if (j.contains("curves")) {
                const auto& c = j["curves"];
                rep.train_acc = c.value("train_acc", std::vector<double>{});
                rep.train_loss = c.value("train_loss", std::vector<double>{});
                rep.val_acc = c.value("val_acc", std::vector<double>{});
                rep.val_loss = c.value("val_loss", std::vector<double>{});
                wtda::plot_curves(rep, pl_out);
            }
            if (j.contains("confusion") && !j["confusion"].empty())
                wtda::plot_confusion(j["confusion"].get<std::vector<std::vector<long>>>(),
                                     pl_out + "_confusion");
        } else {
            throw wtda::FormatError("plot: unrecognized input kind in " + pl_in);
        }
        if (!as_json) std::cout << "wrote " << pl_out << "*\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}} << "\n";
        return 1;
    }
}
