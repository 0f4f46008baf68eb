// Acceptance gate: reproduces the four experiments at full desk scale and
// re-validates the numerical kernels against independent oracles. Slow by
// design; prints one PASS/FAIL line per criterion and exits nonzero on any
// failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "wtda/diagram_metrics.hpp"
#include "wtda/harness.hpp"
#include "wtda/io.hpp"
#include "wtda/persistence_image.hpp"
#include "wtda/rng.hpp"

using namespace wtda;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what, const std::string& detail) {
    std::printf("[%2d] %s  %s  (%s)\n", criterion, ok ? "PASS" : "FAIL", what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void progress(const std::string& msg) {
    std::printf("     ... %s\n", msg.c_str());
    std::fflush(stdout);
}

PersistenceDiagram random_diagram(Rng& rng, std::size_t max_pts) {
    PersistenceDiagram d;
    d.dim = 1;
    const auto n = std::size_t(rng.uniform_int(0, std::int64_t(max_pts)));
    for (std::size_t i = 0; i < n; ++i) {
        const double b = rng.uniform(0.0, 10.0);
        d.pairs.push_back({1, b, b + rng.uniform(0.0, 5.0)});
    }
    return d;
}

double linf(const PersistencePair& a, const PersistencePair& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

// exhaustive optimal matching, exponential; only used for <= 5-point diagrams
void enumerate_matchings(const PersistenceDiagram& A, const PersistenceDiagram& B, double p,
                         std::size_t i, std::vector<char>& used, double sum_p, double max_c,
                         double& best_sum, double& best_max) {
    if (i == A.pairs.size()) {
        double s = sum_p, m = max_c;
        for (std::size_t j = 0; j < B.pairs.size(); ++j) {
            if (used[j]) continue;
            const double c = (B.pairs[j].death - B.pairs[j].birth) / 2.0;
            s += std::pow(c, p);
            m = std::max(m, c);
        }
        best_sum = std::min(best_sum, s);
        best_max = std::min(best_max, m);
        return;
    }
    const double cd = (A.pairs[i].death - A.pairs[i].birth) / 2.0;
    enumerate_matchings(A, B, p, i + 1, used, sum_p + std::pow(cd, p), std::max(max_c, cd),
                        best_sum, best_max);
    for (std::size_t j = 0; j < B.pairs.size(); ++j) {
        if (used[j]) continue;
        used[j] = 1;
        const double c = linf(A.pairs[i], B.pairs[j]);
        enumerate_matchings(A, B, p, i + 1, used, sum_p + std::pow(c, p), std::max(max_c, c),
                            best_sum, best_max);
        used[j] = 0;
    }
}

std::pair<double, double> brute_force(const PersistenceDiagram& A, const PersistenceDiagram& B,
                                      double p) {
    std::vector<char> used(B.pairs.size(), 0);
    double best_sum = std::numeric_limits<double>::infinity();
    double best_max = std::numeric_limits<double>::infinity();
    enumerate_matchings(A, B, p, 0, used, 0.0, 0.0, best_sum, best_max);
    return {std::pow(best_sum, 1.0 / p), best_max};
}

// ---- criteria 6-10: kernel validation against independent oracles ----------

void criterion_6_homology_oracle() {
    Rng rng(600);
    PersistenceOptions raw;
    raw.keep_zero_persistence = true;
    std::size_t clouds_ok = 0, scales_checked = 0;
    bool all_ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = std::size_t(rng.uniform_int(2, 8));
        PointCloud cloud;
        for (std::size_t i = 0; i < n; ++i)
            cloud.push_back({rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)});
        const DistanceMatrix dm = compute_distance_matrix(cloud);
        const PersistenceResult res = rips_persistence(dm, raw);
        const auto all = build_rips_filtration(dm, 2, dm.max_distance() + 1.0);

        std::vector<double> scales{0.0};
        for (const auto& s : all) scales.push_back(s.diameter);
        std::sort(scales.begin(), scales.end());
        scales.erase(std::unique(scales.begin(), scales.end()), scales.end());

        bool cloud_ok = true;
        for (const double eps : scales) {
            std::vector<FiltrationSimplex> prefix;
            for (const auto& s : all)
                if (s.diameter <= eps) prefix.push_back(s);
            std::size_t b0 = 0, b1 = 0;
            for (const auto& p : res.dim0.pairs) b0 += p.birth <= eps && eps < p.death;
            for (const auto& p : res.dim1.pairs) b1 += p.birth <= eps && eps < p.death;
            cloud_ok &= std::pair{b0, b1} == oracle_betti(prefix);
            ++scales_checked;
        }
        clouds_ok += cloud_ok;
        all_ok &= cloud_ok;
    }

    auto [d0, d1] = compute_persistence({{0, 0}, {2, 0}, {0, 2}, {2, 2}});
    const bool square_ok = d1.pairs.size() == 1 && std::abs(d1.pairs[0].birth - 2.0) < 1e-9 &&
                           std::abs(d1.pairs[0].death - 2.0 * std::sqrt(2.0)) < 1e-9;

    std::ostringstream detail;
    detail << clouds_ok << "/200 clouds, " << scales_checked << " filtration values, square pair "
           << (square_ok ? "ok" : "WRONG");
    report(6, all_ok && square_ok, "homology matches boundary-matrix oracle", detail.str());
}

void criterion_7_metric_suite() {
    Rng rng(700);
    bool ok = true;
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto A = random_diagram(rng, 8);
        const auto B = random_diagram(rng, 8);
        const auto C = random_diagram(rng, 8);
        const double bn = bottleneck_distance(A, B);
        ok &= std::abs(bn - bottleneck_distance(B, A)) <= 1e-9;
        ok &= bn <= bottleneck_distance(A, C) + bottleneck_distance(C, B) + 1e-9;
        ok &= bottleneck_distance(A, A) <= 1e-9;
        for (const double p : {1.0, 2.0}) {
            const double ab = wasserstein_distance(A, B, p);
            ok &= std::abs(ab - wasserstein_distance(B, A, p)) <= 1e-9;
            ok &= ab <= wasserstein_distance(A, C, p) + wasserstein_distance(C, B, p) + 1e-9;
            ok &= wasserstein_distance(A, A, p) <= 1e-9;
            ok &= bn <= ab + 1e-9;
        }
    }
    for (int trial = 0; trial < 150; ++trial) {
        const auto A = random_diagram(rng, 5);
        const auto B = random_diagram(rng, 5);
        for (const double p : {1.0, 2.0}) {
            const auto [w_ref, b_ref] = brute_force(A, B, p);
            worst = std::max(worst, std::abs(wasserstein_distance(A, B, p) - w_ref));
            worst = std::max(worst, std::abs(bottleneck_distance(A, B) - b_ref));
        }
    }
    ok &= worst <= 1e-9;
    std::ostringstream detail;
    detail << "500 axiom pairs + 150 brute-force pairs, max |err| " << worst;
    report(7, ok, "W1/W2/bottleneck metric suite", detail.str());
}

void criterion_8_stability() {
    Rng rng(800);
    const PIConfig cfg;
    const double sigma = std::sqrt(cfg.sigma2);
    const double constant =
        std::sqrt(5.0) / cfg.cutoff_c + std::sqrt(10.0 / std::numbers::pi) / sigma;
    int violations = 0;
    double tightest = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
        PersistenceDiagram A = random_diagram(rng, 20);
        PersistenceDiagram B = A;
        // perturb A, sometimes heavily, sometimes drop/add points
        for (auto& p : B.pairs) {
            p.birth = std::max(0.0, p.birth + rng.uniform(-0.5, 0.5));
            p.death = p.birth + std::max(0.0, (p.death - p.birth) + rng.uniform(-0.5, 0.5));
        }
        if (!B.pairs.empty() && rng.uniform() < 0.5) B.pairs.pop_back();
        const auto ia = compute_pi(A, cfg), ib = compute_pi(B, cfg);
        double l1 = 0.0;
        for (std::size_t i = 0; i < ia.pixels.size(); ++i)
            l1 += std::abs(ia.pixels[i] - ib.pixels[i]);
        const double bound = constant * wasserstein_distance(A, B, 1.0);
        if (l1 > bound + 1e-12) ++violations;
        if (bound > 0) tightest = std::min(tightest, bound - l1);
    }
    std::ostringstream detail;
    detail << "100 pairs, violations " << violations << ", min slack " << tightest;
    report(8, violations == 0, "persistence-image L1 stability bound", detail.str());
}

void criterion_9_gradient_check() {
    Rng rng(900);
    double worst = 0.0;
    for (int batch = 0; batch < 20; ++batch) {
        MLPModel m = init_model(900 + std::uint64_t(batch), 6, 9, 5);
        const int n = int(rng.uniform_int(2, 10));
        Eigen::MatrixXd X(n, 6);
        std::vector<int> y;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < 6; ++j) X(i, j) = rng.uniform(-1.0, 1.0);
            y.push_back(int(rng.uniform_int(0, 4)));
        }
        const auto [loss, g] = loss_and_grad(m, X, y);
        const double h = 1e-6;
        auto probe = [&](double* param, double analytic) {
            const double saved = *param;
            *param = saved + h;
            const double up = loss_and_grad(m, X, y).first;
            *param = saved - h;
            const double down = loss_and_grad(m, X, y).first;
            *param = saved;
            const double fd = (up - down) / (2.0 * h);
            const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-4});
            worst = std::max(worst, std::abs(fd - analytic) / scale);
        };
        for (int k = 0; k < 10; ++k) {
            const auto i1 = rng.uniform_int(0, m.W1.size() - 1);
            probe(m.W1.data() + i1, g.W1(i1));
            const auto i2 = rng.uniform_int(0, m.W2.size() - 1);
            probe(m.W2.data() + i2, g.W2(i2));
            const auto i3 = rng.uniform_int(0, m.b1.size() - 1);
            probe(m.b1.data() + i3, g.b1(i3));
            const auto i4 = rng.uniform_int(0, m.b2.size() - 1);
            probe(m.b2.data() + i4, g.b2(i4));
        }
    }
    std::ostringstream detail;
    detail << "20 batches, max relative error " << worst;
    report(9, worst < 1e-4, "analytic gradients vs central differences", detail.str());
}

void criterion_10_determinism() {
    bool ok = true;
    std::string why = "byte-identical";

    auto run_pipeline = [&](int threads) {
        const Dataset ds = generate_dataset({15, 15, 15, 15, 15}, 10, {10, 3, 2});
        const FeatureSet fs = featurize_dataset(ds, {}, threads);
        const SplitFeatures sf = split_features(ds, fs);
        TrainConfig cfg;
        cfg.epochs = 8;
        cfg.seed = 10;
        auto [model, curves] = train(sf.X_train, sf.y_train, sf.X_val, sf.y_val, cfg);
        const EvalReport rep = evaluate(model, sf.X_test, sf.y_test);

        // serialize everything that the pipeline produces
        std::ostringstream blob;
        for (const auto& w : ds.wafers)
            for (const auto& p : w.points) blob.write(reinterpret_cast<const char*>(&p.x), 16);
        for (const auto& f : fs.features)
            blob.write(reinterpret_cast<const char*>(f.values.data()),
                       long(f.values.size() * sizeof(double)));
        blob.write(reinterpret_cast<const char*>(model.W1.data()),
                   long(model.W1.size() * sizeof(double)));
        blob.write(reinterpret_cast<const char*>(model.W2.data()),
                   long(model.W2.size() * sizeof(double)));
        blob.write(reinterpret_cast<const char*>(model.b1.data()),
                   long(model.b1.size() * sizeof(double)));
        blob.write(reinterpret_cast<const char*>(model.b2.data()),
                   long(model.b2.size() * sizeof(double)));
        blob << eval_report_to_json(rep).dump();
        return blob.str();
    };

    const std::string first = run_pipeline(1);
    const std::string second = run_pipeline(1);
    const std::string parallel = run_pipeline(4);
    if (first != second) {
        ok = false;
        why = "rerun differs";
    } else if (first != parallel) {
        ok = false;
        why = "parallel featurization differs";
    }
    report(10, ok, "end-to-end pipeline determinism", why);
}

// ---- criteria 1-5: experiment reproduction ---------------------------------

void criteria_1_2_basic() {
    bool acc_ok = true, conv_ok = true;
    std::ostringstream accs, convs;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        progress("basic experiment, seed " + std::to_string(seed));
        BasicSpec spec;
        spec.seed = seed;
        const nlohmann::json j = run_basic(spec);
        const double acc = j["accuracy"].get<double>();
        const int e90 = j["epochs_to_90pct_train"].get<int>();
        acc_ok &= acc >= 0.95;
        conv_ok &= e90 > 0 && e90 <= 10;
        accs << (seed > 1 ? ", " : "") << acc;
        convs << (seed > 1 ? ", " : "") << e90;
    }
    report(1, acc_ok, "basic experiment accuracy >= 0.95 on 3/3 seeds", accs.str());
    report(2, conv_ok, "train accuracy reaches 90% within 10 epochs", "epochs: " + convs.str());
}

void criterion_3_small_data() {
    progress("small-data experiment (10 sizes x 5 seeds)");
    SmallDataSpec spec;
    const nlohmann::json j = run_small_data(spec);
    std::vector<double> mean_acc;
    for (const auto& row : j["mean_accuracy_by_size"])
        mean_acc.push_back(row["accuracy"].get<double>());

    const bool ends_ok = mean_acc.front() >= 0.82 && mean_acc.back() >= 0.92;
    bool monotone_ok = true;
    for (std::size_t i = 1; i < mean_acc.size(); ++i)
        monotone_ok &= mean_acc[i] >= mean_acc[i - 1] - 0.02;  // 2-point noise band

    std::ostringstream detail;
    detail << "mean acc at 10/class " << mean_acc.front() << ", at 100/class " << mean_acc.back()
           << ", monotone(2pt band) " << (monotone_ok ? "yes" : "NO");
    report(3, ends_ok && monotone_ok, "small-data accuracy thresholds and trend", detail.str());
}

void criterion_4_imbalanced() {
    progress("imbalanced experiment (10 draws)");
    ImbalancedSpec spec;
    const nlohmann::json j = run_imbalanced(spec);
    const double mean = j["mean_accuracy"].get<double>();
    bool balanced_ok = true;
    for (const auto& d : j["datasets"]) {
        const auto counts = d["counts"].get<std::vector<std::size_t>>();
        const bool well_fed =
            std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c >= 150; });
        if (well_fed) balanced_ok &= d["accuracy"].get<double>() >= 0.94;
    }
    std::ostringstream detail;
    detail << "mean accuracy " << mean;
    report(4, mean >= 0.88 && balanced_ok, "imbalanced-training accuracy", detail.str());
}

void criterion_5_bench() {
    progress("throughput benchmark (ratios 0.7/0.8/0.9, totals 500/1000)");
    BenchSpec spec;
    const nlohmann::json j = run_bench(spec);
    double t70_500 = 0, t90_500 = 0, t70_1000 = 0, t90_1000 = 0;
    for (const auto& r : j["results"]) {
        const double ratio = r["ratio"].get<double>();
        const std::size_t total = r["total_wafers"].get<std::size_t>();
        const double t = r["total_seconds"].get<double>();
        if (ratio == 0.7 && total == 500) t70_500 = t;
        if (ratio == 0.9 && total == 500) t90_500 = t;
        if (ratio == 0.7 && total == 1000) t70_1000 = t;
        if (ratio == 0.9 && total == 1000) t90_1000 = t;
    }
    const bool ok = t90_500 < t70_500 && t90_1000 < t70_1000;
    std::ostringstream detail;
    detail << "500 wafers: " << t70_500 << "s@70% vs " << t90_500 << "s@90%; 1000 wafers: "
           << t70_1000 << "s@70% vs " << t90_1000 << "s@90%";
    report(5, ok, "prediction time decreases with random ratio", detail.str());
}

}  // namespace

int main() {
    std::printf("acceptance suite: kernels first, then full experiments\n");
    criterion_6_homology_oracle();
    criterion_7_metric_suite();
    criterion_8_stability();
    criterion_9_gradient_check();
    criterion_10_determinism();
    criteria_1_2_basic();
    criterion_3_small_data();
    criterion_4_imbalanced();
    criterion_5_bench();
    std::printf("%s (%d failure%s)\n", g_failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED",
                g_failures, g_failures == 1 ? "" : "s");
    return g_failures ? 1 : 0;
}
