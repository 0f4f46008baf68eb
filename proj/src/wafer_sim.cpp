#include "wtda/wafer_sim.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "wtda/io.hpp"

namespace wtda {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool in_disk(const Point& p) { return p.x * p.x + p.y * p.y <= kWaferRadius * kWaferRadius; }

Point polar_uniform(Rng& rng, double r_lo, double r_hi) {
    const double theta = rng.uniform(0.0, kTwoPi);
    const double r = rng.uniform(r_lo, r_hi);
    return {r * std::cos(theta), r * std::sin(theta)};
}

// noise shared by all non-random classes, same law as the random class
std::size_t append_noise(Rng& rng, PointCloud& points) {
    const auto n = std::size_t(rng.uniform_int(10, 60));
    for (std::size_t i = 0; i < n; ++i) points.push_back(polar_uniform(rng, 0.0, kWaferRadius));
    return n;
}

}  // namespace

const char* label_name(DefectLabel label) {
    switch (label) {
        case DefectLabel::Random: return "random";
        case DefectLabel::Ring: return "ring";
        case DefectLabel::Scratch: return "scratch";
        case DefectLabel::Dense: return "dense";
        case DefectLabel::Cluster: return "cluster";
    }
    throw InvalidInput("label_name: bad label");
}

DefectLabel label_from_name(const std::string& name) {
    for (int i = 0; i < kNumClasses; ++i)
        if (name == label_name(DefectLabel(i))) return DefectLabel(i);
    throw FormatError("unknown defect label: " + name);
}

WaferMap gen_random(Rng& rng) {
    WaferMap w;
    w.label = DefectLabel::Random;
    const auto n = std::size_t(rng.uniform_int(10, 60));
    for (std::size_t i = 0; i < n; ++i) w.points.push_back(polar_uniform(rng, 0.0, kWaferRadius));
    w.meta = {{"n_random", n}};
    return w;
}

WaferMap gen_ring(Rng& rng) {
    WaferMap w;
    w.label = DefectLabel::Ring;
    const auto n = std::size_t(rng.uniform_int(150, 300));
    const double r0 = rng.uniform(3.0, 6.0);
    const double delta = rng.uniform(0.0, 4.0);
    for (std::size_t i = 0; i < n; ++i) w.points.push_back(polar_uniform(rng, r0, r0 + delta));
    const std::size_t noise = append_noise(rng, w.points);
    w.meta = {{"n_ring", n}, {"r0", r0}, {"delta", delta}, {"n_noise", noise}};
    return w;
}

WaferMap gen_scratch(Rng& rng) {
    WaferMap w;
    w.label = DefectLabel::Scratch;
    double a, b;
    do {
        a = rng.uniform(-10.0, 10.0);
        b = rng.uniform(-10.0, 10.0);
    } while (std::abs(a - b) <= 5.0);
    double k;
    do {
        k = rng.uniform(-1.0 / 15.0, 1.0 / 15.0);
    } while (k == 0.0);
    const auto n = std::size_t(rng.uniform_int(50, 100));
    const double theta = rng.uniform(0.0, kTwoPi);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double step = (b - a) / double(n - 1);  // both endpoints included
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a + step * double(i);
        const double y = k * x * x;
        const Point p{ct * x - st * y, st * x + ct * y};
        if (in_disk(p)) w.points.push_back(p);
    }
    const std::size_t kept = w.points.size();
    const std::size_t noise = append_noise(rng, w.points);
    w.meta = {{"a", a},       {"b", b},           {"k", k},
              {"theta", theta}, {"n_scratch", n}, {"n_kept", kept},
              {"n_noise", noise}};
    return w;
}

WaferMap gen_dense(Rng& rng) {
    WaferMap w;
    w.label = DefectLabel::Dense;
    const auto n = std::size_t(rng.uniform_int(150, 300));
    for (std::size_t i = 0; i < n; ++i) w.points.push_back(polar_uniform(rng, 0.0, kWaferRadius));
    const std::size_t noise = append_noise(rng, w.points);
    w.meta = {{"n_dense", n}, {"n_noise", noise}};
    return w;
}

WaferMap gen_cluster(Rng& rng) {
    WaferMap w;
    w.label = DefectLabel::Cluster;
    const auto n = std::size_t(rng.uniform_int(150, 300));
    const auto n_clusters = std::size_t(rng.uniform_int(1, 3));
    std::vector<double> cx, cy, stds;
    std::vector<std::size_t> sizes(n_clusters, n / n_clusters);
    for (std::size_t c = 0; c < n % n_clusters; ++c) ++sizes[c];
    for (std::size_t c = 0; c < n_clusters; ++c) {
        // centers uniform on the radius-7 disk so most blob mass stays on-wafer
        const double theta = rng.uniform(0.0, kTwoPi);
        const double r = 7.0 * std::sqrt(rng.uniform());
        cx.push_back(r * std::cos(theta));
        cy.push_back(r * std::sin(theta));
        stds.push_back(rng.uniform(0.1, 2.0));
        for (std::size_t i = 0; i < sizes[c]; ++i) {
            const Point p{cx[c] + stds[c] * rng.normal(), cy[c] + stds[c] * rng.normal()};
            if (in_disk(p)) w.points.push_back(p);
        }
    }
    const std::size_t kept = w.points.size();
    const std::size_t noise = append_noise(rng, w.points);
    w.meta = {{"n_cluster", n}, {"n_clusters", n_clusters}, {"centers_x", cx},
              {"centers_y", cy}, {"stds", stds},            {"n_kept", kept},
              {"n_noise", noise}};
    return w;
}

WaferMap generate_wafer(DefectLabel label, std::uint64_t seed) {
    Rng rng(seed);
    WaferMap w;
    switch (label) {
        case DefectLabel::Random: w = gen_random(rng); break;
        case DefectLabel::Ring: w = gen_ring(rng); break;
        case DefectLabel::Scratch: w = gen_scratch(rng); break;
        case DefectLabel::Dense: w = gen_dense(rng); break;
        case DefectLabel::Cluster: w = gen_cluster(rng); break;
    }
    w.seed = seed;
    return w;
}

std::uint64_t wafer_seed(std::uint64_t dataset_seed, DefectLabel label, std::uint64_t index) {
    return splitmix64(splitmix64(dataset_seed ^ (std::uint64_t(label) << 56)) + index);
}

Dataset generate_dataset(const std::array<std::size_t, kNumClasses>& counts, std::uint64_t seed,
                         const SplitSizes& split) {
    Dataset ds;
    ds.manifest.counts = counts;
    ds.manifest.seed = seed;
    ds.manifest.split = split;
    for (int c = 0; c < kNumClasses; ++c) {
        const auto label = DefectLabel(c);
        for (std::size_t i = 0; i < counts[c]; ++i) {
            const std::uint64_t ws = wafer_seed(seed, label, i);
            ds.wafers.push_back(generate_wafer(label, ws));
            std::string part = "train";
            if (split.train + split.val + split.test > 0) {
                if (i >= split.train + split.val)
                    part = "test";
                else if (i >= split.train)
                    part = "val";
            }
            ds.manifest.entries.push_back({"", label, ws, part});
        }
    }
    return ds;
}

void write_dataset(const Dataset& ds, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "wafers", ec);
    if (ec) throw IoError("write_dataset: cannot create " + dir + ": " + ec.message());

    DatasetManifest manifest = ds.manifest;
    for (std::size_t i = 0; i < ds.wafers.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "wafers/wafer_%05zu.json", i);
        manifest.entries[i].path = name;
        write_wafer(ds.wafers[i], (fs::path(dir) / name).string());
    }

    nlohmann::json j;
    j["seed"] = manifest.seed;
    for (int c = 0; c < kNumClasses; ++c)
        j["counts"][label_name(DefectLabel(c))] = manifest.counts[c];
    j["split"] = {{"train", manifest.split.train},
                  {"val", manifest.split.val},
                  {"test", manifest.split.test}};
    for (const auto& e : manifest.entries)
        j["entries"].push_back({{"path", e.path},
                                {"label", label_name(e.label)},
                                {"seed", e.seed},
                                {"split", e.split}});
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw IoError("write_dataset: cannot open manifest in " + dir);
    out << j.dump(2) << "\n";
}

Dataset load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw IoError("load_dataset: cannot open manifest in " + dir);
    nlohmann::json j = nlohmann::json::parse(in);

    Dataset ds;
    ds.manifest.seed = j.at("seed").get<std::uint64_t>();
    for (int c = 0; c < kNumClasses; ++c)
        ds.manifest.counts[c] = j.at("counts").at(label_name(DefectLabel(c))).get<std::size_t>();
    ds.manifest.split = {j.at("split").at("train").get<std::size_t>(),
                         j.at("split").at("val").get<std::size_t>(),
                         j.at("split").at("test").get<std::size_t>()};
    for (const auto& e : j.at("entries")) {
        DatasetManifest::Entry entry{e.at("path").get<std::string>(),
                                     label_from_name(e.at("label").get<std::string>()),
                                     e.at("seed").get<std::uint64_t>(),
                                     e.at("split").get<std::string>()};
        ds.wafers.push_back(load_wafer((fs::path(dir) / entry.path).string()));
        ds.manifest.entries.push_back(std::move(entry));
    }
    return ds;
}

}  // namespace wtda
