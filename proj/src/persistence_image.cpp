#include "wtda/persistence_image.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

namespace wtda {

void PIConfig::validate() const {
    if (grid_nx < 1 || grid_ny < 1) throw InvalidParameter("PIConfig: grid counts must be >= 1");
    if (!(birth_max > birth_min) || !(pers_max > pers_min))
        throw InvalidParameter("PIConfig: ranges must have positive length");
    if (!(sigma2 > 0.0)) throw InvalidParameter("PIConfig: sigma2 must be positive");
    if (!(cutoff_c > 0.0)) throw InvalidParameter("PIConfig: cutoff_c must be positive");
}

double PersistenceImage::total_mass() const {
    return std::accumulate(pixels.begin(), pixels.end(), 0.0);
}

std::vector<std::pair<double, double>> to_birth_persistence(const PersistenceDiagram& B) {
    std::vector<std::pair<double, double>> out;
    out.reserve(B.pairs.size());
    for (const auto& p : B.pairs) {
        if (!std::isfinite(p.birth) || !std::isfinite(p.death))
            throw InvalidDiagram("to_birth_persistence: infinite pair");
        out.push_back({p.birth, p.death - p.birth});
    }
    return out;
}

double pi_weight(double persistence, double cutoff_c) {
    if (persistence < 0.0) return 0.0;
    if (persistence > cutoff_c) return 1.0;
    return persistence / cutoff_c;
}

namespace {

double gauss_cdf(double x, double mean, double sigma) {
    return 0.5 * std::erfc((mean - x) / (sigma * std::numbers::sqrt2));
}

}  // namespace

PersistenceImage compute_pi(const PersistenceDiagram& B, const PIConfig& cfg) {
    cfg.validate();
    PersistenceImage img;
    img.dim = B.dim;
    img.nx = cfg.grid_nx;
    img.ny = cfg.grid_ny;
    img.pixels.assign(std::size_t(cfg.grid_nx) * cfg.grid_ny, 0.0);

    const double sigma = std::sqrt(cfg.sigma2);
    const double wx = (cfg.birth_max - cfg.birth_min) / cfg.grid_nx;
    const double wy = (cfg.pers_max - cfg.pers_min) / cfg.grid_ny;

    std::vector<double> cx(cfg.grid_nx), cy(cfg.grid_ny);
    for (const auto& [b, pers] : to_birth_persistence(B)) {
        const double f = pi_weight(pers, cfg.cutoff_c);
        if (f == 0.0) continue;
        // 1-D cdf differences along each axis; beyond 10 sigma everything is 0
        for (int i = 0; i < cfg.grid_nx; ++i) {
            const double x0 = cfg.birth_min + i * wx;
            cx[i] = (std::abs(x0 + 0.5 * wx - b) > 10.0 * sigma + wx)
                        ? 0.0
                        : gauss_cdf(x0 + wx, b, sigma) - gauss_cdf(x0, b, sigma);
        }
        for (int j = 0; j < cfg.grid_ny; ++j) {
            const double y0 = cfg.pers_min + j * wy;
            cy[j] = (std::abs(y0 + 0.5 * wy - pers) > 10.0 * sigma + wy)
                        ? 0.0
                        : gauss_cdf(y0 + wy, pers, sigma) - gauss_cdf(y0, pers, sigma);
        }
        for (int j = 0; j < cfg.grid_ny; ++j) {
            if (cy[j] == 0.0) continue;
            double* row = img.pixels.data() + std::size_t(j) * cfg.grid_nx;
            const double fy = f * cy[j];
            for (int i = 0; i < cfg.grid_nx; ++i) row[i] += fy * cx[i];
        }
    }
    return img;
}

FeatureVector featurize_wafer(const PointCloud& cloud, const PIConfig& cfg) {
    auto [pd0, pd1] = compute_persistence(cloud);
    const PersistenceImage i0 = compute_pi(pd0, cfg);
    const PersistenceImage i1 = compute_pi(pd1, cfg);
    FeatureVector fv;
    fv.values.reserve(i0.pixels.size() + i1.pixels.size());
    fv.values.insert(fv.values.end(), i0.pixels.begin(), i0.pixels.end());
    fv.values.insert(fv.values.end(), i1.pixels.begin(), i1.pixels.end());
    return fv;
}

std::vector<FeatureVector> featurize_many(const std::vector<PointCloud>& clouds,
                                          const PIConfig& cfg, int threads) {
    std::vector<FeatureVector> out(clouds.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < clouds.size(); ++i) out[i] = featurize_wafer(clouds[i], cfg);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= clouds.size()) return;
                try {
                    out[i] = featurize_wafer(clouds[i], cfg);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace wtda
