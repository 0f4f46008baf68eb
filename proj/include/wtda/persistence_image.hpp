#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "wtda/ph_engine.hpp"

namespace wtda {

struct PIConfig {
    int grid_nx = 20;
    int grid_ny = 20;
    double birth_min = 0.0;
    double birth_max = 10.0;  // wafer radius; features live inside
    double pers_min = 0.0;
    double pers_max = 10.0;
    double sigma2 = 0.01;
    double cutoff_c = 10.0;  // weight ramp endpoint, tied to pers_max

    void validate() const;
};

// grid_ny x grid_nx non-negative pixel matrix, row-major; row index runs
// along the persistence axis (row 0 = lowest persistence), column along birth.
struct PersistenceImage {
    int dim = 0;
    int nx = 0;
    int ny = 0;
    std::vector<double> pixels;  // size ny * nx, row-major

    double at(int row, int col) const { return pixels[std::size_t(row) * nx + col]; }
    double total_mass() const;
};

struct FeatureVector {
    std::vector<double> values;  // dim-0 image flattened, then dim-1; 800 with defaults
};

// T(b, d) = (b, d - b)
std::vector<std::pair<double, double>> to_birth_persistence(const PersistenceDiagram& B);

// piecewise-linear ramp: 0 below 0, u_y / c on [0, c], 1 above
double pi_weight(double persistence, double cutoff_c);

// Per-pixel Gaussian mass evaluated exactly as a product of 1-D cdf
// differences; mass outside the grid is truncated, points are never dropped.
PersistenceImage compute_pi(const PersistenceDiagram& B, const PIConfig& cfg);

FeatureVector featurize_wafer(const PointCloud& cloud, const PIConfig& cfg);

// Worker-pool featurization; output order matches input order, so results are
// identical to the sequential run regardless of thread count.
std::vector<FeatureVector> featurize_many(const std::vector<PointCloud>& clouds,
                                          const PIConfig& cfg, int threads);

}  // namespace wtda
