#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "wtda/error.hpp"

namespace wtda {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

using PointCloud = std::vector<Point>;

// Symmetric matrix of exact pairwise Euclidean distances.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        d_[i * n_ + j] = v;
        d_[j * n_ + i] = v;
    }
    double max_distance() const;

private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

// A vertex, edge or triangle of the Rips filtration. Vertex indices are
// strictly increasing; diameter is the max pairwise distance (0 for vertices).
struct FiltrationSimplex {
    std::array<std::uint32_t, 3> vertices{0, 0, 0};  // first `dim+1` entries used
    std::uint8_t dim = 0;
    double diameter = 0.0;
};

struct PersistencePair {
    int dim = 0;
    double birth = 0.0;
    double death = 0.0;
};

struct PersistenceDiagram {
    int dim = 0;
    std::vector<PersistencePair> pairs;
};

DistanceMatrix compute_distance_matrix(const PointCloud& cloud);

// All simplices of dimension <= max_dim with diameter <= max_scale, sorted by
// (diameter, dimension, lexicographic vertices). Every prefix is a complex.
std::vector<FiltrationSimplex> build_rips_filtration(const DistanceMatrix& dm,
                                                     int max_dim,
                                                     double max_scale);

struct PersistenceOptions {
    // Negative means "full filtration": max pairwise distance.
    double max_scale = -1.0;
    // Keep birth == death pairs and the essential dim-0 bar; test support.
    bool keep_zero_persistence = false;
};

struct PersistenceResult {
    PersistenceDiagram dim0;  // finite bars, birth 0
    PersistenceDiagram dim1;
    std::size_t dim0_merge_count = 0;  // union-find merges, n-1 for a connected end state
};

PersistenceResult rips_persistence(const DistanceMatrix& dm,
                                   const PersistenceOptions& opts = {});

// Spec surface: full filtration, zero-persistence and essential bars discarded.
std::pair<PersistenceDiagram, PersistenceDiagram> compute_persistence(const PointCloud& cloud);

// Betti numbers (b0, b1) by naive Z/2 rank computation of the boundary
// matrices. Test oracle; validates the closure property of the input.
std::pair<std::size_t, std::size_t> oracle_betti(const std::vector<FiltrationSimplex>& simplices);

}  // namespace wtda
