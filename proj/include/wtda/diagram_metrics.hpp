#pragma once

#include <cstdint>
#include <vector>

#include "wtda/ph_engine.hpp"

namespace wtda {

// Sentinel partner index meaning "matched to the diagonal".
inline constexpr std::int32_t kDiagonal = -1;

struct DiagramMatching {
    // (index into B or kDiagonal, index into B2 or kDiagonal)
    std::vector<std::pair<std::int32_t, std::int32_t>> assignments;
    double cost = 0.0;  // the distance value
};

// Exact p-Wasserstein distance with l-infinity ground metric; points may be
// matched to their diagonal projection at half-persistence cost.
double wasserstein_distance(const PersistenceDiagram& B, const PersistenceDiagram& B2, double p);

DiagramMatching wasserstein_matching(const PersistenceDiagram& B, const PersistenceDiagram& B2,
                                     double p);

// Exact bottleneck distance: binary search over candidate costs with
// bipartite matching feasibility checks.
double bottleneck_distance(const PersistenceDiagram& B, const PersistenceDiagram& B2);

// O(n^3) Kuhn-Munkres on a square cost matrix; returns assignment row -> col.
double solve_assignment(const std::vector<std::vector<double>>& cost,
                        std::vector<std::int32_t>& row_to_col);

}  // namespace wtda
