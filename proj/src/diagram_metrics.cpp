#include "wtda/diagram_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wtda {

namespace {

void check_inputs(const PersistenceDiagram& B, const PersistenceDiagram& B2) {
    if (B.dim != B2.dim)
        throw InvalidInput("diagram distance: dimension mismatch");
    for (const auto* d : {&B, &B2})
        for (const auto& pr : d->pairs)
            if (!std::isfinite(pr.birth) || !std::isfinite(pr.death))
                throw InvalidDiagram("diagram distance: infinite persistence pair");
}

double linf(const PersistencePair& a, const PersistencePair& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diag_dist(const PersistencePair& a) { return (a.death - a.birth) / 2.0; }

}  // namespace

// JV-style shortest augmenting path, 1-based internals (cf. the classic
// e-maxx formulation). cost must be square.
double solve_assignment(const std::vector<std::vector<double>>& cost,
                        std::vector<std::int32_t>& row_to_col) {
    const int n = int(cost.size());
    row_to_col.assign(n, -1);
    if (n == 0) return 0.0;
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = std::numeric_limits<double>::infinity();
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        if (p[j]) {
            row_to_col[p[j] - 1] = j - 1;
            total += cost[p[j] - 1][j - 1];
        }
    }
    return total;
}

namespace {

// deterministic total order on diagrams, used to canonicalize the argument
// orientation so that W_p(B, B') == W_p(B', B) bit-for-bit
bool diagram_less(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    std::vector<std::pair<double, double>> pa, pb;
    for (const auto& p : a.pairs) pa.push_back({p.birth, p.death});
    for (const auto& p : b.pairs) pb.push_back({p.birth, p.death});
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    return pa < pb;
}

}  // namespace

DiagramMatching wasserstein_matching(const PersistenceDiagram& B, const PersistenceDiagram& B2,
                                     double p) {
    if (p < 1.0) throw InvalidParameter("wasserstein_distance: p must be >= 1");
    check_inputs(B, B2);
    if (diagram_less(B2, B)) {
        DiagramMatching swapped = wasserstein_matching(B2, B, p);
        for (auto& [a, b] : swapped.assignments) std::swap(a, b);
        return swapped;
    }
    const std::size_t n = B.pairs.size(), m = B2.pairs.size();
    DiagramMatching result;
    if (n == 0 && m == 0) return result;

    // Augmented square problem: rows = B points + m diagonal slots,
    // cols = B2 points + n diagonal slots. Diagonal-diagonal costs 0.
    const std::size_t sz = n + m;
    std::vector<std::vector<double>> cost(sz, std::vector<double>(sz, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j)
            cost[i][j] = std::pow(linf(B.pairs[i], B2.pairs[j]), p);
        const double cd = std::pow(diag_dist(B.pairs[i]), p);
        for (std::size_t j = m; j < sz; ++j) cost[i][j] = cd;
    }
    for (std::size_t j = 0; j < m; ++j) {
        // any diagonal row can absorb B2 point j at its projection cost
        const double cd = std::pow(diag_dist(B2.pairs[j]), p);
        for (std::size_t i = n; i < sz; ++i) cost[i][j] = cd;
    }

    std::vector<std::int32_t> row_to_col;
    const double total = solve_assignment(cost, row_to_col);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t j = row_to_col[i];
        result.assignments.push_back({std::int32_t(i), j < std::int32_t(m) ? j : kDiagonal});
    }
    for (std::size_t i = n; i < sz; ++i) {
        const std::int32_t j = row_to_col[i];
        if (j < std::int32_t(m)) result.assignments.push_back({kDiagonal, j});
    }
    result.cost = std::pow(std::max(total, 0.0), 1.0 / p);
    return result;
}

double wasserstein_distance(const PersistenceDiagram& B, const PersistenceDiagram& B2, double p) {
    return wasserstein_matching(B, B2, p).cost;
}

namespace {

// Kuhn's augmenting paths: can every vertex in `forced` be covered by a
// matching in the bipartite graph adj (left size L, right size R)?
bool covers_forced(const std::vector<std::vector<int>>& adj, int right_size,
                   const std::vector<int>& forced) {
    std::vector<int> match(right_size, -1);
    std::vector<char> visited;
    auto try_augment = [&](auto&& self, int i) -> bool {
        for (int j : adj[i]) {
            if (visited[j]) continue;
            visited[j] = 1;
            if (match[j] == -1 || self(self, match[j])) {
                match[j] = i;
                return true;
            }
        }
        return false;
    };
    for (int i : forced) {
        visited.assign(right_size, 0);
        if (!try_augment(try_augment, i)) return false;
    }
    return true;
}

// Feasibility at threshold lambda. A matching at cost <= lambda exists iff
// there is a real-real matching covering every point whose diagonal
// projection is farther than lambda; diagonal slots are never scarce.
// Covering forced rows and forced columns simultaneously reduces to covering
// each side separately (Mendelsohn-Dulmage).
bool feasible(const PersistenceDiagram& B, const PersistenceDiagram& B2, double lambda) {
    const int n = int(B.pairs.size()), m = int(B2.pairs.size());
    std::vector<std::vector<int>> adj(n), adj_t(m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (linf(B.pairs[i], B2.pairs[j]) <= lambda) {
                adj[i].push_back(j);
                adj_t[j].push_back(i);
            }
    std::vector<int> forced_rows, forced_cols;
    for (int i = 0; i < n; ++i)
        if (diag_dist(B.pairs[i]) > lambda) forced_rows.push_back(i);
    for (int j = 0; j < m; ++j)
        if (diag_dist(B2.pairs[j]) > lambda) forced_cols.push_back(j);
    return covers_forced(adj, m, forced_rows) && covers_forced(adj_t, n, forced_cols);
}

}  // namespace

double bottleneck_distance(const PersistenceDiagram& B, const PersistenceDiagram& B2) {
    check_inputs(B, B2);
    const std::size_t n = B.pairs.size(), m = B2.pairs.size();
    if (n == 0 && m == 0) return 0.0;

    std::vector<double> candidates{0.0};
    for (const auto& a : B.pairs) candidates.push_back(diag_dist(a));
    for (const auto& b : B2.pairs) candidates.push_back(diag_dist(b));
    for (const auto& a : B.pairs)
        for (const auto& b : B2.pairs) candidates.push_back(linf(a, b));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (feasible(B, B2, candidates[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return candidates[lo];
}

}  // namespace wtda
