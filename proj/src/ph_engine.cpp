#include "wtda/ph_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_map>

namespace wtda {

double DistanceMatrix::max_distance() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_; ++j) m = std::max(m, (*this)(i, j));
    return m;
}

DistanceMatrix compute_distance_matrix(const PointCloud& cloud) {
    if (cloud.empty()) throw InvalidInput("compute_distance_matrix: empty point cloud");
    const std::size_t n = cloud.size();
    DistanceMatrix dm(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = cloud[i].x - cloud[j].x;
            const double dy = cloud[i].y - cloud[j].y;
            dm.set(i, j, std::sqrt(dx * dx + dy * dy));
        }
    }
    return dm;
}

std::vector<FiltrationSimplex> build_rips_filtration(const DistanceMatrix& dm,
                                                     int max_dim,
                                                     double max_scale) {
    if (max_dim < 1 || max_dim > 2)
        throw InvalidParameter("build_rips_filtration: max_dim must be 1 or 2");
    if (!(max_scale > 0.0))
        throw InvalidParameter("build_rips_filtration: max_scale must be positive");

    const std::uint32_t n = std::uint32_t(dm.size());
    std::vector<FiltrationSimplex> out;
    for (std::uint32_t i = 0; i < n; ++i)
        out.push_back({{i, 0, 0}, 0, 0.0});
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            if (dm(i, j) <= max_scale) out.push_back({{i, j, 0}, 1, dm(i, j)});
    if (max_dim == 2) {
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = i + 1; j < n; ++j) {
                if (dm(i, j) > max_scale) continue;
                for (std::uint32_t k = j + 1; k < n; ++k) {
                    const double diam = std::max({dm(i, j), dm(i, k), dm(j, k)});
                    if (diam <= max_scale) out.push_back({{i, j, k}, 2, diam});
                }
            }
    }
    std::sort(out.begin(), out.end(), [](const FiltrationSimplex& a, const FiltrationSimplex& b) {
        if (a.diameter != b.diameter) return a.diameter < b.diameter;
        if (a.dim != b.dim) return a.dim < b.dim;
        return a.vertices < b.vertices;
    });
    return out;
}

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        std::uint32_t root = x;
        while (parent[root] != root) root = parent[root];
        while (parent[x] != root) {
            std::uint32_t next = parent[x];
            parent[x] = root;
            x = next;
        }
        return root;
    }
    // returns false if already same component
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

struct Edge {
    double diam;
    std::uint32_t i, j;
    bool operator<(const Edge& o) const {
        if (diam != o.diam) return diam < o.diam;
        if (i != o.i) return i < o.i;
        return j < o.j;
    }
};

struct Cofacet {
    double diam;
    std::uint32_t key;  // (i<<20)|(j<<10)|k, lexicographic for n < 1024
    bool operator<(const Cofacet& o) const {
        if (diam != o.diam) return diam < o.diam;
        return key < o.key;
    }
    bool operator==(const Cofacet& o) const { return key == o.key; }
};

}  // namespace

PersistenceResult rips_persistence(const DistanceMatrix& dm, const PersistenceOptions& opts) {
    const std::size_t n = dm.size();
    if (n == 0) throw InvalidInput("rips_persistence: empty distance matrix");
    if (n >= 1024) throw InvalidInput("rips_persistence: more than 1023 points unsupported");
    // Default scale: the enclosing radius min_i max_j d(i,j) suffices — from
    // that scale on some vertex cones off the whole complex, so every finite
    // bar is already present and nothing essential remains in dim 1.
    double max_scale = opts.max_scale;
    if (max_scale < 0.0) {
        double enclosing = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double farthest = 0.0;
            for (std::size_t j = 0; j < n; ++j) farthest = std::max(farthest, dm(i, j));
            enclosing = std::min(enclosing, farthest);
        }
        max_scale = enclosing;
    }
    constexpr double kInf = std::numeric_limits<double>::infinity();

    PersistenceResult res;
    res.dim0.dim = 0;
    res.dim1.dim = 1;

    // edges sorted by (diameter, lexicographic endpoints) = filtration order
    std::vector<Edge> edges;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            if (dm(i, j) <= max_scale) edges.push_back({dm(i, j), i, j});
    std::sort(edges.begin(), edges.end());

    // dim 0 by union-find over sorted edges; remember the tree edges, their
    // coboundary columns are known to reduce to zero below
    UnionFind uf(n);
    std::vector<char> is_tree_edge(edges.size(), 0);
    for (std::size_t r = 0; r < edges.size(); ++r) {
        const Edge& e = edges[r];
        if (uf.unite(e.i, e.j)) {
            is_tree_edge[r] = 1;
            ++res.dim0_merge_count;
            if (e.diam > 0.0 || opts.keep_zero_persistence)
                res.dim0.pairs.push_back({0, 0.0, e.diam});
        }
    }
    if (opts.keep_zero_persistence) {
        // one essential bar per component that survives to max_scale
        const std::size_t components = n - res.dim0_merge_count;
        for (std::size_t c = 0; c < components; ++c)
            res.dim0.pairs.push_back({0, 0.0, kInf});
    }

    // dim 1 by reducing the anti-transposed boundary matrix: one coboundary
    // column per edge, edges visited in reverse filtration order, pivot = the
    // earliest cofacet triangle. The persistence pairs of a matrix and its
    // anti-transpose coincide, and this direction is near-linear in practice:
    // most columns claim their pivot immediately, so columns are kept unsorted
    // until one actually participates in an addition. Tree edges are skipped
    // outright (they pair in dim 0, their columns must reduce to zero).
    std::unordered_map<std::uint32_t, std::uint32_t> claim;  // triangle key -> slot
    claim.reserve(edges.size());
    // Per claimed pivot: the edges whose coboundaries sum to its reduced
    // column (a V-matrix column, kept as a sorted Z/2 edge list). The working
    // column lives in a min-heap of cofacets; entries pushed an even number of
    // times cancel during pivot extraction, so additions just push the other
    // column's coboundary wholesale.
    std::vector<std::vector<std::uint32_t>> stored_v;
    std::vector<Cofacet> heap;
    std::vector<std::uint32_t> v_col, v_tmp;
    const auto heap_cmp = [](const Cofacet& a, const Cofacet& b) { return b < a; };

    auto pack = [](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        return (a << 20) | (b << 10) | c;
    };
    auto append_coboundary = [&](std::uint32_t rank) {  // no heap property
        const Edge& e = edges[rank];
        for (std::uint32_t c = 0; c < n; ++c) {
            if (c == e.i || c == e.j) continue;
            const double diam = std::max({e.diam, dm(e.i, c), dm(e.j, c)});
            if (diam > max_scale) continue;
            std::uint32_t a = e.i, b = e.j;
            if (c < a) heap.push_back({diam, pack(c, a, b)});
            else if (c < b) heap.push_back({diam, pack(a, c, b)});
            else heap.push_back({diam, pack(a, b, c)});
        }
    };
    auto push_coboundary = [&](std::uint32_t rank) {
        const std::size_t before = heap.size();
        append_coboundary(rank);
        for (std::size_t s = before; s < heap.size(); ++s)
            std::push_heap(heap.begin(), heap.begin() + long(s) + 1, heap_cmp);
    };
    // smallest cofacet with odd multiplicity, or nullopt for the zero column
    auto extract_pivot = [&]() -> std::optional<Cofacet> {
        while (!heap.empty()) {
            const Cofacet top = heap.front();
            std::size_t count = 0;
            while (!heap.empty() && heap.front().key == top.key) {
                std::pop_heap(heap.begin(), heap.end(), heap_cmp);
                heap.pop_back();
                ++count;
            }
            if (count % 2) return top;
        }
        return std::nullopt;
    };

    for (std::size_t r = edges.size(); r-- > 0;) {
        if (is_tree_edge[r]) continue;
        const Edge& e = edges[r];
        heap.clear();
        append_coboundary(std::uint32_t(r));
        v_col.assign(1, std::uint32_t(r));
        // fast path: a fresh coboundary has no duplicates, so its minimum is
        // the pivot; when unclaimed (the typical case) no heap is needed
        if (!heap.empty()) {
            const Cofacet first =
                *std::min_element(heap.begin(), heap.end());
            if (!claim.contains(first.key)) {
                if (first.diam > e.diam || opts.keep_zero_persistence)
                    res.dim1.pairs.push_back({1, e.diam, first.diam});
                claim.emplace(first.key, std::uint32_t(stored_v.size()));
                stored_v.push_back(v_col);
                continue;
            }
        }
        std::make_heap(heap.begin(), heap.end(), heap_cmp);
        while (const auto pivot = extract_pivot()) {
            const auto it = claim.find(pivot->key);
            if (it == claim.end()) {
                if (pivot->diam > e.diam || opts.keep_zero_persistence)
                    res.dim1.pairs.push_back({1, e.diam, pivot->diam});
                claim.emplace(pivot->key, std::uint32_t(stored_v.size()));
                stored_v.push_back(v_col);
                break;
            }
            // Z/2 addition of the claiming column: re-add the extracted pivot,
            // then push the other column's coboundary; the two copies cancel
            const std::vector<std::uint32_t>& other = stored_v[it->second];
            heap.push_back(*pivot);
            std::push_heap(heap.begin(), heap.end(), heap_cmp);
            for (const std::uint32_t rank : other) push_coboundary(rank);
            v_tmp.clear();
            std::set_symmetric_difference(v_col.begin(), v_col.end(), other.begin(), other.end(),
                                          std::back_inserter(v_tmp));
            v_col.swap(v_tmp);
        }
    }
    // reverse-order processing emits pairs by decreasing birth; normalize
    std::reverse(res.dim1.pairs.begin(), res.dim1.pairs.end());

    return res;
}

std::pair<PersistenceDiagram, PersistenceDiagram> compute_persistence(const PointCloud& cloud) {
    if (cloud.empty()) throw InvalidInput("compute_persistence: empty point cloud");
    const DistanceMatrix dm = compute_distance_matrix(cloud);
    PersistenceResult res = rips_persistence(dm);
    return {std::move(res.dim0), std::move(res.dim1)};
}

namespace {

// rank over Z/2 of a sparse 0/1 matrix given as columns of row indices
std::size_t z2_rank(std::vector<std::vector<std::uint32_t>> cols) {
    std::size_t rank = 0;
    std::vector<std::vector<std::uint32_t>> basis;  // columns with distinct pivots
    std::vector<std::uint32_t> tmp;
    for (auto& c : cols) {
        std::sort(c.begin(), c.end());
        while (!c.empty()) {
            bool reduced = false;
            for (const auto& b : basis) {
                if (b.back() == c.back()) {
                    tmp.clear();
                    std::set_symmetric_difference(c.begin(), c.end(), b.begin(), b.end(),
                                                  std::back_inserter(tmp));
                    c.swap(tmp);
                    reduced = true;
                    break;
                }
            }
            if (!reduced) break;
        }
        if (!c.empty()) {
            basis.push_back(c);
            ++rank;
        }
    }
    return rank;
}

}  // namespace

std::pair<std::size_t, std::size_t> oracle_betti(const std::vector<FiltrationSimplex>& simplices) {
    std::vector<std::uint32_t> verts;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<std::array<std::uint32_t, 3>> tris;
    for (const auto& s : simplices) {
        switch (s.dim) {
            case 0: verts.push_back(s.vertices[0]); break;
            case 1: edges.push_back({s.vertices[0], s.vertices[1]}); break;
            case 2: tris.push_back(s.vertices); break;
            default: throw InvalidComplex("oracle_betti: dimension > 2");
        }
    }
    std::sort(verts.begin(), verts.end());
    std::sort(edges.begin(), edges.end());
    auto vert_index = [&](std::uint32_t v) -> std::uint32_t {
        auto it = std::lower_bound(verts.begin(), verts.end(), v);
        if (it == verts.end() || *it != v) throw InvalidComplex("oracle_betti: missing vertex face");
        return std::uint32_t(it - verts.begin());
    };
    auto edge_index = [&](std::uint32_t a, std::uint32_t b) -> std::uint32_t {
        auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(a, b));
        if (it == edges.end() || *it != std::make_pair(a, b))
            throw InvalidComplex("oracle_betti: missing edge face");
        return std::uint32_t(it - edges.begin());
    };

    std::vector<std::vector<std::uint32_t>> d1;  // edge columns over vertex rows
    for (const auto& [a, b] : edges) d1.push_back({vert_index(a), vert_index(b)});
    std::vector<std::vector<std::uint32_t>> d2;  // triangle columns over edge rows
    for (const auto& t : tris)
        d2.push_back({edge_index(t[0], t[1]), edge_index(t[0], t[2]), edge_index(t[1], t[2])});

    const std::size_t r1 = z2_rank(std::move(d1));
    const std::size_t r2 = z2_rank(std::move(d2));
    const std::size_t b0 = verts.size() - r1;
    const std::size_t b1 = edges.size() - r1 - r2;
    return {b0, b1};
}

}  // namespace wtda
