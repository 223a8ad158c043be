#include "vspk/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>

#include "vspk/error.hpp"

namespace vspk {

double enclosing_radius(const DistanceMatrix& dm) {
    const std::size_t n = dm.size();
    if (n == 0) return 0.0;
    double best = kUnbounded;
    for (std::size_t i = 0; i < n; ++i) {
        double far = 0.0;
        for (std::size_t j = 0; j < n; ++j) far = std::max(far, dm(i, j));
        best = std::min(best, far);
    }
    return best;
}

namespace {

void check_rips_args(int max_dim, double threshold) {
    if (max_dim < 0) throw InputError("max_dim must be nonnegative");
    if (!(threshold > 0.0)) throw InputError("threshold must be positive or unbounded");
}

// Enumerates every clique with at most `max_vertices` vertices and diameter <=
// threshold, calling emit(vertices, diameter).
template <class Emit>
void enumerate_cliques(const DistanceMatrix& dm, std::size_t max_vertices, double threshold,
                       Emit&& emit) {
    const std::size_t n = dm.size();
    std::vector<std::uint32_t> clique;
    std::vector<std::vector<std::uint32_t>> candidates(max_vertices + 1);

    auto extend = [&](auto&& self, double diameter) -> void {
        emit(std::span<const std::uint32_t>(clique), diameter);
        if (clique.size() == max_vertices) return;
        const auto& cand = candidates[clique.size()];
        for (std::size_t c = 0; c < cand.size(); ++c) {
            const std::uint32_t w = cand[c];
            double d = diameter;
            for (auto u : clique) d = std::max(d, dm(u, w));
            auto& next = candidates[clique.size() + 1];
            next.clear();
            for (std::size_t c2 = c + 1; c2 < cand.size(); ++c2)
                if (dm(w, cand[c2]) <= threshold) next.push_back(cand[c2]);
            clique.push_back(w);
            self(self, d);
            clique.pop_back();
        }
    };

    for (std::uint32_t v = 0; v < n; ++v) {
        clique.assign(1, v);
        auto& cand = candidates[1];
        cand.clear();
        for (std::uint32_t w = v + 1; w < n; ++w)
            if (dm(v, w) <= threshold) cand.push_back(w);
        extend(extend, 0.0);
    }
}

struct SimplexOrder {
    const std::vector<double>& radii;
    const std::vector<std::uint32_t>& offsets;
    const std::vector<std::uint32_t>& verts;

    bool operator()(std::size_t a, std::size_t b) const {
        if (radii[a] != radii[b]) return radii[a] < radii[b];
        const auto la = offsets[a + 1] - offsets[a], lb = offsets[b + 1] - offsets[b];
        if (la != lb) return la < lb;
        return std::lexicographical_compare(verts.begin() + offsets[a], verts.begin() + offsets[a + 1],
                                            verts.begin() + offsets[b], verts.begin() + offsets[b + 1]);
    }
};

}  // namespace

Filtration build_rips_filtration(const DistanceMatrix& dm, int max_dim, double threshold,
                                 std::size_t simplex_cap) {
    check_rips_args(max_dim, threshold);
    std::vector<double> radii;
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint32_t> verts;

    enumerate_cliques(dm, static_cast<std::size_t>(max_dim) + 2, threshold,
                      [&](std::span<const std::uint32_t> c, double diameter) {
                          if (radii.size() >= simplex_cap)
                              throw ComputeError("Rips filtration exceeds " + std::to_string(simplex_cap) +
                                                 " simplices; use a smaller threshold or max_dim");
                          radii.push_back(diameter);
                          verts.insert(verts.end(), c.begin(), c.end());
                          offsets.push_back(static_cast<std::uint32_t>(verts.size()));
                      });

    std::vector<std::size_t> order(radii.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), SimplexOrder{radii, offsets, verts});

    Filtration f;
    f.max_dim_ = max_dim;
    f.threshold_ = threshold;
    f.radii_.reserve(radii.size());
    f.offsets_.reserve(radii.size() + 1);
    f.vertices_.reserve(verts.size());
    for (auto k : order) {
        f.radii_.push_back(radii[k]);
        f.vertices_.insert(f.vertices_.end(), verts.begin() + offsets[k], verts.begin() + offsets[k + 1]);
        f.offsets_.push_back(static_cast<std::uint32_t>(f.vertices_.size()));
    }
    return f;
}

namespace {

// Combinatorial-number-system key of a sorted vertex tuple; unique within one
// dimension.
class SimplexKeys {
public:
    SimplexKeys(std::size_t n_vertices, std::size_t max_len) : table_(max_len + 1) {
        for (std::size_t k = 0; k <= max_len; ++k) {
            table_[k].assign(n_vertices + 1, 0);
            for (std::size_t n = 0; n <= n_vertices; ++n) {
                if (k == 0)
                    table_[k][n] = 1;
                else if (n == 0)
                    table_[k][n] = 0;
                else {
                    const auto a = table_[k - 1][n - 1], b = table_[k][n - 1];
                    if (a > UINT64_MAX - b) throw ComputeError("simplex index space overflows 64 bits");
                    table_[k][n] = a + b;
                }
            }
        }
    }

    std::uint64_t key(std::span<const std::uint32_t> v, std::size_t skip = SIZE_MAX) const {
        std::uint64_t k = 0;
        std::size_t pos = 1;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i == skip) continue;
            k += table_[pos++][v[i]];
        }
        return k;
    }

private:
    std::vector<std::vector<std::uint64_t>> table_;
};

void add_mod2(std::vector<std::uint32_t>& col, const std::vector<std::uint32_t>& other,
              std::vector<std::uint32_t>& scratch) {
    scratch.clear();
    std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                  std::back_inserter(scratch));
    col.swap(scratch);
}

}  // namespace

Filtration reorder_filtration(const Filtration& f, std::span<const std::size_t> order) {
    if (order.size() != f.size()) throw InputError("reorder_filtration: order has wrong length");
    std::vector<char> seen(f.size(), 0);
    std::size_t n_vertices = 0;
    for (std::size_t k = 0; k < f.size(); ++k)
        for (auto v : f.vertices(k)) n_vertices = std::max<std::size_t>(n_vertices, v + 1);
    SimplexKeys keys(n_vertices, static_cast<std::size_t>(f.max_dimension()) + 2);
    std::vector<std::unordered_map<std::uint64_t, char>> present(f.max_dimension() + 2);

    Filtration out;
    out.max_dim_ = f.max_dimension();
    out.threshold_ = f.threshold();
    for (auto k : order) {
        if (k >= f.size() || seen[k]) throw InputError("reorder_filtration: order is not a permutation");
        seen[k] = 1;
        const auto v = f.vertices(k);
        const int d = f.dimension(k);
        if (d > 0)
            for (std::size_t s = 0; s < v.size(); ++s)
                if (!present[d - 1].count(keys.key(v, s)))
                    throw InputError("reorder_filtration: a coface precedes one of its faces");
        present[d][keys.key(v)] = 1;
        out.radii_.push_back(f.radius(k));
        out.vertices_.insert(out.vertices_.end(), v.begin(), v.end());
        out.offsets_.push_back(static_cast<std::uint32_t>(out.vertices_.size()));
    }
    return out;
}

std::vector<PersistencePair> compute_persistence(const Filtration& f) {
    const std::size_t n = f.size();
    const int top = f.max_dimension() + 1;
    std::size_t n_vertices = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (f.dimension(k) == 0) n_vertices = std::max<std::size_t>(n_vertices, f.vertices(k)[0] + 1);
    const SimplexKeys keys(n_vertices, static_cast<std::size_t>(top) + 1);

    // Per-dimension sorted (key, filtration index) tables for face lookup.
    std::vector<std::vector<std::pair<std::uint64_t, std::uint32_t>>> lookup(top + 1);
    std::vector<std::vector<std::uint32_t>> by_dim(top + 1);
    for (std::size_t k = 0; k < n; ++k) {
        const int d = f.dimension(k);
        lookup[d].emplace_back(keys.key(f.vertices(k)), static_cast<std::uint32_t>(k));
        by_dim[d].push_back(static_cast<std::uint32_t>(k));
    }
    for (auto& t : lookup) std::sort(t.begin(), t.end());

    auto index_of = [&](int d, std::uint64_t key) {
        const auto& t = lookup[d];
        auto it = std::lower_bound(t.begin(), t.end(), std::make_pair(key, std::uint32_t{0}));
        if (it == t.end() || it->first != key) throw InputError("filtration is missing a face");
        return it->second;
    };

    constexpr std::int64_t none = -1;
    std::vector<std::int64_t> pivot_owner(n, none);
    std::vector<char> cleared(n, 0);
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> reduced;
    std::vector<PersistencePair> pairs;
    std::vector<std::uint32_t> col, scratch;

    for (int d = top; d >= 1; --d) {
        for (auto k : by_dim[d]) {
            if (cleared[k]) continue;
            const auto v = f.vertices(k);
            col.clear();
            for (std::size_t s = 0; s < v.size(); ++s) {
                const auto face = index_of(d - 1, keys.key(v, s));
                if (face >= k) throw InputError("filtration lists a coface before its face");
                col.push_back(face);
            }
            std::sort(col.begin(), col.end());
            while (!col.empty() && pivot_owner[col.back()] != none)
                add_mod2(col, reduced.at(static_cast<std::uint32_t>(pivot_owner[col.back()])), scratch);
            if (col.empty()) continue;
            const auto low = col.back();
            pivot_owner[low] = k;
            cleared[low] = 1;
            if (f.radius(k) > f.radius(low)) pairs.push_back({d - 1, f.radius(low), f.radius(k)});
            reduced.emplace(k, col);
        }
    }

    // A creator whose class was never killed: its column is zero (vertices
    // always; higher simplices whenever they do not own a pivot).
    for (int d = 0; d <= f.max_dimension(); ++d)
        for (auto k : by_dim[d])
            if (!cleared[k] && !reduced.count(k)) pairs.push_back({d, f.radius(k), kUnbounded});
    return pairs;
}

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

struct Edge {
    double radius;
    std::uint32_t u, v;  // u < v
};

bool edge_before(const Edge& a, const Edge& b) {
    if (a.radius != b.radius) return a.radius < b.radius;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
}

struct Triangle {
    double radius;
    std::uint32_t a, b, c;  // a < b < c

    bool operator==(const Triangle& o) const { return a == o.a && b == o.b && c == o.c; }
};

// Heap comparator placing the earliest triangle in filtration order on top.
struct LaterTriangle {
    bool operator()(const Triangle& x, const Triangle& y) const {
        if (x.radius != y.radius) return x.radius > y.radius;
        if (x.a != y.a) return x.a > y.a;
        if (x.b != y.b) return x.b > y.b;
        return x.c > y.c;
    }
};

using TriangleHeap = std::priority_queue<Triangle, std::vector<Triangle>, LaterTriangle>;

// H0 by union-find, H1 by reducing edge coboundaries in reverse filtration
// order; cohomology yields the same pairs as homology.
std::vector<PersistencePair> low_dimensional_persistence(const DistanceMatrix& dm, int max_dim,
                                                         double threshold) {
    const std::size_t n = dm.size();
    std::vector<Edge> edges;
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = u + 1; v < n; ++v)
            if (dm(u, v) <= threshold) edges.push_back({dm(u, v), u, v});
    std::sort(edges.begin(), edges.end(), edge_before);

    std::vector<PersistencePair> pairs;
    std::vector<char> kills_component(edges.size(), 0);
    UnionFind components(n);
    std::size_t alive = n;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!components.unite(edges[e].u, edges[e].v)) continue;
        kills_component[e] = 1;
        --alive;
        if (edges[e].radius > 0.0) pairs.push_back({0, 0.0, edges[e].radius});
    }
    for (std::size_t c = 0; c < alive; ++c) pairs.push_back({0, 0.0, kUnbounded});
    if (max_dim < 1) return pairs;

    std::vector<std::int32_t> edge_index(n * n, -1);
    for (std::size_t e = 0; e < edges.size(); ++e)
        edge_index[edges[e].u * n + edges[e].v] = edge_index[edges[e].v * n + edges[e].u] =
            static_cast<std::int32_t>(e);

    auto push_coboundary = [&](std::size_t e, TriangleHeap& heap) {
        const auto [r, u, v] = edges[e];
        for (std::uint32_t w = 0; w < n; ++w) {
            if (w == u || w == v) continue;
            const double du = dm(u, w), dv = dm(v, w);
            if (du > threshold || dv > threshold) continue;
            std::uint32_t t[3] = {u, v, w};
            std::sort(t, t + 3);
            heap.push({std::max({r, du, dv}), t[0], t[1], t[2]});
        }
    };
    auto triangle_key = [n](const Triangle& t) {
        return (static_cast<std::uint64_t>(t.a) * n + t.b) * n + t.c;
    };
    auto pop_pivot = [](TriangleHeap& heap) -> std::optional<Triangle> {
        while (!heap.empty()) {
            const Triangle t = heap.top();
            heap.pop();
            if (!heap.empty() && heap.top() == t) {
                heap.pop();
                continue;
            }
            return t;
        }
        return std::nullopt;
    };

    // pivot triangle -> edge owning it; owner -> edges summed into its column
    std::unordered_map<std::uint64_t, std::uint32_t> pivot_owner;
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> combination;

    for (std::size_t idx = edges.size(); idx-- > 0;) {
        if (kills_component[idx]) continue;
        TriangleHeap heap;
        std::vector<std::uint32_t> comb{static_cast<std::uint32_t>(idx)};
        push_coboundary(idx, heap);
        std::optional<Triangle> pivot;
        while ((pivot = pop_pivot(heap))) {
            auto it = pivot_owner.find(triangle_key(*pivot));
            if (it == pivot_owner.end()) break;
            heap.push(*pivot);
            const auto& other = combination.at(it->second);
            for (auto e : other) push_coboundary(e, heap);
            comb.insert(comb.end(), other.begin(), other.end());
        }
        if (!pivot) {
            pairs.push_back({1, edges[idx].radius, kUnbounded});
            continue;
        }
        pivot_owner.emplace(triangle_key(*pivot), static_cast<std::uint32_t>(idx));
        std::sort(comb.begin(), comb.end());
        std::vector<std::uint32_t> odd;
        for (std::size_t i = 0; i < comb.size();) {
            std::size_t j = i;
            while (j < comb.size() && comb[j] == comb[i]) ++j;
            if ((j - i) % 2 == 1) odd.push_back(comb[i]);
            i = j;
        }
        combination.emplace(static_cast<std::uint32_t>(idx), std::move(odd));
        if (pivot->radius > edges[idx].radius) pairs.push_back({1, edges[idx].radius, pivot->radius});
    }
    return pairs;
}

}  // namespace

std::vector<PersistencePair> rips_persistence(const DistanceMatrix& dm, int max_dim, double threshold,
                                              std::size_t simplex_cap) {
    check_rips_args(max_dim, threshold);
    if (dm.size() == 0) return {};
    if (max_dim <= 1) return low_dimensional_persistence(dm, max_dim, threshold);
    return compute_persistence(build_rips_filtration(dm, max_dim, threshold, simplex_cap));
}

PersistenceDiagram diagram_from_pairs(std::span<const PersistencePair> pairs, int r,
                                      EssentialPolicy policy) {
    if (r < 0) throw InputError("homology dimension must be nonnegative");
    std::vector<BirthDeath> points;
    for (const auto& p : pairs) {
        if (p.dimension != r) continue;
        if (!p.essential()) {
            points.push_back({p.birth, p.death});
        } else if (policy.cap_essential) {
            if (!(policy.cap_value > p.birth))
                throw InputError("essential cap " + std::to_string(policy.cap_value) +
                                 " is not above birth " + std::to_string(p.birth));
            points.push_back({p.birth, policy.cap_value});
        }
    }
    return PersistenceDiagram(r, std::move(points));
}

namespace {

// Rank over Z/2 of a dense 0/1 matrix given as rows.
std::size_t rank_mod2(std::vector<std::vector<char>> rows) {
    std::size_t rank = 0;
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t p = rank;
        while (p < rows.size() && !rows[p][c]) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[rank]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != rank && rows[i][c])
                for (std::size_t j = c; j < cols; ++j) rows[i][j] ^= rows[rank][j];
        ++rank;
    }
    return rank;
}

}  // namespace

int betti_number_oracle(const DistanceMatrix& dm, double eps, int r) {
    if (r < 0) throw InputError("betti_number_oracle: r must be nonnegative");
    if (dm.size() > kOracleMaxPoints)
        throw InputError("betti_number_oracle is limited to " + std::to_string(kOracleMaxPoints) + " points");
    if (eps < 0.0) return 0;

    // simplices[d] = all d-simplices of the complex at radius eps
    std::vector<std::vector<std::vector<std::uint32_t>>> simplices(r + 2);
    const std::size_t max_vertices = static_cast<std::size_t>(r) + 2;
    const std::size_t n = dm.size();
    std::vector<std::uint32_t> clique;
    auto grow = [&](auto&& self, std::uint32_t from) -> void {
        simplices[clique.size() - 1].push_back(clique);
        if (clique.size() == max_vertices) return;
        for (std::uint32_t w = from; w < n; ++w) {
            bool ok = true;
            for (auto u : clique) ok = ok && dm(u, w) <= eps;
            if (!ok) continue;
            clique.push_back(w);
            self(self, w + 1);
            clique.pop_back();
        }
    };
    for (std::uint32_t v = 0; v < n; ++v) {
        clique.assign(1, v);
        grow(grow, v + 1);
    }

    // Boundary matrix of dimension d: rows are d-simplices, columns (d-1)-simplices.
    auto boundary_rank = [&](int d) -> std::size_t {
        if (d <= 0 || simplices[d].empty()) return 0;
        const auto& faces = simplices[d - 1];
        std::vector<std::vector<char>> rows;
        for (const auto& s : simplices[d]) {
            std::vector<char> row(faces.size(), 0);
            for (std::size_t skip = 0; skip < s.size(); ++skip) {
                std::vector<std::uint32_t> face;
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (i != skip) face.push_back(s[i]);
                const auto it = std::find(faces.begin(), faces.end(), face);
                row[static_cast<std::size_t>(it - faces.begin())] ^= 1;
            }
            rows.push_back(std::move(row));
        }
        return rank_mod2(std::move(rows));
    };

    const auto chains = static_cast<long>(simplices[r].size());
    return static_cast<int>(chains - static_cast<long>(boundary_rank(r)) -
                            static_cast<long>(boundary_rank(r + 1)));
}

}  // namespace vspk
