#include "persistome/persistence.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace persistome {

namespace {

void finish_diagram(PersistenceDiagram& pd) {
    std::sort(pd.pairs.begin(), pd.pairs.end(), [](const auto& a, const auto& b) {
        if (a.birth != b.birth) return a.birth < b.birth;
        if (a.death != b.death) return a.death < b.death;
        return a.truncated < b.truncated;
    });
}

void add_pair(PersistenceDiagram& pd, double birth, double death, bool truncated) {
    if (death > birth) pd.pairs.push_back({birth, death, pd.dim, truncated});
}

// -------------------------------------------------------------------------
// standard reduction (homology boundary matrix, per-dimension blocks)
// -------------------------------------------------------------------------

using Column = std::vector<uint32_t>; // sorted ascending row indices

Column xor_merge(const Column& a, const Column& b) {
    Column out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) out.push_back(a[i++]);
        else if (b[j] < a[i]) out.push_back(b[j++]);
        else { ++i; ++j; } // Z/2 cancellation
    }
    out.insert(out.end(), a.begin() + i, a.end());
    out.insert(out.end(), b.begin() + j, b.end());
    return out;
}

std::unordered_map<SimplexKey, uint32_t> index_by_key(const Filtration& f, int dim) {
    std::unordered_map<SimplexKey, uint32_t> map;
    map.reserve(f.count(dim) * 2);
    for (size_t i = 0; i < f.count(dim); ++i)
        map.emplace(f.keys[dim][i], static_cast<uint32_t>(i));
    return map;
}

} // namespace

std::vector<PersistenceDiagram> reduce_standard(const Filtration& f, int max_hom_dim) {
    if (max_hom_dim < 0 || max_hom_dim > 2)
        throw Error("bad_argument", "max_hom_dim must be in 0..2");
    const int top = std::min(max_hom_dim + 1, f.max_dim);

    std::vector<PersistenceDiagram> diagrams(max_hom_dim + 1);
    for (int k = 0; k <= max_hom_dim; ++k) diagrams[k].dim = k;

    // killed[d][i]: (d)-simplex i was claimed as a pivot by a (d+1)-column
    std::array<std::vector<bool>, 4> killed;
    // creator[d][i]: column of (d)-simplex i reduced to zero
    std::array<std::vector<bool>, 4> creator;
    creator[0].assign(f.count(0), true); // every vertex creates a component
    for (int d = 1; d <= top; ++d) creator[d].assign(f.count(d), false);
    for (int d = 0; d <= top; ++d) killed[d].assign(f.count(d), false);

    for (int d = 1; d <= top; ++d) {
        const auto row_index = index_by_key(f, d - 1);
        const size_t n_rows = f.count(d - 1);
        const size_t n_cols = f.count(d);
        std::vector<int64_t> owner(n_rows, -1);
        std::vector<Column> reduced(n_cols);

        uint32_t verts[4];
        uint32_t facet[4];
        for (size_t j = 0; j < n_cols; ++j) {
            unpack_simplex(f.keys[d][j], d, verts);
            Column col;
            col.reserve(d + 1);
            for (int drop = 0; drop <= d; ++drop) {
                int w = 0;
                for (int v = 0; v <= d; ++v)
                    if (v != drop) facet[w++] = verts[v];
                col.push_back(row_index.at(pack_simplex(facet, d - 1)));
            }
            std::sort(col.begin(), col.end());

            while (!col.empty()) {
                const uint32_t pivot = col.back();
                const int64_t other = owner[pivot];
                if (other < 0) break;
                col = xor_merge(col, reduced[static_cast<size_t>(other)]);
            }
            if (col.empty()) {
                creator[d][j] = true;
            } else {
                const uint32_t pivot = col.back();
                owner[pivot] = static_cast<int64_t>(j);
                killed[d - 1][pivot] = true;
                if (d - 1 <= max_hom_dim)
                    add_pair(diagrams[d - 1], f.values[d - 1][pivot], f.values[d][j], false);
                reduced[j] = std::move(col);
            }
        }
    }

    // classes alive at threshold
    for (int k = 0; k <= max_hom_dim; ++k) {
        if (k > f.max_dim) break;
        for (size_t i = 0; i < f.count(k); ++i)
            if (creator[k][i] && !killed[k][i])
                add_pair(diagrams[k], f.values[k][i], f.threshold, true);
        finish_diagram(diagrams[k]);
    }
    return diagrams;
}

// -------------------------------------------------------------------------
// fast reduction (anti-transposed matrix with clearing, implicit cofacets)
// -------------------------------------------------------------------------

namespace {

struct UnionFind {
    std::vector<uint32_t> parent;
    explicit UnionFind(size_t n) : parent(n) {
        for (size_t i = 0; i < n; ++i) parent[i] = static_cast<uint32_t>(i);
    }
    uint32_t find(uint32_t x) {
        uint32_t root = x;
        while (parent[root] != root) root = parent[root];
        while (parent[x] != root) {
            uint32_t next = parent[x];
            parent[x] = root;
            x = next;
        }
        return root;
    }
    bool link(uint32_t a, uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

using HeapEntry = std::pair<double, SimplexKey>; // (value, key); min = earliest cofacet

using CofacetHeap =
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>>;

bool pop_pivot(CofacetHeap& heap, HeapEntry& out) {
    while (!heap.empty()) {
        HeapEntry e = heap.top();
        heap.pop();
        if (!heap.empty() && heap.top().second == e.second) {
            heap.pop(); // Z/2 pair cancels
            continue;
        }
        out = e;
        return true;
    }
    return false;
}

// threshold-graph geometry reconstructed from the filtration's edges
struct Graph {
    size_t n = 0;
    size_t words = 0;
    std::vector<uint64_t> adj;
    std::vector<double> dist; // +inf where no edge

    explicit Graph(const Filtration& f)
        : n(f.n_points), words((f.n_points + 63) / 64), adj(n * words, 0),
          dist(n * n, std::numeric_limits<double>::infinity()) {
        for (size_t i = 0; i < n; ++i) dist[i * n + i] = 0.0;
        uint32_t v[2];
        for (size_t e = 0; e < f.count(1); ++e) {
            unpack_simplex(f.keys[1][e], 1, v);
            const double val = f.values[1][e];
            dist[v[0] * n + v[1]] = val;
            dist[v[1] * n + v[0]] = val;
            adj[v[0] * words + v[1] / 64] |= uint64_t(1) << (v[1] % 64);
            adj[v[1] * words + v[0] / 64] |= uint64_t(1) << (v[0] % 64);
        }
    }

    const uint64_t* row(uint32_t i) const { return adj.data() + size_t(i) * words; }
};

// push all cofacets sigma ∪ {w} of a d-simplex onto the heap
void push_cofacets(const Graph& g, const uint32_t* verts, int dim, double value,
                   std::vector<uint64_t>& mask, CofacetHeap& heap) {
    const size_t words = g.words;
    const uint64_t* r0 = g.row(verts[0]);
    for (size_t w = 0; w < words; ++w) mask[w] = r0[w];
    for (int v = 1; v <= dim; ++v) {
        const uint64_t* rv = g.row(verts[v]);
        for (size_t w = 0; w < words; ++w) mask[w] &= rv[w];
    }
    uint32_t cof[5];
    for (size_t w = 0; w < words; ++w) {
        uint64_t bits = mask[w];
        while (bits) {
            const uint32_t k = static_cast<uint32_t>(w * 64 + std::countr_zero(bits));
            bits &= bits - 1;
            double val = value;
            for (int v = 0; v <= dim; ++v)
                val = std::max(val, g.dist[size_t(verts[v]) * g.n + k]);
            int out = 0;
            bool inserted = false;
            for (int v = 0; v <= dim; ++v) {
                if (!inserted && k < verts[v]) {
                    cof[out++] = k;
                    inserted = true;
                }
                cof[out++] = verts[v];
            }
            if (!inserted) cof[out++] = k;
            heap.push({val, pack_simplex(cof, dim + 1)});
        }
    }
}

} // namespace

std::vector<PersistenceDiagram> reduce_fast(const Filtration& f, int max_hom_dim) {
    if (max_hom_dim < 0 || max_hom_dim > 2)
        throw Error("bad_argument", "max_hom_dim must be in 0..2");

    std::vector<PersistenceDiagram> diagrams(max_hom_dim + 1);
    for (int k = 0; k <= max_hom_dim; ++k) diagrams[k].dim = k;

    const Graph graph(f);

    // dimension 0 by union-find over edges in filtration order; the merging
    // edges are exactly the columns cleared in the next pass
    std::vector<bool> cleared(f.count(1), false);
    {
        UnionFind uf(f.n_points);
        uint32_t v[2];
        for (size_t e = 0; e < f.count(1); ++e) {
            unpack_simplex(f.keys[1][e], 1, v);
            if (uf.link(v[0], v[1])) {
                cleared[e] = true;
                add_pair(diagrams[0], 0.0, f.values[1][e], false);
            }
        }
        size_t components = 0;
        for (uint32_t i = 0; i < f.n_points; ++i)
            if (uf.find(i) == i) ++components;
        for (size_t c = 0; c < components; ++c)
            add_pair(diagrams[0], 0.0, f.threshold, true);
        finish_diagram(diagrams[0]);
    }

    std::vector<uint64_t> mask(graph.words);
    // pass d pairs d-simplices with their (d+1)-cofacets, so it needs the
    // filtration to carry dimension d+1
    const int top_pass = std::min(max_hom_dim, f.max_dim - 1);
    for (int d = 1; d <= top_pass; ++d) {
        const size_t n_cols = f.count(d);
        std::unordered_map<SimplexKey, uint32_t> owner; // pivot key -> V arena slot
        owner.reserve(n_cols * 2);
        // reduction recorded as V-columns (indices of columns added, self
        // included); replaying a V-column pushes the coboundary of each
        // entry, which keeps memory far below storing reduced rows
        std::vector<std::vector<uint32_t>> stored_v;
        std::vector<bool> next_cleared(f.count(d + 1), false);
        const auto next_index = index_by_key(f, d + 1);

        uint32_t verts[4];
        std::vector<uint32_t> working_v;
        // latest columns first: in the anti-transposed matrix they come first
        for (size_t jj = n_cols; jj-- > 0;) {
            if (cleared[jj]) continue;
            const double value = f.values[d][jj];
            CofacetHeap heap;
            unpack_simplex(f.keys[d][jj], d, verts);
            push_cofacets(graph, verts, d, value, mask, heap);
            working_v.assign(1, static_cast<uint32_t>(jj));

            HeapEntry pivot;
            bool paired = false;
            while (pop_pivot(heap, pivot)) {
                auto it = owner.find(pivot.second);
                if (it == owner.end()) {
                    owner.emplace(pivot.second, static_cast<uint32_t>(stored_v.size()));
                    // canonicalize: sort and cancel duplicate pairs (Z/2)
                    std::sort(working_v.begin(), working_v.end());
                    std::vector<uint32_t> canonical;
                    canonical.reserve(working_v.size());
                    for (size_t i = 0; i < working_v.size();) {
                        if (i + 1 < working_v.size() && working_v[i] == working_v[i + 1])
                            i += 2;
                        else
                            canonical.push_back(working_v[i++]);
                    }
                    stored_v.push_back(std::move(canonical));
                    paired = true;
                    break;
                }
                heap.push(pivot); // restore; cancels against the added column's copy
                for (uint32_t j2 : stored_v[it->second]) {
                    unpack_simplex(f.keys[d][j2], d, verts);
                    push_cofacets(graph, verts, d, f.values[d][j2], mask, heap);
                    working_v.push_back(j2);
                }
            }
            if (paired) {
                next_cleared[next_index.at(pivot.second)] = true;
                add_pair(diagrams[d], value, pivot.first, false);
            } else {
                add_pair(diagrams[d], value, f.threshold, true);
            }
        }
        cleared = std::move(next_cleared);
        finish_diagram(diagrams[d]);
    }

    // when the filtration lacks dimension d+1 the pass cannot run; every
    // d-simplex is then either a killer already identified by the previous
    // pass (cleared) or a creator alive at the threshold
    if (top_pass < max_hom_dim && top_pass + 1 <= f.max_dim) {
        const int d = top_pass + 1;
        for (size_t j = 0; j < f.count(d); ++j)
            if (!cleared[j]) add_pair(diagrams[d], f.values[d][j], f.threshold, true);
        finish_diagram(diagrams[d]);
    }

    return diagrams;
}

DiagramSet compute_pd(const PointCloud& pc, int max_hom_dim, const ComputeOptions& options) {
    if (max_hom_dim < 1 || max_hom_dim > 2)
        throw Error("bad_argument", "compute_pd supports max_hom_dim 1 or 2");
    if (pc.size() < 2) throw Error("bad_argument", "compute_pd needs at least 2 points");
    const DistanceMatrix d = distance_matrix(pc);
    FiltrationOptions fopts;
    fopts.threshold = options.threshold;
    fopts.simplex_cap = options.simplex_cap;
    const Filtration f = build_filtration(d, max_hom_dim + 1, fopts);
    auto diagrams = reduce_fast(f, max_hom_dim);
    DiagramSet out;
    out.h1 = std::move(diagrams[1]);
    out.h1.source_id = pc.id;
    out.h2.dim = 2;
    out.h2.source_id = pc.id;
    if (max_hom_dim >= 2) {
        out.h2.pairs = std::move(diagrams[2].pairs);
    }
    return out;
}

// -------------------------------------------------------------------------
// diagram CSV
// -------------------------------------------------------------------------

void write_diagram_csv(const PersistenceDiagram& pd, std::ostream& out) {
    out << "dim,birth,death\n";
    char buf[96];
    for (const auto& p : pd.pairs) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", p.dim, p.birth, p.death);
        out << buf;
    }
}

void save_diagram_csv(const PersistenceDiagram& pd, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write '" + path + "'");
    write_diagram_csv(pd, out);
}

PersistenceDiagram read_diagram_csv(std::istream& in, const std::string& source_id) {
    PersistenceDiagram pd;
    pd.dim = -1;
    pd.source_id = source_id;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("dim", 0) == 0) continue;
        PersistencePair p;
        int dim = 0;
        const char* s = line.c_str();
        const char* end = s + line.size();
        auto r1 = std::from_chars(s, end, dim);
        if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != ',')
            throw Error("parse", "diagram csv line " + std::to_string(line_no));
        auto r2 = std::from_chars(r1.ptr + 1, end, p.birth);
        if (r2.ec != std::errc() || r2.ptr == end || *r2.ptr != ',')
            throw Error("parse", "diagram csv line " + std::to_string(line_no));
        auto r3 = std::from_chars(r2.ptr + 1, end, p.death);
        if (r3.ec != std::errc())
            throw Error("parse", "diagram csv line " + std::to_string(line_no));
        p.dim = dim;
        if (pd.dim == -1) pd.dim = dim;
        else if (pd.dim != dim)
            throw Error("parse", "mixed homology dimensions in diagram csv");
        pd.pairs.push_back(p);
    }
    if (pd.dim == -1) pd.dim = 0;
    return pd;
}

PersistenceDiagram load_diagram_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open '" + path + "'");
    return read_diagram_csv(in, path);
}

} // namespace persistome
