#include "persistome/rips.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>

namespace persistome {

double enclosing_radius(const DistanceMatrix& d) {
    if (d.n == 0) throw Error("bad_argument", "empty distance matrix");
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < d.n; ++i) {
        double row_max = 0.0;
        for (size_t j = 0; j < d.n; ++j) row_max = std::max(row_max, d(i, j));
        best = std::min(best, row_max);
    }
    return best;
}

size_t default_simplex_cap() {
    if (const char* env = std::getenv("PERSISTOME_SIMPLEX_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<size_t>(v);
    }
    return 50'000'000;
}

namespace {

// fixed-size bitset adjacency rows
struct AdjacencyBits {
    size_t n = 0;
    size_t words = 0;
    std::vector<uint64_t> bits;

    AdjacencyBits(size_t n_) : n(n_), words((n_ + 63) / 64), bits(n_ * words, 0) {}
    void set(size_t i, size_t j) { bits[i * words + j / 64] |= uint64_t(1) << (j % 64); }
    const uint64_t* row(size_t i) const { return bits.data() + i * words; }
};

struct DimSorter {
    std::vector<double>& values;
    std::vector<SimplexKey>& keys;

    void sort() {
        const size_t m = values.size();
        std::vector<uint32_t> order(m);
        for (uint32_t i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            if (values[a] != values[b]) return values[a] < values[b];
            return keys[a] < keys[b];
        });
        std::vector<double> v2(m);
        std::vector<SimplexKey> k2(m);
        for (size_t i = 0; i < m; ++i) {
            v2[i] = values[order[i]];
            k2[i] = keys[order[i]];
        }
        values.swap(v2);
        keys.swap(k2);
    }
};

} // namespace

Filtration build_filtration(const DistanceMatrix& d, int max_dim,
                            const FiltrationOptions& options) {
    if (max_dim < 1 || max_dim > 3)
        throw Error("bad_argument", "max_dim must be in 1..3");
    const size_t n = d.n;
    if (n == 0) throw Error("bad_argument", "empty distance matrix");
    if (n >= 65536) throw Error("bad_argument", "cloud too large for packed simplex keys");

    Filtration f;
    f.n_points = n;
    f.max_dim = max_dim;
    f.threshold = options.threshold < 0.0 ? enclosing_radius(d) : options.threshold;
    const size_t cap = options.simplex_cap ? options.simplex_cap : default_simplex_cap();
    const double threshold = f.threshold;

    size_t total = n;
    if (total > cap)
        throw Error("simplex_cap", "simplex cap exceeded at dimension 0");

    // vertices
    f.values[0].assign(n, 0.0);
    f.keys[0].resize(n);
    for (size_t i = 0; i < n; ++i) {
        const uint32_t v = static_cast<uint32_t>(i);
        f.keys[0][i] = pack_simplex(&v, 0);
    }

    // edges + adjacency
    AdjacencyBits adj(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const double dist = d(i, j);
            if (dist <= threshold) {
                if (++total > cap)
                    throw Error("simplex_cap", "simplex cap exceeded at dimension 1");
                uint32_t v[2] = {static_cast<uint32_t>(i), static_cast<uint32_t>(j)};
                f.values[1].push_back(dist);
                f.keys[1].push_back(pack_simplex(v, 1));
                adj.set(i, j);
                adj.set(j, i);
            }
        }
    }

    // higher cliques by neighbor-intersection expansion; candidate vertices
    // are restricted to indices above the current max vertex so each clique
    // is produced exactly once in ascending vertex order
    const size_t words = adj.words;
    std::vector<uint64_t> mask(words);
    if (max_dim >= 2) {
        for (size_t e = 0; e < f.keys[1].size(); ++e) {
            uint32_t v[4];
            unpack_simplex(f.keys[1][e], 1, v);
            const double base = f.values[1][e];
            const uint64_t* r0 = adj.row(v[0]);
            const uint64_t* r1 = adj.row(v[1]);
            for (size_t w = 0; w < words; ++w) mask[w] = r0[w] & r1[w];
            // zero out bits <= v[1]
            const size_t cut = v[1];
            for (size_t w = 0; w <= cut / 64 && w < words; ++w) {
                if (w < cut / 64) mask[w] = 0;
                else mask[w] &= ~((uint64_t(2) << (cut % 64)) - 1);
            }
            for (size_t w = 0; w < words; ++w) {
                uint64_t bitsw = mask[w];
                while (bitsw) {
                    const uint32_t k = static_cast<uint32_t>(w * 64 + std::countr_zero(bitsw));
                    bitsw &= bitsw - 1;
                    const double val =
                        std::max(base, std::max(d(v[0], k), d(v[1], k)));
                    if (++total > cap)
                        throw Error("simplex_cap", "simplex cap exceeded at dimension 2");
                    uint32_t t[3] = {v[0], v[1], k};
                    f.values[2].push_back(val);
                    f.keys[2].push_back(pack_simplex(t, 2));
                }
            }
        }
    }
    if (max_dim >= 3) {
        for (size_t ti = 0; ti < f.keys[2].size(); ++ti) {
            uint32_t v[4];
            unpack_simplex(f.keys[2][ti], 2, v);
            const double base = f.values[2][ti];
            const uint64_t* r0 = adj.row(v[0]);
            const uint64_t* r1 = adj.row(v[1]);
            const uint64_t* r2 = adj.row(v[2]);
            for (size_t w = 0; w < words; ++w) mask[w] = r0[w] & r1[w] & r2[w];
            const size_t cut = v[2];
            for (size_t w = 0; w <= cut / 64 && w < words; ++w) {
                if (w < cut / 64) mask[w] = 0;
                else mask[w] &= ~((uint64_t(2) << (cut % 64)) - 1);
            }
            for (size_t w = 0; w < words; ++w) {
                uint64_t bitsw = mask[w];
                while (bitsw) {
                    const uint32_t k = static_cast<uint32_t>(w * 64 + std::countr_zero(bitsw));
                    bitsw &= bitsw - 1;
                    const double val = std::max(
                        base, std::max(d(v[0], k), std::max(d(v[1], k), d(v[2], k))));
                    if (++total > cap)
                        throw Error("simplex_cap", "simplex cap exceeded at dimension 3");
                    uint32_t t[4] = {v[0], v[1], v[2], k};
                    f.values[3].push_back(val);
                    f.keys[3].push_back(pack_simplex(t, 3));
                }
            }
        }
    }

    for (int dim = 1; dim <= max_dim; ++dim) {
        DimSorter sorter{f.values[dim], f.keys[dim]};
        sorter.sort();
    }
    return f;
}

void dump_filtration(const Filtration& f, std::ostream& out) {
    // merge the per-dimension streams by (value, dim, vertices)
    std::array<size_t, 4> pos{0, 0, 0, 0};
    char buf[160];
    for (;;) {
        int best_dim = -1;
        for (int dim = 0; dim <= f.max_dim; ++dim) {
            if (pos[dim] >= f.count(dim)) continue;
            if (best_dim < 0) {
                best_dim = dim;
                continue;
            }
            const double bv = f.values[best_dim][pos[best_dim]];
            const double dv = f.values[dim][pos[dim]];
            if (dv < bv) best_dim = dim;
            // equal values: lower dim first, which the scan order already gives
        }
        if (best_dim < 0) break;
        Simplex s = f.simplex(best_dim, pos[best_dim]);
        ++pos[best_dim];
        int len = std::snprintf(buf, sizeof(buf), "%.17g %d", s.value, s.dim);
        for (int i = 0; i <= s.dim; ++i)
            len += std::snprintf(buf + len, sizeof(buf) - len, " %u", s.vertices[i]);
        buf[len++] = '\n';
        out.write(buf, len);
    }
}

} // namespace persistome
