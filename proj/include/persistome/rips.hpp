#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "persistome/geometry.hpp"

namespace persistome {

/// Vertex tuple packed into 16-bit fields, highest field first, so that
/// numeric order on keys of equal dimension is lexicographic vertex order.
/// Limits clouds to < 65536 points, which is far beyond this pipeline's
/// intended scale.
using SimplexKey = uint64_t;

inline SimplexKey pack_simplex(const uint32_t* v, int dim) {
    SimplexKey key = 0;
    for (int i = 0; i <= dim; ++i) key |= SimplexKey(v[i]) << (48 - 16 * i);
    return key;
}

inline void unpack_simplex(SimplexKey key, int dim, uint32_t* v) {
    for (int i = 0; i <= dim; ++i) v[i] = uint32_t((key >> (48 - 16 * i)) & 0xffff);
}

/// One simplex of the filtration: strictly increasing vertex indices,
/// dimension 0..3, filtration value = max pairwise distance (0 for vertices).
struct Simplex {
    std::array<uint32_t, 4> vertices{}; ///< entries beyond dim are unused
    int dim = 0;
    double value = 0.0;
};

/// Vietoris-Rips filtration of a distance matrix: all cliques of the
/// threshold graph up to max_dim, with diameter filtration values.
///
/// Simplices are stored per dimension, each dimension sorted by
/// (value asc, lexicographic vertices asc); the global filtration order is
/// the merge by (value asc, dim asc, lexicographic vertices asc). With that
/// order every face precedes its cofaces.
struct Filtration {
    size_t n_points = 0;
    double threshold = 0.0;
    int max_dim = 0;
    std::array<std::vector<double>, 4> values;   ///< per dim: filtration values
    std::array<std::vector<SimplexKey>, 4> keys; ///< per dim: packed vertices

    size_t count(int dim) const { return values[dim].size(); }
    size_t size() const {
        size_t t = 0;
        for (const auto& v : values) t += v.size();
        return t;
    }
    Simplex simplex(int dim, size_t i) const {
        Simplex s;
        s.dim = dim;
        s.value = values[dim][i];
        unpack_simplex(keys[dim][i], dim, s.vertices.data());
        return s;
    }
};

/// min over points of the max distance to any other point. Beyond this
/// scale the Rips complex is a cone over that point, hence contractible:
/// no H1/H2 feature survives, which is why it is the default threshold.
double enclosing_radius(const DistanceMatrix& d);

/// Simplex-count guard, overridable via env PERSISTOME_SIMPLEX_CAP.
size_t default_simplex_cap();

struct FiltrationOptions {
    double threshold = -1.0; ///< < 0 means auto = enclosing_radius
    size_t simplex_cap = 0;  ///< 0 means default_simplex_cap()
};

/// Enumerate all cliques of the threshold graph up to dimension max_dim
/// (1..3) by neighbor-intersection expansion. Deterministic; throws
/// Error("simplex_cap") naming the offending dimension when the total
/// simplex count would exceed the cap.
Filtration build_filtration(const DistanceMatrix& d, int max_dim,
                            const FiltrationOptions& options = {});

/// Debug dump: one line per simplex, "value dim v0 v1 ...", in global
/// filtration order.
void dump_filtration(const Filtration& f, std::ostream& out);

} // namespace persistome
