#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "persistome/rips.hpp"

namespace persistome {

/// One birth-death pair of a k-dimensional homology class. `truncated`
/// marks classes still alive at the filtration threshold, which are
/// reported with death = threshold. Under the default threshold policy
/// (enclosing radius) no H1/H2 class is truncated.
struct PersistencePair {
    double birth = 0.0;
    double death = 0.0;
    int dim = 0;
    bool truncated = false;

    double persistence() const { return death - birth; }
};

/// Multiset of persistence pairs of a single homology dimension.
/// Zero-persistence pairs are dropped at construction; Rips ties produce
/// many of them and they carry no information.
struct PersistenceDiagram {
    int dim = 0;
    std::vector<PersistencePair> pairs;
    std::string source_id;

    size_t size() const { return pairs.size(); }
    bool empty() const { return pairs.empty(); }
};

/// Textbook boundary-matrix column reduction over Z/2, one block per
/// dimension. Serves as the correctness oracle for reduce_fast. Returns
/// diagrams for dimensions 0..max_hom_dim.
std::vector<PersistenceDiagram> reduce_standard(const Filtration& f, int max_hom_dim);

/// Optimized engine: reduces the anti-transposed (coboundary) matrix with
/// the clearing optimization, processing dimensions upward so that columns
/// known to be paired from the previous pass are skipped, and generates
/// cofacet rows implicitly from the filtration's threshold graph instead of
/// materializing top-dimension boundary columns. Produces diagrams
/// identical (as multisets) to reduce_standard on the same filtration.
std::vector<PersistenceDiagram> reduce_fast(const Filtration& f, int max_hom_dim);

struct ComputeOptions {
    double threshold = -1.0; ///< < 0 means auto = enclosing radius
    size_t simplex_cap = 0;  ///< 0 means default_simplex_cap()
};

struct DiagramSet {
    PersistenceDiagram h1;
    PersistenceDiagram h2; ///< empty with dim=2 when max_hom_dim == 1
};

/// distance_matrix -> build_filtration(max_dim = max_hom_dim + 1) ->
/// reduce_fast. max_hom_dim must be 1 or 2; the cloud needs n >= 2.
DiagramSet compute_pd(const PointCloud& pc, int max_hom_dim = 2,
                      const ComputeOptions& options = {});

/// Diagram CSV: header "dim,birth,death", one pair per row, full
/// 17-significant-digit floats.
void write_diagram_csv(const PersistenceDiagram& pd, std::ostream& out);
void save_diagram_csv(const PersistenceDiagram& pd, const std::string& path);
PersistenceDiagram read_diagram_csv(std::istream& in, const std::string& source_id = "");
PersistenceDiagram load_diagram_csv(const std::string& path);

} // namespace persistome
