#pragma once

#include <vector>

#include "persistome/persistence.hpp"

namespace persistome {

/// Shannon entropy (natural log) of the normalized-lifetime distribution:
/// with lifetimes l_i = d_i - b_i and L their sum, E = -sum (l_i/L) ln(l_i/L).
/// Empty diagram or L = 0 gives 0. Zero lifetimes contribute nothing.
double persistent_entropy(const PersistenceDiagram& pd);

/// |E(a) - E(b)|.
double entropy_difference(const PersistenceDiagram& a, const PersistenceDiagram& b);

enum class BandMethod { manual, method1, method2, method3 };

/// Diagonal band of width delta: features with persistence strictly greater
/// than delta are significant, the rest are topological noise.
struct SignificanceBand {
    double delta = 0.0;
    BandMethod method = BandMethod::manual;
    double alpha = 0.0; ///< confidence level when statistical, else unused
};

/// Order-preserving subset with persistence > band.delta (strict).
PersistenceDiagram delta_band_select(const PersistenceDiagram& pd,
                                     const SignificanceBand& band);

/// The k pairs of largest persistence; ties broken by (birth asc, death asc).
/// k >= size returns the whole diagram.
PersistenceDiagram topk_select(const PersistenceDiagram& pd, size_t k);

struct PaddedDiagram {
    PersistenceDiagram diagram;  ///< base pairs plus pad copies appended
    size_t original_size = 0;
    size_t target_size = 0;
    size_t pad_count = 0;
    bool sentinel = false; ///< empty base padded with (0,0) sentinel pairs
};

/// Append copies of the minimum-persistence pair (ties: smallest birth,
/// then smallest death) until the diagram has `target` pairs. An empty
/// diagram is padded with (0,0) sentinels and flagged.
PaddedDiagram pad_to(const PersistenceDiagram& pd, size_t target);

/// Pad every diagram of one homology dimension to the collection's maximum
/// size. H1 and H2 collections are padded independently by the caller.
std::vector<PaddedDiagram> dataset_pad(const std::vector<PersistenceDiagram>& diagrams);

} // namespace persistome
