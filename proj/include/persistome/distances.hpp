#pragma once

#include <vector>

#include "persistome/persistence.hpp"

namespace persistome {

enum class InnerNorm { linf, l2 };

/// One matched pair: indices into the two diagrams, -1 for the diagonal.
struct MatchEdge {
    int a = -1;
    int b = -1;
};

/// A full matching: every off-diagonal point of both diagrams appears
/// exactly once (against a point of the other diagram or the diagonal).
struct Matching {
    std::vector<MatchEdge> edges;
    double cost = 0.0;
};

/// Bottleneck distance W-infinity: min over matchings of the max matched
/// L-infinity cost, where a point may match the diagonal at cost (d-b)/2.
/// Exact: binary search over the finite candidate set (all pairwise costs
/// and diagonal costs) with bipartite-matching feasibility tests.
double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b,
                  Matching* matching = nullptr);

/// Wasserstein distance of order q >= 1 on the augmented bipartite problem
/// (each diagram extended with the other's diagonal projections), solved
/// exactly by a shortest-augmenting-path assignment. The inner norm sets
/// both the point-to-point cost and the diagonal projection cost
/// ((d-b)/2 for L-infinity, (d-b)/sqrt(2) for L2).
double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b,
                   double q = 1.0, InnerNorm norm = InnerNorm::linf,
                   Matching* matching = nullptr);

/// Exhaustive-enumeration oracles, identical contracts to the fast
/// versions; combined diagram size must be <= 8.
double bottleneck_naive(const PersistenceDiagram& a, const PersistenceDiagram& b);
double wasserstein_naive(const PersistenceDiagram& a, const PersistenceDiagram& b,
                         double q = 1.0, InnerNorm norm = InnerNorm::linf);

} // namespace persistome
