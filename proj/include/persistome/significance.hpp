#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "persistome/diagram.hpp"
#include "persistome/geometry.hpp"

namespace persistome {

/// Soft-selection parameters: lambda thresholds persistence, eta sets the
/// sharpness of the sigmoid gate (eta > 0).
struct SelectionParams {
    double lambda = 0.0;
    double eta = 1.0;
};

/// Loss-term weights as softmax of three free logits, so the effective
/// (alpha, beta, gamma) always sum to 1 and stay in (0,1). Defaults give
/// equal thirds.
struct TopoLossWeights {
    std::array<double, 3> logits{0.0, 0.0, 0.0};
    std::array<double, 3> weights() const;
};

struct LossBreakdown {
    double wd = 0.0;        ///< Wasserstein(original, soft-reduced), q=1, L-inf
    double pe = 0.0;        ///< persistent entropy of the soft-reduced diagram
    double reduction = 0.0; ///< (sum of mask) / diagram size
    double total = 0.0;     ///< alpha*wd + beta*pe + gamma*reduction
};

/// mask_i = sigmoid(eta * (p_i - lambda)) over per-pair persistence.
std::vector<double> soft_mask(const PersistenceDiagram& pd, const SelectionParams& params);

/// pair_i -> (mask_i * b_i, mask_i * d_i). Masked-out points collapse
/// toward the origin, i.e. onto the diagonal; zero-persistence output
/// points are kept (they carry the collapse, unlike reduction output).
PersistenceDiagram reduce_soft(const PersistenceDiagram& pd, const std::vector<double>& mask);

LossBreakdown topo_loss(const PersistenceDiagram& pd, const SelectionParams& params,
                        const TopoLossWeights& weights);

/// Analytic gradient (d/d lambda, d/d eta) of topo_loss with the
/// Wasserstein matching held fixed (envelope approximation). Agrees with
/// central finite differences away from matching-switch points.
std::array<double, 2> topo_loss_grad(const PersistenceDiagram& pd,
                                     const SelectionParams& params,
                                     const TopoLossWeights& weights);

struct OptimConfig {
    int steps = 60;              ///< gradient iterations per restart (>= 1)
    double learning_rate = 0.25; ///< initial step size, adapted by backtracking
    int restarts = 4;            ///< random re-initializations
    uint64_t seed = 0;
    double init_lambda = -1.0;   ///< < 0 means auto (mid-range, then random)
    double init_eta = -1.0;      ///< <= 0 means auto
    bool analytic_gradient = false; ///< default is central finite differences
};

struct SelectionResult {
    SelectionParams params;
    std::vector<double> mask;
    PersistenceDiagram reduced;       ///< soft reduction at the optimum
    PersistenceDiagram hard_selected; ///< pairs with persistence > lambda
    LossBreakdown loss;
};

/// Fit (lambda, eta) per diagram by minimizing topo_loss with projected
/// gradient descent (eta in log space, bounds [1e-2, 1e6]); best result
/// over `restarts` deterministic re-initializations. The returned loss
/// never exceeds the loss at initialization.
SelectionResult optimize_selection(const PersistenceDiagram& pd,
                                   const TopoLossWeights& weights,
                                   const OptimConfig& config);

/// Subsampling band: draw subsamples, measure hausdorff(subsample, cloud),
/// take delta = 2 * empirical (1-alpha) quantile. subsample_size 0 means
/// auto = ceil(n / ln n). Requires n_subsamples >= 30, subsample_size < n.
SignificanceBand method1_subsampling(const PointCloud& pc, size_t n_subsamples,
                                     size_t subsample_size, double alpha, uint64_t seed);

/// Concentration-of-measure band: lower-bounds the sampling density from
/// k-NN distances (k = ceil(ln n)), then solves
///   (2^3 / (a t^3)) * exp(-n a t^3) = alpha
/// for t by bisection; delta = 2t. One delta per cloud, applied to both
/// H1 and H2 diagrams. Requires n >= 10.
SignificanceBand method2_concentration(const PointCloud& pc, double alpha);

/// Method of shells: stratifies the cloud into equal-count shells by
/// distance from the centroid, lower-bounds the density per shell, and
/// solves the measure-weighted sum of shell bounds for t; delta = 2t.
/// With one shell this reduces exactly to method2. Requires n >= 10,
/// n_shells >= 1 (shell count is clamped to n with a warning).
SignificanceBand method3_shells(const PointCloud& pc, double alpha, size_t n_shells = 5);

} // namespace persistome
