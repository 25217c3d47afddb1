#include "persistome/significance.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "persistome/distances.hpp"
#include "persistome/rng.hpp"

namespace persistome {

std::array<double, 3> TopoLossWeights::weights() const {
    const double m = std::max({logits[0], logits[1], logits[2]});
    std::array<double, 3> w;
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        w[i] = std::exp(logits[i] - m);
        sum += w[i];
    }
    for (auto& x : w) x /= sum;
    return w;
}

namespace {

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace

std::vector<double> soft_mask(const PersistenceDiagram& pd, const SelectionParams& params) {
    if (params.eta <= 0.0) throw Error("bad_argument", "eta must be > 0");
    std::vector<double> mask;
    mask.reserve(pd.size());
    for (const auto& p : pd.pairs)
        mask.push_back(sigmoid(params.eta * (p.persistence() - params.lambda)));
    return mask;
}

PersistenceDiagram reduce_soft(const PersistenceDiagram& pd, const std::vector<double>& mask) {
    if (mask.size() != pd.size())
        throw Error("bad_argument", "mask length does not match diagram size");
    PersistenceDiagram out;
    out.dim = pd.dim;
    out.source_id = pd.source_id;
    out.pairs.reserve(pd.size());
    for (size_t i = 0; i < pd.size(); ++i) {
        const auto& p = pd.pairs[i];
        out.pairs.push_back({mask[i] * p.birth, mask[i] * p.death, p.dim, false});
    }
    return out;
}

LossBreakdown topo_loss(const PersistenceDiagram& pd, const SelectionParams& params,
                        const TopoLossWeights& weights) {
    LossBreakdown out;
    if (pd.empty()) return out;
    const auto mask = soft_mask(pd, params);
    const PersistenceDiagram reduced = reduce_soft(pd, mask);
    out.wd = wasserstein(pd, reduced, 1.0, InnerNorm::linf);
    out.pe = persistent_entropy(reduced);
    out.reduction = std::accumulate(mask.begin(), mask.end(), 0.0) /
                    static_cast<double>(pd.size());
    const auto w = weights.weights();
    out.total = w[0] * out.wd + w[1] * out.pe + w[2] * out.reduction;
    return out;
}

std::array<double, 2> topo_loss_grad(const PersistenceDiagram& pd,
                                     const SelectionParams& params,
                                     const TopoLossWeights& weights) {
    if (pd.empty()) return {0.0, 0.0};
    const size_t n = pd.size();
    const auto mask = soft_mask(pd, params);
    const PersistenceDiagram reduced = reduce_soft(pd, mask);

    // dmask_i/dlambda = -eta s(1-s); dmask_i/deta = (p_i - lambda) s(1-s)
    std::vector<double> dm_dlambda(n), dm_deta(n);
    for (size_t i = 0; i < n; ++i) {
        const double s = mask[i];
        const double bell = s * (1.0 - s);
        dm_dlambda[i] = -params.eta * bell;
        dm_deta[i] = (pd.pairs[i].persistence() - params.lambda) * bell;
    }

    // Wasserstein term under a frozen optimal matching
    Matching matching;
    wasserstein(pd, reduced, 1.0, InnerNorm::linf, &matching);
    std::vector<double> dwd_dmask(n, 0.0);
    for (const auto& e : matching.edges) {
        if (e.b < 0) continue; // original point to diagonal: constant cost
        const auto& r = pd.pairs[e.b]; // reduced point j is mask[j] * original j
        const double mj = mask[e.b];
        if (e.a < 0) {
            // reduced point to diagonal at cost m_j p_j / 2
            dwd_dmask[e.b] += r.persistence() / 2.0;
        } else {
            const auto& o = pd.pairs[e.a];
            const double db = mj * r.birth - o.birth;
            const double dd = mj * r.death - o.death;
            if (std::abs(db) >= std::abs(dd))
                dwd_dmask[e.b] += (db >= 0.0 ? 1.0 : -1.0) * r.birth;
            else
                dwd_dmask[e.b] += (dd >= 0.0 ? 1.0 : -1.0) * r.death;
        }
    }

    // entropy term: E = ln L - S/L with L = sum l_i, S = sum l_i ln l_i
    double L = 0.0, S = 0.0;
    std::vector<double> lifetimes(n);
    for (size_t i = 0; i < n; ++i) {
        lifetimes[i] = mask[i] * pd.pairs[i].persistence();
        L += lifetimes[i];
        if (lifetimes[i] > 0.0) S += lifetimes[i] * std::log(lifetimes[i]);
    }

    std::array<double, 2> grad{0.0, 0.0};
    const auto w = weights.weights();
    const double* dmask[2] = {dm_dlambda.data(), dm_deta.data()};
    for (int t = 0; t < 2; ++t) {
        double dwd = 0.0, dpe = 0.0, dr = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double dmi = dmask[t][i];
            dwd += dwd_dmask[i] * dmi;
            dr += dmi;
            if (L > 0.0 && lifetimes[i] > 0.0) {
                const double dE_dl = (S / L - std::log(lifetimes[i])) / L;
                dpe += dE_dl * pd.pairs[i].persistence() * dmi;
            }
        }
        dr /= static_cast<double>(n);
        grad[t] = w[0] * dwd + w[1] * dpe + w[2] * dr;
    }
    return grad;
}

namespace {

LossBreakdown eval_loss(const PersistenceDiagram& pd, double lambda, double log_eta,
                        const TopoLossWeights& weights) {
    return topo_loss(pd, {lambda, std::exp(log_eta)}, weights);
}

} // namespace

SelectionResult optimize_selection(const PersistenceDiagram& pd,
                                   const TopoLossWeights& weights,
                                   const OptimConfig& config) {
    if (pd.empty()) throw Error("bad_argument", "optimize_selection on empty diagram");
    if (config.steps < 1) throw Error("bad_argument", "steps must be >= 1");
    if (config.restarts < 1) throw Error("bad_argument", "restarts must be >= 1");

    double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
    for (const auto& p : pd.pairs) {
        pmax = std::max(pmax, p.persistence());
        pmin = std::min(pmin, p.persistence());
    }
    const double scale = std::max(pmax, 1e-12);

    const double log_eta_lo = std::log(1e-2);
    const double log_eta_hi = std::log(1e6);
    const double lambda_hi = pmax * 1.5 + 1e-12;
    auto clamp_point = [&](double& lambda, double& log_eta) {
        lambda = std::clamp(lambda, 0.0, lambda_hi);
        log_eta = std::clamp(log_eta, log_eta_lo, log_eta_hi);
    };

    Rng rng(config.seed);
    double best_loss = std::numeric_limits<double>::infinity();
    double best_lambda = 0.0, best_log_eta = std::log(20.0 / scale);

    for (int r = 0; r < config.restarts; ++r) {
        double lambda, log_eta;
        if (r == 0) {
            lambda = config.init_lambda >= 0.0 ? config.init_lambda
                                               : 0.5 * (pmin + pmax);
            log_eta = config.init_eta > 0.0 ? std::log(config.init_eta)
                                            : std::log(20.0 / scale);
        } else {
            lambda = rng.uniform(0.0, pmax);
            log_eta = std::log(20.0 / scale) + rng.uniform(-1.0, 2.5);
        }
        clamp_point(lambda, log_eta);

        LossBreakdown cur = eval_loss(pd, lambda, log_eta, weights);
        if (!std::isfinite(cur.total)) continue;
        if (cur.total < best_loss) {
            best_loss = cur.total;
            best_lambda = lambda;
            best_log_eta = log_eta;
        }

        double lr = config.learning_rate;
        const double h_lambda = 1e-4 * scale;
        const double h_eta = 1e-4;
        bool aborted = false;
        for (int step = 0; step < config.steps && !aborted; ++step) {
            double g_lambda, g_eta;
            if (config.analytic_gradient) {
                const double eta = std::exp(log_eta);
                const auto g = topo_loss_grad(pd, {lambda, eta}, weights);
                g_lambda = g[0];
                g_eta = g[1] * eta; // chain rule into log space
            } else {
                auto at = [&](double dl, double de) {
                    double l2 = lambda + dl, e2 = log_eta + de;
                    clamp_point(l2, e2);
                    return eval_loss(pd, l2, e2, weights).total;
                };
                g_lambda = (at(h_lambda, 0) - at(-h_lambda, 0)) / (2.0 * h_lambda);
                g_eta = (at(0, h_eta) - at(0, -h_eta)) / (2.0 * h_eta);
            }
            if (!std::isfinite(g_lambda) || !std::isfinite(g_eta)) break;
            // normalize lambda-step to the persistence scale
            double step_lambda = -lr * scale * g_lambda;
            double step_eta = -lr * g_eta;
            const double norm = std::hypot(step_lambda / scale, step_eta);
            if (norm > 0.5) { // trust region: half the scale per move
                step_lambda *= 0.5 / norm;
                step_eta *= 0.5 / norm;
            }
            double l2 = lambda + step_lambda;
            double e2 = log_eta + step_eta;
            clamp_point(l2, e2);
            const LossBreakdown next = eval_loss(pd, l2, e2, weights);
            if (!std::isfinite(next.total)) {
                aborted = true; // keep best finite seen so far
                break;
            }
            if (next.total <= cur.total) {
                lambda = l2;
                log_eta = e2;
                cur = next;
                lr = std::min(lr * 1.2, 4.0);
                if (cur.total < best_loss) {
                    best_loss = cur.total;
                    best_lambda = lambda;
                    best_log_eta = log_eta;
                }
            } else {
                lr *= 0.5;
                if (lr < 1e-6) break;
            }
        }
    }

    if (!std::isfinite(best_loss))
        throw Error("non_finite", "optimize_selection found no finite loss");

    SelectionResult out;
    out.params = {best_lambda, std::exp(best_log_eta)};
    out.mask = soft_mask(pd, out.params);
    out.reduced = reduce_soft(pd, out.mask);
    out.loss = topo_loss(pd, out.params, weights);
    out.hard_selected.dim = pd.dim;
    out.hard_selected.source_id = pd.source_id;
    for (const auto& p : pd.pairs)
        if (p.persistence() > best_lambda) out.hard_selected.pairs.push_back(p);
    return out;
}

// ------------------------------------------------------------------
// statistical bands
// ------------------------------------------------------------------

SignificanceBand method1_subsampling(const PointCloud& pc, size_t n_subsamples,
                                     size_t subsample_size, double alpha, uint64_t seed) {
    pc.validate();
    const size_t n = pc.size();
    if (n_subsamples < 30)
        throw Error("bad_argument", "method1 needs at least 30 subsamples");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw Error("bad_argument", "alpha must be in (0,1)");
    if (subsample_size == 0)
        subsample_size = static_cast<size_t>(
            std::ceil(static_cast<double>(n) / std::log(static_cast<double>(n))));
    if (subsample_size >= n)
        throw Error("bad_argument", "subsample size must be < n");

    std::vector<double> stats(n_subsamples);
    for (size_t j = 0; j < n_subsamples; ++j) {
        const PointCloud sub = random_sample(pc, subsample_size, derive_seed(seed, j));
        stats[j] = hausdorff(sub, pc);
    }
    std::sort(stats.begin(), stats.end());
    // (1-alpha) empirical quantile as the ceil((1-alpha) J)-th order statistic
    size_t k = static_cast<size_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(n_subsamples)));
    k = std::clamp<size_t>(k, 1, n_subsamples);
    return {2.0 * stats[k - 1], BandMethod::method1, alpha};
}

namespace {

constexpr double kBallVolume3 = 4.0 * 3.141592653589793238462643383279502884 / 3.0;

// k-NN density lower-bound estimates per point: p_i = k / (n V3 r_k^3)
std::vector<double> knn_density(const PointCloud& pc) {
    const size_t n = pc.size();
    const size_t k = static_cast<size_t>(std::ceil(std::log(static_cast<double>(n))));
    std::vector<double> density(n);
    std::vector<double> row(n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) row[j] = distance(pc.points[i], pc.points[j]);
        std::nth_element(row.begin(), row.begin() + k, row.end()); // row[0] is self (0)
        const double rk = row[k];
        density[i] = rk > 0.0
                         ? static_cast<double>(k) /
                               (static_cast<double>(n) * kBallVolume3 * rk * rk * rk)
                         : std::numeric_limits<double>::infinity();
    }
    return density;
}

// solve sum_s w_s (8/(a_s t^3)) exp(-n a_s t^3) = alpha for t (decreasing LHS)
double solve_shell_bound(const std::vector<double>& weights_,
                         const std::vector<double>& density_floor, size_t n,
                         double alpha) {
    auto bound = [&](double t) {
        const double t3 = t * t * t;
        double total = 0.0;
        for (size_t s = 0; s < weights_.size(); ++s) {
            const double a = density_floor[s];
            if (!std::isfinite(a)) continue; // infinitely dense shell never misses
            total += weights_[s] * (8.0 / (a * t3)) *
                     std::exp(-static_cast<double>(n) * a * t3);
        }
        return total;
    };
    double hi = 1.0;
    int guard = 0;
    while (bound(hi) > alpha) {
        hi *= 2.0;
        if (++guard > 200)
            throw Error("no_convergence", "concentration bound bisection failed (hi)");
    }
    double lo = hi;
    guard = 0;
    while (bound(lo) < alpha) {
        lo *= 0.5;
        if (++guard > 400) break; // bound(t) -> inf as t -> 0 unless degenerate
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (bound(mid) > alpha) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

SignificanceBand method2_concentration(const PointCloud& pc, double alpha) {
    pc.validate();
    if (pc.size() < 10) throw Error("bad_argument", "method2 needs n >= 10");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw Error("bad_argument", "alpha must be in (0,1)");
    const auto density = knn_density(pc);
    double floor = std::numeric_limits<double>::infinity();
    for (double d : density) floor = std::min(floor, d);
    if (!std::isfinite(floor)) return {0.0, BandMethod::method2, alpha}; // degenerate cloud
    const double t = solve_shell_bound({1.0}, {floor}, pc.size(), alpha);
    return {2.0 * t, BandMethod::method2, alpha};
}

SignificanceBand method3_shells(const PointCloud& pc, double alpha, size_t n_shells) {
    pc.validate();
    const size_t n = pc.size();
    if (n < 10) throw Error("bad_argument", "method3 needs n >= 10");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw Error("bad_argument", "alpha must be in (0,1)");
    if (n_shells < 1) throw Error("bad_argument", "n_shells must be >= 1");
    if (n_shells > n) {
        std::cerr << "warning: n_shells clamped from " << n_shells << " to " << n
                  << " (merging empty shells)\n";
        n_shells = n;
    }

    Vec3 centroid{0, 0, 0};
    for (const auto& p : pc.points) centroid = centroid + p;
    centroid = centroid * (1.0 / static_cast<double>(n));

    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::vector<double> radial(n);
    for (size_t i = 0; i < n; ++i) radial[i] = distance(pc.points[i], centroid);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        if (radial[a] != radial[b]) return radial[a] < radial[b];
        return a < b;
    });

    const auto density = knn_density(pc);
    std::vector<double> weights_, floors;
    size_t start = 0;
    for (size_t s = 0; s < n_shells; ++s) {
        const size_t end = (s + 1) * n / n_shells;
        if (end <= start) continue; // merged into the next shell
        double floor = std::numeric_limits<double>::infinity();
        for (size_t i = start; i < end; ++i) floor = std::min(floor, density[order[i]]);
        weights_.push_back(static_cast<double>(end - start) / static_cast<double>(n));
        floors.push_back(floor);
        start = end;
    }
    bool any_finite = false;
    for (double f : floors) any_finite |= std::isfinite(f);
    if (!any_finite) return {0.0, BandMethod::method3, alpha};
    const double t = solve_shell_bound(weights_, floors, n, alpha);
    return {2.0 * t, BandMethod::method3, alpha};
}

} // namespace persistome
