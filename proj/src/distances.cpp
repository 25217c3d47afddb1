#include "persistome/distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace persistome {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(const PersistenceDiagram& pd) {
    for (const auto& p : pd.pairs)
        if (!std::isfinite(p.birth) || !std::isfinite(p.death))
            throw Error("non_finite", "diagram contains non-finite values");
}

double point_cost(const PersistencePair& a, const PersistencePair& b, InnerNorm norm) {
    const double db = std::abs(a.birth - b.birth);
    const double dd = std::abs(a.death - b.death);
    return norm == InnerNorm::linf ? std::max(db, dd) : std::hypot(db, dd);
}

double diag_cost(const PersistencePair& p, InnerNorm norm) {
    const double half = p.persistence() / 2.0;
    return norm == InnerNorm::linf ? half : half * std::sqrt(2.0);
}

// ------------------------------------------------------------------
// bottleneck
// ------------------------------------------------------------------

// Hopcroft-Karp over the implicit graph {(a,b): cost[a][b] <= c}.
// `left` lists row indices of `cost` to be covered; returns true when a
// matching covering all of `left` exists. matchL/matchR are resized and
// filled with the matching found (indices into cost rows/cols, -1 free).
class BottleneckFeasibility {
public:
    BottleneckFeasibility(const std::vector<double>& cost, size_t rows, size_t cols)
        : cost_(cost), rows_(rows), cols_(cols) {}

    bool covers(const std::vector<uint32_t>& left, double c,
                std::vector<int>& matchL, std::vector<int>& matchR) const {
        matchL.assign(rows_, -1);
        matchR.assign(cols_, -1);
        size_t matched = 0;
        std::vector<int> dist(rows_);
        std::vector<uint32_t> queue;
        queue.reserve(left.size());
        for (;;) {
            // BFS layers from free left vertices
            queue.clear();
            for (uint32_t a : left) {
                if (matchL[a] < 0) {
                    dist[a] = 0;
                    queue.push_back(a);
                } else {
                    dist[a] = -1;
                }
            }
            bool reachable_free = false;
            for (size_t head = 0; head < queue.size(); ++head) {
                const uint32_t a = queue[head];
                const double* row = cost_.data() + size_t(a) * cols_;
                for (size_t b = 0; b < cols_; ++b) {
                    if (row[b] > c) continue;
                    const int a2 = matchR[b];
                    if (a2 < 0) {
                        reachable_free = true;
                    } else if (dist[a2] < 0) {
                        dist[a2] = dist[a] + 1;
                        queue.push_back(static_cast<uint32_t>(a2));
                    }
                }
            }
            if (!reachable_free) break;
            for (uint32_t a : left)
                if (matchL[a] < 0 && augment(a, c, dist, matchL, matchR)) ++matched;
        }
        return matched == left.size();
    }

private:
    bool augment(uint32_t a, double c, std::vector<int>& dist,
                 std::vector<int>& matchL, std::vector<int>& matchR) const {
        const double* row = cost_.data() + size_t(a) * cols_;
        for (size_t b = 0; b < cols_; ++b) {
            if (row[b] > c) continue;
            const int a2 = matchR[b];
            if (a2 < 0 || (dist[a2] == dist[a] + 1 &&
                           augment(static_cast<uint32_t>(a2), c, dist, matchL, matchR))) {
                matchL[a] = static_cast<int>(b);
                matchR[b] = static_cast<int>(a);
                return true;
            }
        }
        dist[a] = -1;
        return false;
    }

    const std::vector<double>& cost_;
    size_t rows_, cols_;
};

} // namespace

double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b,
                  Matching* matching) {
    check_finite(a);
    check_finite(b);
    const size_t m = a.size(), n = b.size();

    std::vector<double> cost(m * n);
    std::vector<double> diag_a(m), diag_b(n);
    std::vector<double> candidates{0.0};
    candidates.reserve(m * n + m + n + 1);
    for (size_t i = 0; i < m; ++i) {
        diag_a[i] = diag_cost(a.pairs[i], InnerNorm::linf);
        candidates.push_back(diag_a[i]);
    }
    for (size_t j = 0; j < n; ++j) {
        diag_b[j] = diag_cost(b.pairs[j], InnerNorm::linf);
        candidates.push_back(diag_b[j]);
    }
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j) {
            cost[i * n + j] = point_cost(a.pairs[i], b.pairs[j], InnerNorm::linf);
            candidates.push_back(cost[i * n + j]);
        }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // transposed cost for the B-side cover test
    std::vector<double> cost_t(n * m);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j) cost_t[j * m + i] = cost[i * n + j];

    const BottleneckFeasibility fwd(cost, m, n);
    const BottleneckFeasibility bwd(cost_t, n, m);

    std::vector<int> mlA, mrA, mlB, mrB;
    auto feasible = [&](double c) {
        std::vector<uint32_t> needA, needB;
        for (size_t i = 0; i < m; ++i)
            if (diag_a[i] > c) needA.push_back(static_cast<uint32_t>(i));
        for (size_t j = 0; j < n; ++j)
            if (diag_b[j] > c) needB.push_back(static_cast<uint32_t>(j));
        // a matching covering both sides exists iff one covering each side
        // does (Mendelsohn-Dulmage)
        return fwd.covers(needA, c, mlA, mrA) && bwd.covers(needB, c, mlB, mrB);
    };

    size_t lo = 0, hi = candidates.size() - 1;
    // the largest candidate is always feasible: at that cost every point can
    // take its own diagonal projection
    while (lo < hi) {
        const size_t mid = (lo + hi) / 2;
        if (feasible(candidates[mid])) hi = mid;
        else lo = mid + 1;
    }
    const double result = candidates[lo];

    if (matching) {
        feasible(result); // recompute the two covering matchings at the optimum
        // merge: start from the A-side matching, then walk alternating paths
        // to pull in every B-side point that must be covered
        std::vector<int> matchA = mlA; // a -> b
        std::vector<int> matchB(n, -1);
        for (size_t i = 0; i < m; ++i)
            if (matchA[i] >= 0) matchB[matchA[i]] = static_cast<int>(i);
        // B-side requirement, from the covering matching mlB: b -> a
        for (size_t j = 0; j < n; ++j) {
            if (diag_b[j] <= result || matchB[j] >= 0) continue;
            int bcur = static_cast<int>(j);
            while (bcur >= 0 && matchB[bcur] < 0) {
                const int anext = mlB[bcur]; // M2 partner
                if (anext < 0) break;
                const int bprev = matchA[anext];
                matchA[anext] = bcur;
                matchB[bcur] = anext;
                if (bprev >= 0) matchB[bprev] = -1;
                bcur = bprev;
            }
        }
        matching->edges.clear();
        matching->cost = result;
        for (size_t i = 0; i < m; ++i)
            matching->edges.push_back({static_cast<int>(i), matchA[i]});
        for (size_t j = 0; j < n; ++j)
            if (matchB[j] < 0) matching->edges.push_back({-1, static_cast<int>(j)});
    }
    return result;
}

// ------------------------------------------------------------------
// wasserstein (shortest augmenting path assignment with potentials)
// ------------------------------------------------------------------

namespace {

// dense square assignment, Jonker-Volgenant style; returns row -> col
std::vector<int> solve_assignment(const std::vector<double>& cost, size_t n) {
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (size_t i = 1; i <= n; ++i) {
        p[0] = static_cast<int>(i);
        size_t j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            size_t j1 = 0;
            double delta = kInf;
            const double* row = cost.data() + size_t(i0 - 1) * n;
            for (size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = row[j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = static_cast<int>(j0);
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> rowsol(n, -1);
    for (size_t j = 1; j <= n; ++j)
        if (p[j] > 0) rowsol[p[j] - 1] = static_cast<int>(j - 1);
    return rowsol;
}

} // namespace

double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, double q,
                   InnerNorm norm, Matching* matching) {
    if (q < 1.0) throw Error("bad_argument", "wasserstein order q must be >= 1");
    check_finite(a);
    check_finite(b);
    const size_t m = a.size(), n = b.size();
    const size_t N = m + n;
    if (matching) {
        matching->edges.clear();
        matching->cost = 0.0;
    }
    if (N == 0) return 0.0;

    // rows: a-points then b's diagonal slots; cols: b-points then a's slots
    std::vector<double> cost(N * N, 0.0);
    for (size_t i = 0; i < m; ++i) {
        const double dc = std::pow(diag_cost(a.pairs[i], norm), q);
        for (size_t j = 0; j < n; ++j)
            cost[i * N + j] = std::pow(point_cost(a.pairs[i], b.pairs[j], norm), q);
        for (size_t j = n; j < N; ++j) cost[i * N + j] = dc;
    }
    for (size_t i = m; i < N; ++i) {
        const double dc = std::pow(diag_cost(b.pairs[i - m], norm), q);
        for (size_t j = 0; j < n; ++j) cost[i * N + j] = dc;
    }

    const std::vector<int> rowsol = solve_assignment(cost, N);
    double total = 0.0;
    for (size_t i = 0; i < N; ++i) total += cost[i * N + rowsol[i]];
    if (matching) {
        for (size_t i = 0; i < m; ++i) {
            const int j = rowsol[i];
            matching->edges.push_back({static_cast<int>(i), j < int(n) ? j : -1});
        }
        for (size_t i = m; i < N; ++i) {
            const int j = rowsol[i];
            if (j < int(n)) matching->edges.push_back({-1, j});
        }
    }
    const double result = total <= 0.0 ? 0.0 : std::pow(total, 1.0 / q);
    if (matching) matching->cost = result;
    return result;
}

// ------------------------------------------------------------------
// exhaustive oracles
// ------------------------------------------------------------------

namespace {

struct NaiveState {
    const PersistenceDiagram* a;
    const PersistenceDiagram* b;
    InnerNorm norm;
    double q;
    bool bottleneck_mode;
    std::vector<char> used;
    double best = kInf;
};

// assign a-points in order to an unused b-point or the diagonal; leftover
// b-points go to the diagonal
void naive_rec(NaiveState& st, size_t i, double acc_max, double acc_sum) {
    const size_t m = st.a->size(), n = st.b->size();
    if (i == m) {
        double mx = acc_max, sum = acc_sum;
        for (size_t j = 0; j < n; ++j) {
            if (st.used[j]) continue;
            const double c = diag_cost(st.b->pairs[j], st.norm);
            mx = std::max(mx, c);
            sum += std::pow(c, st.q);
        }
        st.best = std::min(st.best, st.bottleneck_mode ? mx : sum);
        return;
    }
    for (size_t j = 0; j < n; ++j) {
        if (st.used[j]) continue;
        const double c = point_cost(st.a->pairs[i], st.b->pairs[j], st.norm);
        st.used[j] = 1;
        naive_rec(st, i + 1, std::max(acc_max, c), acc_sum + std::pow(c, st.q));
        st.used[j] = 0;
    }
    const double c = diag_cost(st.a->pairs[i], st.norm);
    naive_rec(st, i + 1, std::max(acc_max, c), acc_sum + std::pow(c, st.q));
}

double naive_common(const PersistenceDiagram& a, const PersistenceDiagram& b,
                    bool bottleneck_mode, double q, InnerNorm norm) {
    check_finite(a);
    check_finite(b);
    if (a.size() + b.size() > 8)
        throw Error("size_limit", "naive matcher limited to combined size 8");
    NaiveState st{&a, &b, norm, q, bottleneck_mode, std::vector<char>(b.size(), 0)};
    naive_rec(st, 0, 0.0, 0.0);
    if (bottleneck_mode) return st.best;
    return st.best <= 0.0 ? 0.0 : std::pow(st.best, 1.0 / q);
}

} // namespace

double bottleneck_naive(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    return naive_common(a, b, true, 1.0, InnerNorm::linf);
}

double wasserstein_naive(const PersistenceDiagram& a, const PersistenceDiagram& b,
                         double q, InnerNorm norm) {
    return naive_common(a, b, false, q, norm);
}

} // namespace persistome
