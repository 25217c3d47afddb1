#include "persistome/diagram.hpp"

#include <algorithm>
#include <cmath>

namespace persistome {

double persistent_entropy(const PersistenceDiagram& pd) {
    double total = 0.0;
    for (const auto& p : pd.pairs) total += p.persistence();
    if (pd.empty() || total <= 0.0) return 0.0;
    double entropy = 0.0;
    for (const auto& p : pd.pairs) {
        const double weight = p.persistence() / total;
        if (weight > 0.0) entropy -= weight * std::log(weight);
    }
    return entropy;
}

double entropy_difference(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    return std::abs(persistent_entropy(a) - persistent_entropy(b));
}

PersistenceDiagram delta_band_select(const PersistenceDiagram& pd,
                                     const SignificanceBand& band) {
    PersistenceDiagram out;
    out.dim = pd.dim;
    out.source_id = pd.source_id;
    for (const auto& p : pd.pairs)
        if (p.persistence() > band.delta) out.pairs.push_back(p);
    return out;
}

PersistenceDiagram topk_select(const PersistenceDiagram& pd, size_t k) {
    PersistenceDiagram out;
    out.dim = pd.dim;
    out.source_id = pd.source_id;
    if (k == 0) return out;
    if (k >= pd.size()) {
        out.pairs = pd.pairs;
        return out;
    }
    std::vector<uint32_t> order(pd.size());
    for (uint32_t i = 0; i < pd.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        const double pa = pd.pairs[a].persistence();
        const double pb = pd.pairs[b].persistence();
        if (pa != pb) return pa > pb;
        if (pd.pairs[a].birth != pd.pairs[b].birth)
            return pd.pairs[a].birth < pd.pairs[b].birth;
        return pd.pairs[a].death < pd.pairs[b].death;
    });
    order.resize(k);
    std::sort(order.begin(), order.end()); // keep input order in the output
    out.pairs.reserve(k);
    for (uint32_t i : order) out.pairs.push_back(pd.pairs[i]);
    return out;
}

PaddedDiagram pad_to(const PersistenceDiagram& pd, size_t target) {
    if (target < pd.size())
        throw Error("bad_argument", "pad target smaller than diagram size");
    PaddedDiagram out;
    out.diagram = pd;
    out.original_size = pd.size();
    out.target_size = target;
    out.pad_count = target - pd.size();
    if (out.pad_count == 0) return out;

    PersistencePair fill{0.0, 0.0, pd.dim, false};
    if (pd.empty()) {
        out.sentinel = true; // nothing to copy; (0,0) sits on the diagonal
    } else {
        const auto least = std::min_element(
            pd.pairs.begin(), pd.pairs.end(), [](const auto& a, const auto& b) {
                const double pa = a.persistence();
                const double pb = b.persistence();
                if (pa != pb) return pa < pb;
                if (a.birth != b.birth) return a.birth < b.birth;
                return a.death < b.death;
            });
        fill = *least;
    }
    out.diagram.pairs.reserve(target);
    for (size_t i = 0; i < out.pad_count; ++i) out.diagram.pairs.push_back(fill);
    return out;
}

std::vector<PaddedDiagram> dataset_pad(const std::vector<PersistenceDiagram>& diagrams) {
    if (diagrams.empty()) throw Error("bad_argument", "dataset_pad on empty collection");
    size_t target = 0;
    for (const auto& pd : diagrams) target = std::max(target, pd.size());
    std::vector<PaddedDiagram> out;
    out.reserve(diagrams.size());
    for (const auto& pd : diagrams) out.push_back(pad_to(pd, target));
    return out;
}

} // namespace persistome
