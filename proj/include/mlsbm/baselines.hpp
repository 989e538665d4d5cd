#pragma once

#include <stdexcept>
#include <vector>

#include "mlsbm/graph.hpp"
#include "mlsbm/hungarian.hpp"
#include "mlsbm/metrics.hpp"
#include "mlsbm/vem_mlsbm.hpp"

namespace mlsbm {

// Majority-vote flattening: edge iff it appears in strictly more than half the layers.
inline MultiLayerGraph aggregate_mean(const MultiLayerGraph& g) {
    if (g.m() < 1) throw std::invalid_argument("graph has no layers");
    // accumulate per-pair multiplicities via sorted flat keys i*n+j
    std::vector<long long> tally;
    for (const auto& layer : g.layers) {
        for (const auto& [i, j] : layer.edges) {
            tally.push_back(static_cast<long long>(i) * g.n + j);
        }
    }
    std::sort(tally.begin(), tally.end());
    std::vector<std::pair<int, int>> edges;
    for (std::size_t idx = 0; idx < tally.size();) {
        std::size_t next = idx;
        while (next < tally.size() && tally[next] == tally[idx]) ++next;
        if (2 * static_cast<int>(next - idx) > g.m()) {
            edges.emplace_back(static_cast<int>(tally[idx] / g.n),
                               static_cast<int>(tally[idx] % g.n));
        }
        idx = next;
    }
    MultiLayerGraph out;
    out.n = g.n;
    out.layers.push_back(make_layer(g.n, std::move(edges)));
    return out;
}

// Union flattening: edge iff it appears in any layer.
inline MultiLayerGraph aggregate_sparse(const MultiLayerGraph& g) {
    if (g.m() < 1) throw std::invalid_argument("graph has no layers");
    std::vector<std::pair<int, int>> edges;
    for (const auto& layer : g.layers) {
        edges.insert(edges.end(), layer.edges.begin(), layer.edges.end());
    }
    MultiLayerGraph out;
    out.n = g.n;
    out.layers.push_back(make_layer(g.n, std::move(edges)));
    return out;
}

// Permutation of z's labels maximizing agreement with z_ref; ties resolve
// toward the identity via an epsilon diagonal bonus.
inline Assignment align_labels(const Assignment& z, const Assignment& z_ref, int k) {
    auto profit = contingency(z, z_ref, k, k);
    for (int q = 0; q < k; ++q) profit[q][q] += 1e-9;
    const auto perm = hungarian_max(profit);
    Assignment out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = perm[z[i]];
    return out;
}

// Aligns every labeling to the first, then takes the per-node modal label
// (ties to the lowest label).
inline Assignment majority_vote(const std::vector<Assignment>& zs, int k) {
    if (zs.empty()) throw std::invalid_argument("no labelings to vote over");
    const std::size_t n = zs[0].size();
    std::vector<Assignment> aligned;
    aligned.push_back(zs[0]);
    check_labels(zs[0], k);
    for (std::size_t v = 1; v < zs.size(); ++v) {
        if (zs[v].size() != n) throw std::invalid_argument("labelings differ in length");
        aligned.push_back(align_labels(zs[v], zs[0], k));
    }
    Assignment out(n);
    std::vector<int> votes(k);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(votes.begin(), votes.end(), 0);
        for (const auto& z : aligned) ++votes[z[i]];
        int best = 0;
        for (int q = 1; q < k; ++q) {
            if (votes[q] > votes[best]) best = q;
        }
        out[i] = best;
    }
    return out;
}

// Single-layer blockmodel fit: the multilayer fitter on an M = 1 view.
inline MlsbmFit fit_single_layer_sbm(const MultiLayerGraph& g, int layer_index, int k,
                                     Mat init_tau, const FitOptions& opts = {}) {
    return fit_mlsbm(single_layer_graph(g, layer_index), k, std::move(init_tau), opts);
}

}  // namespace mlsbm
