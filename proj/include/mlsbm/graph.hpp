#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlsbm/core.hpp"
#include "mlsbm/rng.hpp"

namespace mlsbm {

// One undirected simple layer: unique edges with i < j, plus adjacency lists.
struct Layer {
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> adj;

    std::size_t edge_count() const { return edges.size(); }
};

inline Layer make_layer(int n, std::vector<std::pair<int, int>> edges) {
    Layer layer;
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    layer.edges = std::move(edges);
    layer.adj.assign(n, {});
    for (const auto& [i, j] : layer.edges) {
        if (i < 0 || j < 0 || i >= n || j >= n) {
            throw std::invalid_argument("edge endpoint out of range");
        }
        if (i >= j) throw std::invalid_argument("internal edge not in i<j form");
        layer.adj[i].push_back(j);
        layer.adj[j].push_back(i);
    }
    return layer;
}

// Canonicalizes a possibly-directed pair list: both orientations and repeats
// collapse to one undirected edge. Self-loops are rejected.
inline Layer symmetrize_layer(const std::vector<std::pair<int, int>>& raw, int n) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(raw.size());
    for (auto [i, j] : raw) {
        if (i < 0 || j < 0 || i >= n || j >= n) {
            throw std::invalid_argument("edge endpoint out of range for n=" + std::to_string(n));
        }
        if (i == j) {
            throw std::invalid_argument("self-loop at node " + std::to_string(i + 1));
        }
        if (i > j) std::swap(i, j);
        edges.emplace_back(i, j);
    }
    return make_layer(n, std::move(edges));
}

struct MultiLayerGraph {
    int n = 0;
    std::vector<Layer> layers;

    int m() const { return static_cast<int>(layers.size()); }
};

struct GroundTruth {
    Assignment z;  // 0-based labels
    int k = 0;
};

inline MultiLayerGraph single_layer_graph(const MultiLayerGraph& g, int layer_index) {
    if (layer_index < 0 || layer_index >= g.m()) {
        throw std::invalid_argument("layer index out of range");
    }
    MultiLayerGraph out;
    out.n = g.n;
    out.layers.push_back(g.layers[layer_index]);
    return out;
}

// Per-layer mean degree, 2E/n.
inline std::vector<double> average_degrees(const MultiLayerGraph& g) {
    if (g.n <= 0) throw std::invalid_argument("empty graph");
    std::vector<double> out;
    out.reserve(g.layers.size());
    for (const auto& layer : g.layers) {
        out.push_back(2.0 * static_cast<double>(layer.edge_count()) / g.n);
    }
    return out;
}

// ---- generators ----

// Samples A_ij^(m) ~ Bernoulli(pi[m](z_i, z_j)) independently over i<j and m.
// Draw order (pinned for reproducibility): layers outer, pairs (i<j) in
// lexicographic order inner.
inline MultiLayerGraph generate_mlsbm(int n, const Assignment& z,
                                      const std::vector<Mat>& pi, std::uint64_t seed) {
    if (static_cast<int>(z.size()) != n) throw std::invalid_argument("z size != n");
    if (pi.empty()) throw std::invalid_argument("no layers");
    const int k = static_cast<int>(pi[0].rows());
    check_labels(z, k);
    for (const auto& p : pi) {
        if (p.rows() != p.cols() || static_cast<int>(p.rows()) != k) {
            throw std::invalid_argument("pi layer not K x K");
        }
        for (std::size_t q = 0; q < p.rows(); ++q) {
            for (std::size_t l = 0; l < p.cols(); ++l) {
                if (p(q, l) < 0.0 || p(q, l) > 1.0) throw std::invalid_argument("pi out of [0,1]");
                if (std::abs(p(q, l) - p(l, q)) > 1e-12) {
                    throw std::invalid_argument("pi layer not symmetric");
                }
            }
        }
    }
    Rng rng(seed);
    MultiLayerGraph g;
    g.n = n;
    for (const auto& p : pi) {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (rng.bernoulli(p(z[i], z[j]))) edges.emplace_back(i, j);
            }
        }
        g.layers.push_back(make_layer(n, std::move(edges)));
    }
    return g;
}

enum class Scenario { all_strong, mixed };

inline Scenario parse_scenario(const std::string& s) {
    if (s == "all_strong") return Scenario::all_strong;
    if (s == "mixed") return Scenario::mixed;
    throw std::invalid_argument("unknown scenario: " + s);
}

struct PlantedGraph {
    MultiLayerGraph graph;
    GroundTruth truth;
    std::vector<Mat> pi;          // sampled connectivity, one K x K per layer
    std::vector<double> within;   // diagonal value per layer
    std::vector<double> between;  // off-diagonal value per layer
};

// Planted-partition instance: labels i.i.d. uniform over K; each layer's
// connectivity is lambda on the diagonal and epsilon off it. Per layer,
//   all_strong: epsilon = 0.10 + U(-0.02, 0.02), lambda = 3 * epsilon
//   mixed:      epsilon = 0.09 + U(-0.03, 0.03), lambda = U(1.5, 3) * epsilon
// Draw order: n labels, then per layer its parameter(s) followed by the
// C(n,2) edge indicators.
inline PlantedGraph generate_planted(int n, int k, int m, Scenario scenario,
                                     std::uint64_t seed) {
    if (n <= 0 || k <= 0 || m <= 0) throw std::invalid_argument("n, k, m must be positive");
    if (k > n) throw std::invalid_argument("k > n");
    Rng rng(seed);
    PlantedGraph out;
    out.truth.k = k;
    out.truth.z.resize(n);
    for (int i = 0; i < n; ++i) out.truth.z[i] = static_cast<int>(rng.uniform_int(k));
    out.graph.n = n;
    for (int layer = 0; layer < m; ++layer) {
        double eps, lam;
        if (scenario == Scenario::all_strong) {
            eps = 0.10 + rng.uniform(-0.02, 0.02);
            lam = 3.0 * eps;
        } else {
            eps = 0.09 + rng.uniform(-0.03, 0.03);
            lam = rng.uniform(1.5, 3.0) * eps;
        }
        Mat p(k, k, eps);
        for (int q = 0; q < k; ++q) p(q, q) = lam;
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (rng.bernoulli(p(out.truth.z[i], out.truth.z[j]))) edges.emplace_back(i, j);
            }
        }
        out.graph.layers.push_back(make_layer(n, std::move(edges)));
        out.pi.push_back(std::move(p));
        out.within.push_back(lam);
        out.between.push_back(eps);
    }
    return out;
}

}  // namespace mlsbm
