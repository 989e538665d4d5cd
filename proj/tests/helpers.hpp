#pragma once

// Brute-force reference implementations used to check the library's
// optimized paths. Everything here is written the slow, obvious way.

#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "mlsbm/blockmodel.hpp"
#include "mlsbm/graph.hpp"
#include "mlsbm/restricted.hpp"

namespace testref {

using mlsbm::Assignment;
using mlsbm::Mat;
using mlsbm::MultiLayerGraph;

inline std::vector<Mat> dense_adj(const MultiLayerGraph& g) {
    std::vector<Mat> out;
    for (const auto& layer : g.layers) {
        Mat a(g.n, g.n, 0.0);
        for (const auto& [i, j] : layer.edges) {
            a(i, j) = 1.0;
            a(j, i) = 1.0;
        }
        out.push_back(std::move(a));
    }
    return out;
}

inline double bern_logmass(double a, double p) {
    p = mlsbm::clamp_prob(p);
    return a * std::log(p) + (1.0 - a) * std::log(1.0 - p);
}

inline double naive_loglik_mlsbm(const MultiLayerGraph& g, const Assignment& z,
                                 const std::vector<Mat>& pi) {
    const auto adj = dense_adj(g);
    double ll = 0.0;
    for (int m = 0; m < g.m(); ++m) {
        for (int i = 0; i < g.n; ++i) {
            for (int j = i + 1; j < g.n; ++j) {
                ll += bern_logmass(adj[m](i, j), pi[m](z[i], z[j]));
            }
        }
    }
    return ll;
}

inline double naive_loglik_restricted(const MultiLayerGraph& g, const Assignment& z,
                                      const mlsbm::RMLSBMParams& params) {
    const auto adj = dense_adj(g);
    double ll = 0.0;
    for (int m = 0; m < g.m(); ++m) {
        for (int i = 0; i < g.n; ++i) {
            for (int j = i + 1; j < g.n; ++j) {
                const double theta = params.pi(z[i], z[j]) + params.beta[m];
                ll += adj[m](i, j) * theta - mlsbm::softplus(theta);
            }
        }
    }
    return ll;
}

// ELBO straight from its definition, with per-layer probability matrices.
inline double naive_elbo(const MultiLayerGraph& g, const Mat& tau,
                         const std::vector<double>& alpha, const std::vector<Mat>& prob) {
    const auto adj = dense_adj(g);
    const int n = g.n;
    const int k = static_cast<int>(tau.cols());
    double out = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int q = 0; q < k; ++q) {
            const double t = tau(i, q);
            if (t > 0.0) {
                out += t * std::log(std::max(alpha[q], 1e-300));
                out -= t * std::log(t);
            }
        }
    }
    for (int m = 0; m < g.m(); ++m) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                for (int q = 0; q < k; ++q) {
                    for (int l = 0; l < k; ++l) {
                        out += tau(i, q) * tau(j, l) * bern_logmass(adj[m](i, j), prob[m](q, l));
                    }
                }
            }
        }
    }
    return out;
}

inline std::vector<std::vector<int>> all_permutations(int k) {
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x, double h = 1e-6) {
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        x[i] = orig + h;
        const double up = f(x);
        x[i] = orig - h;
        const double down = f(x);
        x[i] = orig;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

inline Mat random_tau(int n, int k, mlsbm::Rng& rng) {
    Mat tau(n, k);
    for (int i = 0; i < n; ++i) {
        double total = 0.0;
        for (int q = 0; q < k; ++q) {
            tau(i, q) = std::exp(rng.normal());
            total += tau(i, q);
        }
        for (int q = 0; q < k; ++q) tau(i, q) /= total;
    }
    return tau;
}

// Two disjoint cliques of size half each, one layer.
inline MultiLayerGraph two_cliques(int half) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < half; ++i) {
        for (int j = i + 1; j < half; ++j) {
            edges.emplace_back(i, j);
            edges.emplace_back(half + i, half + j);
        }
    }
    MultiLayerGraph g;
    g.n = 2 * half;
    g.layers.push_back(mlsbm::make_layer(g.n, std::move(edges)));
    return g;
}

inline Assignment two_block_labels(int half) {
    Assignment z(2 * half, 0);
    for (int i = half; i < 2 * half; ++i) z[i] = 1;
    return z;
}

}  // namespace testref
