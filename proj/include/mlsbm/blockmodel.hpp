#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlsbm/core.hpp"
#include "mlsbm/graph.hpp"

namespace mlsbm {

// Dense per-layer matrices (M entries of N x N), used for expected-adjacency
// arguments at small N.
using DenseLayers = std::vector<Mat>;

struct MLSBMParams {
    std::vector<double> alpha;  // block prior, length K
    std::vector<Mat> pi;        // per-layer K x K symmetric edge probabilities
};

// ---- counts ----

struct BlockCounts {
    std::vector<int> sizes;  // N_q
    Mat pairs;               // n_ql: C(N_q,2) on the diagonal, N_q*N_l off it
};

inline BlockCounts block_counts(const Assignment& z, int k) {
    check_labels(z, k);
    BlockCounts out;
    out.sizes.assign(k, 0);
    for (int zi : z) ++out.sizes[zi];
    out.pairs = Mat(k, k);
    for (int q = 0; q < k; ++q) {
        for (int l = 0; l < k; ++l) {
            out.pairs(q, l) = q == l ? 0.5 * out.sizes[q] * (out.sizes[q] - 1.0)
                                     : static_cast<double>(out.sizes[q]) * out.sizes[l];
        }
    }
    return out;
}

// Per-layer block edge counts e_ql^(m); symmetric, diagonal holds within-block counts.
inline std::vector<Mat> block_edge_counts(const MultiLayerGraph& g, const Assignment& z, int k) {
    if (static_cast<int>(z.size()) != g.n) throw std::invalid_argument("z size != n");
    check_labels(z, k);
    std::vector<Mat> out;
    out.reserve(g.layers.size());
    for (const auto& layer : g.layers) {
        Mat e(k, k);
        for (const auto& [i, j] : layer.edges) {
            e(z[i], z[j]) += 1.0;
            if (z[i] != z[j]) e(z[j], z[i]) += 1.0;
        }
        out.push_back(std::move(e));
    }
    return out;
}

// Block sums of a dense symmetric matrix over unordered pairs i<j.
inline std::vector<Mat> block_pair_sums(const DenseLayers& p_layers, const Assignment& z, int k) {
    check_labels(z, k);
    const int n = static_cast<int>(z.size());
    std::vector<Mat> out;
    out.reserve(p_layers.size());
    for (const auto& p : p_layers) {
        if (static_cast<int>(p.rows()) != n || static_cast<int>(p.cols()) != n) {
            throw std::invalid_argument("dense layer not N x N");
        }
        Mat s(k, k);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                s(z[i], z[j]) += p(i, j);
                if (z[i] != z[j]) s(z[j], z[i]) += p(i, j);
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

// ---- divergences and estimators ----

inline double bernoulli_kl(double a, double b) {
    a = clamp_prob(a);
    b = clamp_prob(b);
    return a * std::log(a / b) + (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
}

// Per-layer block MLEs: edge count over pair count; blocks with no pairs get 0.
inline std::vector<Mat> mle_pi_hat(const MultiLayerGraph& g, const Assignment& z, int k) {
    const BlockCounts counts = block_counts(z, k);
    std::vector<Mat> e = block_edge_counts(g, z, k);
    for (auto& mat : e) {
        for (int q = 0; q < k; ++q) {
            for (int l = 0; l < k; ++l) {
                mat(q, l) = counts.pairs(q, l) > 0.0 ? mat(q, l) / counts.pairs(q, l) : 0.0;
            }
        }
    }
    return e;
}

// Population analogue of mle_pi_hat: block means of an expected adjacency.
inline std::vector<Mat> pi_bar(const DenseLayers& p_layers, const Assignment& z, int k) {
    const BlockCounts counts = block_counts(z, k);
    std::vector<Mat> s = block_pair_sums(p_layers, z, k);
    for (auto& mat : s) {
        for (int q = 0; q < k; ++q) {
            for (int l = 0; l < k; ++l) {
                mat(q, l) = counts.pairs(q, l) > 0.0 ? mat(q, l) / counts.pairs(q, l) : 0.0;
            }
        }
    }
    return s;
}

// ---- likelihoods ----

// Bernoulli log-likelihood of the observed layers under block probabilities pi,
// grouped by blocks: sum_m sum_{q<=l} [ e log pi + (n-e) log(1-pi) ].
inline double log_likelihood_mlsbm(const MultiLayerGraph& g, const Assignment& z,
                                   const std::vector<Mat>& pi) {
    if (pi.size() != g.layers.size()) throw std::invalid_argument("pi layer count mismatch");
    const int k = static_cast<int>(pi[0].rows());
    const BlockCounts counts = block_counts(z, k);
    const std::vector<Mat> e = block_edge_counts(g, z, k);
    double ll = 0.0;
    for (std::size_t m = 0; m < pi.size(); ++m) {
        for (int q = 0; q < k; ++q) {
            for (int l = q; l < k; ++l) {
                const double nql = counts.pairs(q, l);
                if (nql <= 0.0) continue;
                const double eql = e[m](q, l);
                ll += xlogp(eql, pi[m](q, l)) + xlogp(nql - eql, 1.0 - pi[m](q, l));
            }
        }
    }
    return ll;
}

// Log-likelihood profiled over pi: evaluated at the block MLEs.
inline double profile_log_likelihood(const MultiLayerGraph& g, const Assignment& z, int k) {
    return log_likelihood_mlsbm(g, z, mle_pi_hat(g, z, k));
}

// Expected log-likelihood under edge probabilities P, maximized over block
// probabilities (attained at pi_bar): sum_m sum_{q<=l} [ p log pibar + (n-p) log(1-pibar) ].
inline double expected_log_likelihood(const DenseLayers& p_layers, const Assignment& z, int k) {
    const BlockCounts counts = block_counts(z, k);
    const std::vector<Mat> sums = block_pair_sums(p_layers, z, k);
    double ll = 0.0;
    for (std::size_t m = 0; m < p_layers.size(); ++m) {
        for (int q = 0; q < k; ++q) {
            for (int l = q; l < k; ++l) {
                const double nql = counts.pairs(q, l);
                if (nql <= 0.0) continue;
                const double pql = sums[m](q, l);
                const double bar = pql / nql;
                ll += xlogp(pql, bar) + xlogp(nql - pql, 1.0 - bar);
            }
        }
    }
    return ll;
}

// Residual of the likelihood-gap decomposition: the profiled gap
// l(A;z) - lbar_P(z) minus its KL + centered-linear-statistic form
//   sum_m sum_{q<=l} n_ql D(pihat || pibar) + X - E[X],
// X = sum_m sum_{i<j} A_ij^m logit(pibar at the pair's blocks).
// Zero in exact arithmetic for any A, interior P, and labeling z.
inline double decomposition_residual(const MultiLayerGraph& g, const DenseLayers& p_layers,
                                     const Assignment& z, int k) {
    if (p_layers.size() != g.layers.size()) throw std::invalid_argument("layer count mismatch");
    const BlockCounts counts = block_counts(z, k);
    const std::vector<Mat> e = block_edge_counts(g, z, k);
    const std::vector<Mat> sums = block_pair_sums(p_layers, z, k);

    const double lhs = profile_log_likelihood(g, z, k) - expected_log_likelihood(p_layers, z, k);

    double rhs = 0.0;
    for (std::size_t m = 0; m < p_layers.size(); ++m) {
        for (int q = 0; q < k; ++q) {
            for (int l = q; l < k; ++l) {
                const double nql = counts.pairs(q, l);
                if (nql <= 0.0) continue;
                const double hat = e[m](q, l) / nql;
                const double bar = sums[m](q, l) / nql;
                rhs += nql * bernoulli_kl(hat, bar);
                rhs += (e[m](q, l) - sums[m](q, l)) * logit(bar);
            }
        }
    }
    return std::abs(lhs - rhs);
}

}  // namespace mlsbm
