#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlsbm/blockmodel.hpp"
#include "mlsbm/core.hpp"
#include "mlsbm/graph.hpp"
#include "mlsbm/lbfgs.hpp"

namespace mlsbm {

// Restricted parameterization: one shared K x K logit-scale block matrix pi
// plus a per-layer offset beta_m constrained to sum to zero. Edge probability
// for blocks (q,l) in layer m is sigmoid(pi_ql + beta_m).

struct RMLSBMParams {
    Mat pi;                    // K x K symmetric, logit scale
    std::vector<double> beta;  // length M, sums to 0
};

inline double phi_transform(double pi_ql, double beta_m) { return sigmoid(pi_ql + beta_m); }

// Parameter box half-width log(M N^2); keeps logits finite and fitted
// probabilities bounded away from 0 and 1.
inline double box_limit(int m, int n) {
    return std::log(static_cast<double>(m) * static_cast<double>(n) * static_cast<double>(n));
}

inline std::vector<Mat> phi_layers(const RMLSBMParams& params) {
    const int k = static_cast<int>(params.pi.rows());
    std::vector<Mat> out;
    for (double b : params.beta) {
        Mat p(k, k);
        for (int q = 0; q < k; ++q) {
            for (int l = 0; l < k; ++l) p(q, l) = phi_transform(params.pi(q, l), b);
        }
        out.push_back(std::move(p));
    }
    return out;
}

// ---- sufficient statistics ----
//
// W(q,l)    = sum over ordered pairs i != j of tau_iq tau_jl
// Y[m](q,l) = the same sum restricted to edges of layer m
// Both are symmetric; with hard labels W's diagonal is twice the within-block
// pair count and Y's diagonal twice the within-block edge count.

struct PairStats {
    int n = 0;
    Mat w;
    std::vector<Mat> y;

    int k() const { return static_cast<int>(w.rows()); }
    int m() const { return static_cast<int>(y.size()); }
};

inline PairStats stats_from_tau(const MultiLayerGraph& g, const Mat& tau) {
    const int n = g.n;
    const int k = static_cast<int>(tau.cols());
    if (static_cast<int>(tau.rows()) != n) throw std::invalid_argument("tau rows != n");
    PairStats st;
    st.n = n;
    std::vector<double> s(k, 0.0);
    Mat p(k, k);
    for (int i = 0; i < n; ++i) {
        const double* row = tau.row(i);
        for (int q = 0; q < k; ++q) {
            s[q] += row[q];
            for (int l = 0; l < k; ++l) p(q, l) += row[q] * row[l];
        }
    }
    st.w = Mat(k, k);
    for (int q = 0; q < k; ++q) {
        for (int l = 0; l < k; ++l) st.w(q, l) = s[q] * s[l] - p(q, l);
    }
    for (const auto& layer : g.layers) {
        Mat y(k, k);
        for (const auto& [i, j] : layer.edges) {
            const double* ti = tau.row(i);
            const double* tj = tau.row(j);
            for (int q = 0; q < k; ++q) {
                for (int l = 0; l < k; ++l) y(q, l) += ti[q] * tj[l] + tj[q] * ti[l];
            }
        }
        st.y.push_back(std::move(y));
    }
    return st;
}

inline PairStats stats_from_labels(const MultiLayerGraph& g, const Assignment& z, int k) {
    const BlockCounts counts = block_counts(z, k);
    const std::vector<Mat> e = block_edge_counts(g, z, k);
    PairStats st;
    st.n = g.n;
    st.w = Mat(k, k);
    for (int q = 0; q < k; ++q) {
        for (int l = 0; l < k; ++l) st.w(q, l) = (q == l ? 2.0 : 1.0) * counts.pairs(q, l);
    }
    for (const auto& em : e) {
        Mat y(k, k);
        for (int q = 0; q < k; ++q) {
            for (int l = 0; l < k; ++l) y(q, l) = (q == l ? 2.0 : 1.0) * em(q, l);
        }
        st.y.push_back(std::move(y));
    }
    return st;
}

// Population stats: edge indicators replaced by expected adjacencies.
inline PairStats stats_from_dense(const DenseLayers& p_layers, const Assignment& z, int k) {
    const BlockCounts counts = block_counts(z, k);
    const std::vector<Mat> sums = block_pair_sums(p_layers, z, k);
    PairStats st;
    st.n = static_cast<int>(z.size());
    st.w = Mat(k, k);
    for (int q = 0; q < k; ++q) {
        for (int l = 0; l < k; ++l) st.w(q, l) = (q == l ? 2.0 : 1.0) * counts.pairs(q, l);
    }
    for (const auto& sm : sums) {
        Mat y(k, k);
        for (int q = 0; q < k; ++q) {
            for (int l = 0; l < k; ++l) y(q, l) = (q == l ? 2.0 : 1.0) * sm(q, l);
        }
        st.y.push_back(std::move(y));
    }
    return st;
}

// ---- parameter packing: pi entries with q <= l in lexicographic order, then beta ----

inline int packed_size(int k, int m) { return k * (k + 1) / 2 + m; }

inline std::vector<double> pack_params(const RMLSBMParams& params) {
    const int k = static_cast<int>(params.pi.rows());
    std::vector<double> x;
    x.reserve(packed_size(k, static_cast<int>(params.beta.size())));
    for (int q = 0; q < k; ++q) {
        for (int l = q; l < k; ++l) x.push_back(params.pi(q, l));
    }
    x.insert(x.end(), params.beta.begin(), params.beta.end());
    return x;
}

inline RMLSBMParams unpack_params(const std::vector<double>& x, int k, int m) {
    RMLSBMParams params;
    params.pi = Mat(k, k);
    int idx = 0;
    for (int q = 0; q < k; ++q) {
        for (int l = q; l < k; ++l) {
            params.pi(q, l) = x[idx];
            params.pi(l, q) = x[idx];
            ++idx;
        }
    }
    params.beta.assign(x.begin() + idx, x.end());
    return params;
}

// ---- objective ----
//
// Pair part of the variational objective as a function of (pi, beta) given the
// stats: (1/2) sum_m sum_{q,l} [ Y theta - W softplus(theta) ], theta = pi_ql + beta_m.
// Concave in the packed parameters. The gradient components are the
// estimating-equation gaps.

inline double restricted_objective(const PairStats& st, const std::vector<double>& x,
                                   std::vector<double>* grad) {
    const int k = st.k();
    const int m = st.m();
    if (grad) grad->assign(packed_size(k, m), 0.0);
    double obj = 0.0;
    int idx = 0;
    const double* beta = x.data() + k * (k + 1) / 2;
    for (int q = 0; q < k; ++q) {
        for (int l = q; l < k; ++l, ++idx) {
            const double weight = q == l ? 0.5 : 1.0;  // collapses the symmetric grid
            const double w = st.w(q, l);
            for (int lm = 0; lm < m; ++lm) {
                const double theta = x[idx] + beta[lm];
                const double y = st.y[lm](q, l);
                obj += weight * (y * theta - w * softplus(theta));
                if (grad) {
                    const double gap = weight * (y - w * sigmoid(theta));
                    (*grad)[idx] += gap;
                    (*grad)[k * (k + 1) / 2 + lm] += gap;
                }
            }
        }
    }
    return obj;
}

// Projects onto { sum(beta) = 0 } intersected with the box; alternates the two
// projections (converges geometrically, and in fitted instances the box is
// inactive so one pass suffices).
inline void recenter_and_clamp(RMLSBMParams& params, int n) {
    const int m = static_cast<int>(params.beta.size());
    const double limit = box_limit(m, n);
    auto mean_beta = [&] {
        double s = 0.0;
        for (double b : params.beta) s += b;
        return s / m;
    };
    double shift = mean_beta();
    for (auto& b : params.beta) b -= shift;
    for (auto& v : params.pi.data()) v = std::min(limit, std::max(-limit, v + shift));
    for (int pass = 0; pass < 50; ++pass) {
        bool clamped = false;
        for (auto& b : params.beta) {
            const double c = std::min(limit, std::max(-limit, b));
            if (c != b) clamped = true;
            b = c;
        }
        const double mu = mean_beta();
        if (!clamped && std::abs(mu) < 1e-15) break;
        for (auto& b : params.beta) b -= mu;
    }
}

// Moment-based starting point: shared logits from layer-averaged block means,
// offsets from per-layer densities on the logit scale.
inline RMLSBMParams moment_init(const PairStats& st) {
    const int k = st.k();
    const int m = st.m();
    RMLSBMParams params;
    params.pi = Mat(k, k);
    double w_total = 0.0;
    std::vector<double> y_total(m, 0.0);
    for (int q = 0; q < k; ++q) {
        for (int l = 0; l < k; ++l) {
            double ysum = 0.0;
            for (int lm = 0; lm < m; ++lm) ysum += st.y[lm](q, l);
            const double w = st.w(q, l);
            params.pi(q, l) = logit(w > 0.0 ? ysum / (m * w) : 0.5);
            if (l >= q) {
                w_total += (q == l ? 0.5 : 1.0) * w;
                for (int lm = 0; lm < m; ++lm) y_total[lm] += (q == l ? 0.5 : 1.0) * st.y[lm](q, l);
            }
        }
    }
    params.beta.resize(m);
    double mean = 0.0;
    for (int lm = 0; lm < m; ++lm) {
        params.beta[lm] = logit(w_total > 0.0 ? y_total[lm] / w_total : 0.5);
        mean += params.beta[lm];
    }
    mean /= m;
    for (auto& b : params.beta) b -= mean;
    recenter_and_clamp(params, st.n);
    return params;
}

struct RmleResult {
    RMLSBMParams params;
    bool converged = false;
    int iterations = 0;
    double grad_inf_norm = 0.0;
};

inline RmleResult maximize_restricted(const PairStats& st, const RMLSBMParams& warm,
                                      const OptimOptions& opts = {}) {
    Objective obj = [&st](const std::vector<double>& x, std::vector<double>& g) {
        return restricted_objective(st, x, &g);
    };
    OptimResult r = lbfgs_maximize(obj, pack_params(warm), opts);
    RmleResult out;
    out.params = unpack_params(r.x, st.k(), st.m());
    recenter_and_clamp(out.params, st.n);
    out.converged = r.converged;
    out.iterations = r.iterations;
    out.grad_inf_norm = r.grad_inf_norm;
    return out;
}

// Restricted MLE with labels held fixed. Reports the best iterate with a
// convergence flag rather than throwing on slow instances.
inline RmleResult rmle_fixed_z(const MultiLayerGraph& g, const Assignment& z, int k,
                               const OptimOptions& opts = {}) {
    if (k > g.n) throw std::invalid_argument("k > n");
    const PairStats st = stats_from_labels(g, z, k);
    return maximize_restricted(st, moment_init(st), opts);
}

// Signed estimating-equation gaps (model-implied minus observed edge sums),
// normalized by the relevant dyad counts. Layout: one per layer, then one per
// block pair (q <= l, lexicographic). Zero at an interior restricted MLE.
inline std::vector<double> estimating_residuals(const MultiLayerGraph& g, const Assignment& z,
                                                const RMLSBMParams& params) {
    const int k = static_cast<int>(params.pi.rows());
    const int m = static_cast<int>(params.beta.size());
    if (m != g.m()) throw std::invalid_argument("beta length != layer count");
    const BlockCounts counts = block_counts(z, k);
    const std::vector<Mat> e = block_edge_counts(g, z, k);
    const double total_pairs = 0.5 * g.n * (g.n - 1.0);

    std::vector<double> res;
    res.reserve(m + k * (k + 1) / 2);
    for (int lm = 0; lm < m; ++lm) {
        double model = 0.0, observed = 0.0;
        for (int q = 0; q < k; ++q) {
            for (int l = q; l < k; ++l) {
                model += counts.pairs(q, l) * phi_transform(params.pi(q, l), params.beta[lm]);
                observed += e[lm](q, l);
            }
        }
        res.push_back((model - observed) / total_pairs);
    }
    for (int q = 0; q < k; ++q) {
        for (int l = q; l < k; ++l) {
            const double nql = counts.pairs(q, l);
            if (nql <= 0.0) {
                res.push_back(0.0);
                continue;
            }
            double model = 0.0, observed = 0.0;
            for (int lm = 0; lm < m; ++lm) {
                model += nql * phi_transform(params.pi(q, l), params.beta[lm]);
                observed += e[lm](q, l);
            }
            res.push_back((model - observed) / (m * nql));
        }
    }
    return res;
}

// Restricted log-likelihood with labels fixed, via block sums.
inline double log_likelihood_restricted(const MultiLayerGraph& g, const Assignment& z,
                                        const RMLSBMParams& params) {
    const int k = static_cast<int>(params.pi.rows());
    const BlockCounts counts = block_counts(z, k);
    const std::vector<Mat> e = block_edge_counts(g, z, k);
    double ll = 0.0;
    for (int lm = 0; lm < g.m(); ++lm) {
        for (int q = 0; q < k; ++q) {
            for (int l = q; l < k; ++l) {
                const double theta = params.pi(q, l) + params.beta[lm];
                ll += e[lm](q, l) * theta - counts.pairs(q, l) * softplus(theta);
            }
        }
    }
    return ll;
}

// Restricted analogue of the likelihood-gap decomposition. Both constrained
// MLEs (for the observed graph and for the expected adjacency) are refit at a
// tight tolerance because the identity is exact only at the estimating
// equations' roots.
inline double decomposition_residual_restricted(const MultiLayerGraph& g,
                                                const DenseLayers& p_layers,
                                                const Assignment& z, int k) {
    if (p_layers.size() != g.layers.size()) throw std::invalid_argument("layer count mismatch");
    OptimOptions tight;
    tight.grad_tol = 1e-12;
    tight.max_iter = 2000;

    const PairStats st_obs = stats_from_labels(g, z, k);
    const RMLSBMParams hat = maximize_restricted(st_obs, moment_init(st_obs), tight).params;
    const PairStats st_exp = stats_from_dense(p_layers, z, k);
    const RMLSBMParams bar = maximize_restricted(st_exp, moment_init(st_exp), tight).params;

    const BlockCounts counts = block_counts(z, k);
    const std::vector<Mat> e = block_edge_counts(g, z, k);
    const std::vector<Mat> p = block_pair_sums(p_layers, z, k);

    double lhs = log_likelihood_restricted(g, z, hat);
    double rhs = 0.0;
    for (int lm = 0; lm < g.m(); ++lm) {
        for (int q = 0; q < k; ++q) {
            for (int l = q; l < k; ++l) {
                const double nql = counts.pairs(q, l);
                if (nql <= 0.0) continue;
                const double theta_bar = bar.pi(q, l) + bar.beta[lm];
                const double phi_hat = phi_transform(hat.pi(q, l), hat.beta[lm]);
                const double phi_bar = sigmoid(theta_bar);
                lhs -= p[lm](q, l) * theta_bar - nql * softplus(theta_bar);
                rhs += nql * bernoulli_kl(phi_hat, phi_bar);
                rhs += (e[lm](q, l) - p[lm](q, l)) * logit(phi_bar);
            }
        }
    }
    return std::abs(lhs - rhs);
}

}  // namespace mlsbm
