#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mlsbm/core.hpp"
#include "mlsbm/graph.hpp"
#include "mlsbm/lbfgs.hpp"
#include "mlsbm/restricted.hpp"

namespace mlsbm {

struct VariationalState {
    Mat tau;
    std::vector<double> elbo_trace;
    int iterations = 0;
    bool converged = false;
};

struct FitOptions {
    int t_max = 200;            // outer EM iterations
    int s_max = 50;             // inner fixed-point sweeps per E-step
    double estep_tol = 1e-5;    // max tau entry change per sweep
    double elbo_rel_tol = 1e-6; // relative ELBO change stopping rule
    OptimOptions mstep;         // restricted M-step optimizer settings
};

// 1-rho on the own class, rho/(K-1) elsewhere.
inline Mat soften_labels(const Assignment& z, int k, double rho = 0.1) {
    check_labels(z, k);
    Mat tau(z.size(), k, k > 1 ? rho / (k - 1) : 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) tau(i, z[i]) = k > 1 ? 1.0 - rho : 1.0;
    return tau;
}

inline Assignment hard_labels(const Mat& tau) {
    Assignment z(tau.rows());
    for (std::size_t i = 0; i < tau.rows(); ++i) {
        z[i] = argmax_row(tau.row(i), tau.cols());
    }
    return z;
}

inline void validate_init_tau(Mat& tau, int n, int k) {
    if (static_cast<int>(tau.rows()) != n || static_cast<int>(tau.cols()) != k) {
        throw std::invalid_argument("init tau must be N x K");
    }
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int q = 0; q < k; ++q) {
            if (tau(i, q) < 0.0) throw std::invalid_argument("init tau has negative entry");
            s += tau(i, q);
        }
        if (s < 1e-12) throw std::invalid_argument("init tau row " + std::to_string(i) + " is zero");
        for (int q = 0; q < k; ++q) tau(i, q) /= s;
    }
}

// Per-pair log-mass split into an all-pairs base and an edge bonus, so one
// sweep engine serves both models:
//   base(q,l)     = sum_m log-mass of a non-edge for blocks (q,l)
//   bonus[m](q,l) = log-mass difference edge minus non-edge in layer m
struct EStepTables {
    Mat base;
    std::vector<Mat> bonus;
};

inline EStepTables mlsbm_tables(const std::vector<Mat>& pi) {
    const int k = static_cast<int>(pi[0].rows());
    EStepTables t;
    t.base = Mat(k, k);
    for (const auto& p : pi) {
        Mat b(k, k);
        for (int q = 0; q < k; ++q) {
            for (int l = 0; l < k; ++l) {
                const double pr = clamp_prob(p(q, l));
                t.base(q, l) += std::log1p(-pr);
                b(q, l) = std::log(pr) - std::log1p(-pr);
            }
        }
        t.bonus.push_back(std::move(b));
    }
    return t;
}

inline EStepTables rmlsbm_tables(const RMLSBMParams& params) {
    const int k = static_cast<int>(params.pi.rows());
    EStepTables t;
    t.base = Mat(k, k);
    for (double beta : params.beta) {
        Mat b(k, k);
        for (int q = 0; q < k; ++q) {
            for (int l = 0; l < k; ++l) {
                const double theta = params.pi(q, l) + beta;
                t.base(q, l) -= softplus(theta);
                b(q, l) = theta;
            }
        }
        t.bonus.push_back(std::move(b));
    }
    return t;
}

// Sequential (Gauss-Seidel) fixed-point sweeps of the mean-field update in log
// space with per-row max subtraction. Each row update is the exact coordinate
// maximizer of the ELBO given the other rows, so sweeps never decrease it.
// Returns {sweeps used, last max row change}.
inline std::pair<int, double> e_step_sweeps(const MultiLayerGraph& g, Mat& tau,
                                            const std::vector<double>& log_alpha,
                                            const EStepTables& tables, int s_max,
                                            double tol) {
    const int n = g.n;
    const int k = static_cast<int>(tau.cols());
    const int m = g.m();

    std::vector<double> s(k, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int q = 0; q < k; ++q) s[q] += tau(i, q);
    }

    std::vector<double> gsum(static_cast<std::size_t>(m) * k);
    std::vector<double> expo(k), fresh(k);
    double change = 0.0;
    int sweep = 0;
    for (; sweep < s_max; ++sweep) {
        change = 0.0;
        for (int i = 0; i < n; ++i) {
            std::fill(gsum.begin(), gsum.end(), 0.0);
            for (int lm = 0; lm < m; ++lm) {
                double* gs = gsum.data() + static_cast<std::size_t>(lm) * k;
                for (int j : g.layers[lm].adj[i]) {
                    const double* tj = tau.row(j);
                    for (int l = 0; l < k; ++l) gs[l] += tj[l];
                }
            }
            double* ti = tau.row(i);
            for (int q = 0; q < k; ++q) {
                double e = log_alpha[q];
                const double* base_row = tables.base.row(q);
                for (int l = 0; l < k; ++l) e += base_row[l] * (s[l] - ti[l]);
                for (int lm = 0; lm < m; ++lm) {
                    const double* bonus_row = tables.bonus[lm].row(q);
                    const double* gs = gsum.data() + static_cast<std::size_t>(lm) * k;
                    for (int l = 0; l < k; ++l) e += bonus_row[l] * gs[l];
                }
                expo[q] = e;
            }
            double mx = expo[0];
            for (int q = 1; q < k; ++q) mx = std::max(mx, expo[q]);
            double total = 0.0;
            for (int q = 0; q < k; ++q) {
                fresh[q] = std::exp(expo[q] - mx);
                total += fresh[q];
            }
            for (int q = 0; q < k; ++q) {
                const double v = fresh[q] / total;
                change = std::max(change, std::abs(v - ti[q]));
                s[q] += v - ti[q];
                ti[q] = v;
            }
        }
        if (change < tol) {
            ++sweep;
            break;
        }
    }
    return {sweep, change};
}

// ELBO given the per-pair log-mass tables: mixing + pair + entropy terms.
inline double elbo_with_tables(const MultiLayerGraph& g, const Mat& tau,
                               const std::vector<double>& alpha, const EStepTables& tables) {
    const int k = static_cast<int>(tau.cols());
    const PairStats st = stats_from_tau(g, tau);
    double pair = 0.0;
    for (int q = 0; q < k; ++q) {
        for (int l = 0; l < k; ++l) {
            pair += st.w(q, l) * tables.base(q, l);
            for (int lm = 0; lm < g.m(); ++lm) pair += st.y[lm](q, l) * tables.bonus[lm](q, l);
        }
    }
    pair *= 0.5;
    double mixing = 0.0, entropy = 0.0;
    for (std::size_t i = 0; i < tau.rows(); ++i) {
        for (int q = 0; q < k; ++q) {
            const double t = tau(i, q);
            if (t > 0.0) {
                mixing += t * std::log(std::max(alpha[q], 1e-300));
                entropy -= t * std::log(t);
            }
        }
    }
    return mixing + pair + entropy;
}

// Mixing weights from tau column masses with the empty-block floor 1/(10N).
inline std::vector<double> alpha_from_tau(const Mat& tau) {
    const int n = static_cast<int>(tau.rows());
    const int k = static_cast<int>(tau.cols());
    std::vector<double> alpha(k, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int q = 0; q < k; ++q) alpha[q] += tau(i, q);
    }
    double total = 0.0;
    for (int q = 0; q < k; ++q) {
        alpha[q] = alpha[q] < 1e-8 ? 1.0 / (10.0 * n) : alpha[q] / n;
        total += alpha[q];
    }
    for (auto& a : alpha) a /= total;
    return alpha;
}

inline std::vector<double> layer_densities(const MultiLayerGraph& g) {
    const double pairs = 0.5 * g.n * (g.n - 1.0);
    std::vector<double> d;
    for (const auto& layer : g.layers) d.push_back(layer.edge_count() / pairs);
    return d;
}

}  // namespace mlsbm
