#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mlsbm/core.hpp"
#include "mlsbm/graph.hpp"
#include "mlsbm/rng.hpp"

namespace mlsbm {

// Sentinel for an infinite divergence so downstream rate formulas degrade to 0.
constexpr double kDivergenceInf = 1e12;

// Renyi divergence of order 1/2 between Bernoulli(a/n) and Bernoulli(b/n):
//   -2 log( sqrt(ab)/n + sqrt(1-a/n) sqrt(1-b/n) )
inline double renyi_half(double a, double b, double n) {
    if (n <= 0.0) throw std::invalid_argument("n must be positive");
    if (a < 0.0 || b < 0.0 || a > n || b > n) {
        throw std::invalid_argument("a, b must lie in [0, n]");
    }
    const double arg = std::sqrt(a * b) / n + std::sqrt(1.0 - a / n) * std::sqrt(1.0 - b / n);
    if (arg <= 1e-300) return kDivergenceInf;
    return -2.0 * std::log(arg);
}

struct DivergenceProfile {
    std::vector<double> per_layer;  // I^(m)
    double sum = 0.0;               // sum_m I^(m)
    double aggregate = 0.0;         // I computed on (sum a, sum b)
};

// Per-layer and aggregate divergences for within/between intensity vectors.
// The aggregate uses the summed intensities, so they must still fit in [0, n].
inline DivergenceProfile divergence_profile(const std::vector<double>& a,
                                            const std::vector<double>& b, double n) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("a, b must match and be non-empty");
    double sa = 0.0, sb = 0.0;
    DivergenceProfile out;
    for (std::size_t m = 0; m < a.size(); ++m) {
        out.per_layer.push_back(renyi_half(a[m], b[m], n));
        out.sum += out.per_layer.back();
        sa += a[m];
        sb += b[m];
    }
    if (sa > n || sb > n) {
        throw std::invalid_argument("summed intensities exceed n; aggregate divergence undefined");
    }
    out.aggregate = renyi_half(sa, sb, n);
    return out;
}

enum class RateModel { multilayer, aggregate };

// Minimax misclustering rate exponent: exp(-n I / 2) for K = 2 and
// exp(-n I / (s K)) for K >= 3, where I is the summed per-layer divergence
// (multilayer) or the aggregate divergence. s defaults to 1 and must lie in
// [1, sqrt(5/3)].
inline double minimax_rate(const std::vector<double>& a, const std::vector<double>& b, double n,
                           int k, RateModel model, double s = 1.0) {
    if (k < 2) throw std::invalid_argument("k must be >= 2");
    if (s < 1.0 || s > std::sqrt(5.0 / 3.0) + 1e-12) {
        throw std::invalid_argument("s must lie in [1, sqrt(5/3)]");
    }
    const DivergenceProfile prof = divergence_profile(a, b, n);
    const double total = model == RateModel::multilayer ? prof.sum : prof.aggregate;
    const double exponent = k == 2 ? n * total / 2.0 : n * total / (s * k);
    return std::exp(-exponent);
}

struct ThresholdResult {
    double margin = 0.0;
    bool strong = false;  // margin strictly above 1
};

// Exact-recovery margin in the logarithmic-degree regime: layers have
// within/between intensities alpha1^(m) log n and alpha2^(m) log n.
// multilayer: sum_m (sqrt(alpha1) - sqrt(alpha2)) / sqrt(K) > 1
// aggregate:  (sqrt(sum alpha1) - sqrt(sum alpha2)) / sqrt(K) > 1
inline ThresholdResult threshold_strong(const std::vector<double>& alpha1,
                                        const std::vector<double>& alpha2, int k,
                                        RateModel model) {
    if (alpha1.size() != alpha2.size() || alpha1.empty()) {
        throw std::invalid_argument("alpha vectors must match and be non-empty");
    }
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    double margin = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t m = 0; m < alpha1.size(); ++m) {
        if (alpha2[m] < 0.0 || alpha1[m] < alpha2[m]) {
            throw std::invalid_argument("need alpha1 >= alpha2 >= 0 per layer");
        }
        margin += std::sqrt(alpha1[m]) - std::sqrt(alpha2[m]);
        s1 += alpha1[m];
        s2 += alpha2[m];
    }
    ThresholdResult out;
    out.margin = (model == RateModel::multilayer ? margin : std::sqrt(s1) - std::sqrt(s2)) /
                 std::sqrt(static_cast<double>(k));
    out.strong = out.margin > 1.0;
    return out;
}

// ---- penalized likelihood oracle ----

struct OracleWeights {
    std::vector<double> c;  // per-layer edge reward
    std::vector<double> k;  // per-layer within-pair penalty
};

// c^(m) = log[a(1-b/n) / (b(1-a/n))], k^(m) = log[(1-b/n)/(1-a/n)]; needs 0 < b <= a < n.
inline OracleWeights oracle_weights(const std::vector<double>& a, const std::vector<double>& b,
                                    double n) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("a, b must match");
    OracleWeights w;
    for (std::size_t m = 0; m < a.size(); ++m) {
        if (!(b[m] > 0.0) || a[m] < b[m] || a[m] >= n) {
            throw std::invalid_argument("need 0 < b <= a < n");
        }
        w.c.push_back(std::log(a[m] * (1.0 - b[m] / n) / (b[m] * (1.0 - a[m] / n))));
        w.k.push_back(std::log((1.0 - b[m] / n) / (1.0 - a[m] / n)));
    }
    return w;
}

// T(z) = sum_m sum_{i<j, z_i=z_j} [ c^(m) A_ij^(m) - k^(m) ].
inline double oracle_T(const MultiLayerGraph& g, const Assignment& z,
                       const std::vector<double>& a, const std::vector<double>& b) {
    if (static_cast<int>(z.size()) != g.n) throw std::invalid_argument("z size != n");
    if (static_cast<int>(a.size()) != g.m()) throw std::invalid_argument("a size != layer count");
    const OracleWeights w = oracle_weights(a, b, g.n);
    int k = 0;
    for (int zi : z) k = std::max(k, zi + 1);
    std::vector<double> sizes(k, 0.0);
    for (int zi : z) sizes[zi] += 1.0;
    double within_pairs = 0.0;
    for (double s : sizes) within_pairs += 0.5 * s * (s - 1.0);
    double t = 0.0;
    for (int m = 0; m < g.m(); ++m) {
        double within_edges = 0.0;
        for (const auto& [i, j] : g.layers[m].edges) {
            if (z[i] == z[j]) within_edges += 1.0;
        }
        t += w.c[m] * within_edges - w.k[m] * within_pairs;
    }
    return t;
}

enum class OracleMode { exhaustive, local };

struct OracleMaxResult {
    Assignment z;
    double t = 0.0;
};

namespace detail {

// Greedy single-node moves until a full pass makes no strict improvement.
inline double oracle_local_pass(const MultiLayerGraph& g, const OracleWeights& w, int k,
                                Assignment& z) {
    const int n = g.n;
    std::vector<double> sizes(k, 0.0);
    for (int zi : z) sizes[zi] += 1.0;
    double ksum = 0.0;
    for (double km : w.k) ksum += km;

    bool improved = true;
    std::vector<double> gain(k);
    while (improved) {
        improved = false;
        for (int i = 0; i < n; ++i) {
            // edge reward toward each block, summed over layers with weights
            std::fill(gain.begin(), gain.end(), 0.0);
            for (int m = 0; m < g.m(); ++m) {
                for (int j : g.layers[m].adj[i]) gain[z[j]] += w.c[m];
            }
            const int cur = z[i];
            // delta of moving i from cur to q:
            //   edge part: gain[q] - gain[cur]
            //   pair part: -ksum * (sizes[q] - (sizes[cur] - 1))
            double best_delta = 0.0;
            int best_q = cur;
            for (int q = 0; q < k; ++q) {
                if (q == cur) continue;
                const double delta =
                    gain[q] - gain[cur] - ksum * (sizes[q] - (sizes[cur] - 1.0));
                if (delta > best_delta + 1e-12) {
                    best_delta = delta;
                    best_q = q;
                }
            }
            if (best_q != cur) {
                sizes[cur] -= 1.0;
                sizes[best_q] += 1.0;
                z[i] = best_q;
                improved = true;
            }
        }
    }
    double within_pairs = 0.0;
    for (double s : sizes) within_pairs += 0.5 * s * (s - 1.0);
    double t = -ksum * within_pairs;
    for (int m = 0; m < g.m(); ++m) {
        for (const auto& [i, j] : g.layers[m].edges) {
            if (z[i] == z[j]) t += w.c[m];
        }
    }
    return t;
}

}  // namespace detail

// Maximizes T over assignments. Exhaustive mode enumerates labelings up to
// label permutation (canonical first-occurrence form) and requires
// K^N / K! <= 1e6; local mode is best-of-10 seeded random restarts of greedy
// single-node moves.
inline OracleMaxResult oracle_maximize_T(const MultiLayerGraph& g, int k,
                                         const std::vector<double>& a,
                                         const std::vector<double>& b, OracleMode mode,
                                         std::uint64_t seed = 0) {
    if (k < 1 || k > g.n) throw std::invalid_argument("k out of range");
    const OracleWeights w = oracle_weights(a, b, g.n);
    OracleMaxResult best;
    best.t = -std::numeric_limits<double>::infinity();

    if (mode == OracleMode::exhaustive) {
        double states = std::pow(static_cast<double>(k), static_cast<double>(g.n));
        for (int f = 2; f <= k; ++f) states /= f;
        if (states > 1e6) {
            throw std::invalid_argument("exhaustive search budget exceeded (K^N/K! > 1e6)");
        }
        // canonical labelings: z[0] = 0, z[i] <= 1 + max(z[0..i-1]), labels < k
        Assignment z(g.n, 0);
        std::function<void(int, int)> rec = [&](int pos, int maxlab) {
            if (pos == g.n) {
                const double t = oracle_T(g, z, a, b);
                if (t > best.t) {
                    best.t = t;
                    best.z = z;
                }
                return;
            }
            const int cap = std::min(k - 1, maxlab + 1);
            for (int lab = 0; lab <= cap; ++lab) {
                z[pos] = lab;
                rec(pos + 1, std::max(maxlab, lab));
            }
        };
        rec(1, 0);
        return best;
    }

    for (int restart = 0; restart < 10; ++restart) {
        Rng rng(mix_seed(seed, 0x6f7261636cULL, restart));
        Assignment z(g.n);
        for (int i = 0; i < g.n; ++i) z[i] = static_cast<int>(rng.uniform_int(k));
        const double t = detail::oracle_local_pass(g, w, k, z);
        if (t > best.t) {
            best.t = t;
            best.z = std::move(z);
        }
    }
    return best;
}

}  // namespace mlsbm
