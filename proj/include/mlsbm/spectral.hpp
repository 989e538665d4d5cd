#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mlsbm/baselines.hpp"
#include "mlsbm/core.hpp"
#include "mlsbm/graph.hpp"
#include "mlsbm/rng.hpp"
#include "mlsbm/vem_mlsbm.hpp"

namespace mlsbm {

namespace detail {

// Symmetric tridiagonal QL with implicit shifts (EISPACK tql2 lineage).
// d: diagonal (in/out, eigenvalues), e[t]: coupling of d[t] and d[t+1],
// z: accumulates eigenvectors as columns (pass identity).
inline void tql2(std::vector<double>& d, std::vector<double>& e, Mat& z) {
    const int n = static_cast<int>(d.size());
    if (n == 0) return;
    e.resize(n, 0.0);
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (iter++ == 64) throw std::runtime_error("tridiagonal eigensolver stalled");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? r : -r));
                double s = 1.0, c = 1.0, p = 0.0;
                int i = m - 1;
                for (; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int row = 0; row < n; ++row) {
                        f = z(row, i + 1);
                        z(row, i + 1) = s * z(row, i) + c * f;
                        z(row, i) = c * z(row, i) - s * f;
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace detail

struct SpectralEmbedding {
    Mat coords;                      // N x K, columns are eigenvectors
    std::vector<double> eigenvalues; // matching, ordered by value descending
};

// Top-K eigenpairs (algebraically largest) of the regularized normalized
// adjacency (D + reg I)^{-1/2} A (D + reg I)^{-1/2}, via Lanczos with full
// reorthogonalization; Krylov growth continues until the wanted Ritz residuals
// fall below 1e-8 (guaranteed at dimension N). reg < 0 means "mean degree".
// Assortative block signal sits at the top of the spectrum; ordering by
// magnitude instead would pull in the negative noise tail on sparse layers.
inline SpectralEmbedding spectral_embed(const Layer& layer, int n, int k, double reg = -1.0) {
    if (k < 1 || k > n) throw std::invalid_argument("k out of range");
    std::vector<double> deg(n, 0.0);
    for (int i = 0; i < n; ++i) deg[i] = static_cast<double>(layer.adj[i].size());
    if (reg < 0.0) {
        reg = 0.0;
        for (double d : deg) reg += d;
        reg /= n;
    }
    std::vector<double> scale(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double dt = deg[i] + reg;
        scale[i] = dt > 0.0 ? 1.0 / std::sqrt(dt) : 0.0;
    }
    auto matvec = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j : layer.adj[i]) acc += scale[j] * x[j];
            y[i] = scale[i] * acc;
        }
    };

    const double tol = 1e-8;
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;  // beta[j] couples basis[j], basis[j+1]
    Rng rng(0x5eedULL);

    auto normalize = [](std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        s = std::sqrt(s);
        if (s > 0.0) {
            for (double& x : v) x /= s;
        }
        return s;
    };
    auto orthogonalize = [&](std::vector<double>& v) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                double dot = 0.0;
                for (int i = 0; i < n; ++i) dot += b[i] * v[i];
                for (int i = 0; i < n; ++i) v[i] -= dot * b[i];
            }
        }
    };
    auto random_orthonormal = [&]() {
        std::vector<double> v(n);
        for (int attempt = 0; attempt < 64; ++attempt) {
            for (auto& x : v) x = rng.normal();
            orthogonalize(v);
            if (normalize(v) > 1e-8) return v;
        }
        throw std::runtime_error("eigensolver could not extend the basis");
    };

    basis.push_back(random_orthonormal());
    std::vector<double> w(n), d, e;
    Mat small;
    std::vector<int> wanted;
    // Rayleigh-Ritz checks are O(dim^3), so run them at geometrically spaced
    // dimensions rather than every step.
    int next_check = std::min(n, std::max(2 * k, 30));
    while (true) {
        const int j = static_cast<int>(basis.size()) - 1;
        matvec(basis[j], w);
        double a = 0.0;
        for (int i = 0; i < n; ++i) a += basis[j][i] * w[i];
        alpha.push_back(a);
        orthogonalize(w);
        const double b = normalize(w);
        const int dim = static_cast<int>(basis.size());

        if (dim >= k && (dim >= next_check || dim == n)) {
            d = alpha;
            e.assign(dim, 0.0);
            for (int t = 0; t + 1 < dim; ++t) e[t] = beta[t];
            small = Mat(dim, dim);
            for (int t = 0; t < dim; ++t) small(t, t) = 1.0;
            detail::tql2(d, e, small);

            std::vector<int> order(dim);
            for (int t = 0; t < dim; ++t) order[t] = t;
            std::sort(order.begin(), order.end(), [&](int x, int y) { return d[x] > d[y]; });

            bool done = true;
            for (int t = 0; t < k; ++t) {
                if (b * std::abs(small(dim - 1, order[t])) > tol) {
                    done = false;
                    break;
                }
            }
            if (done || dim == n) {
                wanted.assign(order.begin(), order.begin() + k);
                break;
            }
            next_check = std::min(n, dim + std::max(dim / 2, 16));
        }
        if (b < 1e-10) {
            beta.push_back(0.0);
            basis.push_back(random_orthonormal());
        } else {
            beta.push_back(b);
            basis.push_back(w);
        }
    }

    SpectralEmbedding out;
    const int dim = static_cast<int>(basis.size());
    out.coords = Mat(n, k);
    for (int t = 0; t < k && t < static_cast<int>(wanted.size()); ++t) {
        const int col = wanted[t];
        out.eigenvalues.push_back(d[col]);
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int jj = 0; jj < dim; ++jj) acc += small(jj, col) * basis[jj][i];
            out.coords(i, t) = acc;
        }
    }
    while (static_cast<int>(out.eigenvalues.size()) < k) out.eigenvalues.push_back(0.0);
    return out;
}

struct KMeansResult {
    Assignment labels;
    Mat centers;
    double wcss = 0.0;
};

// Lloyd's algorithm with k-means++ seeding and seeded restarts; the best run
// by within-cluster sum of squares wins.
inline KMeansResult kmeans(const Mat& points, int k, int restarts, std::uint64_t seed) {
    const int n = static_cast<int>(points.rows());
    const int dim = static_cast<int>(points.cols());
    if (k < 1 || k > n) throw std::invalid_argument("k out of range");
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");

    auto dist2 = [&](int i, const double* center) {
        double s = 0.0;
        const double* p = points.row(i);
        for (int t = 0; t < dim; ++t) {
            const double diff = p[t] - center[t];
            s += diff * diff;
        }
        return s;
    };

    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < restarts; ++restart) {
        Rng rng(mix_seed(seed, 0x6b6d65616e73ULL, restart));
        Mat centers(k, dim);
        std::vector<double> d2(n, std::numeric_limits<double>::infinity());
        // k-means++ seeding
        int first = static_cast<int>(rng.uniform_int(n));
        for (int t = 0; t < dim; ++t) centers(0, t) = points(first, t);
        for (int c = 1; c < k; ++c) {
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                d2[i] = std::min(d2[i], dist2(i, centers.row(c - 1)));
                total += d2[i];
            }
            int chosen = 0;
            if (total > 0.0) {
                const double target = rng.u01() * total;
                double acc = 0.0;
                for (int i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (acc >= target) {
                        chosen = i;
                        break;
                    }
                }
            } else {
                chosen = static_cast<int>(rng.uniform_int(n));
            }
            for (int t = 0; t < dim; ++t) centers(c, t) = points(chosen, t);
        }

        Assignment labels(n, 0);
        std::vector<int> sizes(k);
        for (int iter = 0; iter < 100; ++iter) {
            bool changed = false;
            for (int i = 0; i < n; ++i) {
                int bestc = 0;
                double bestd = dist2(i, centers.row(0));
                for (int c = 1; c < k; ++c) {
                    const double dd = dist2(i, centers.row(c));
                    if (dd < bestd) {
                        bestd = dd;
                        bestc = c;
                    }
                }
                if (bestc != labels[i]) {
                    labels[i] = bestc;
                    changed = true;
                }
            }
            centers.fill(0.0);
            std::fill(sizes.begin(), sizes.end(), 0);
            for (int i = 0; i < n; ++i) {
                ++sizes[labels[i]];
                for (int t = 0; t < dim; ++t) centers(labels[i], t) += points(i, t);
            }
            for (int c = 0; c < k; ++c) {
                if (sizes[c] > 0) {
                    for (int t = 0; t < dim; ++t) centers(c, t) /= sizes[c];
                } else {
                    // reseed an empty cluster at the point farthest from its center
                    int far = 0;
                    double fard = -1.0;
                    for (int i = 0; i < n; ++i) {
                        const double dd = dist2(i, centers.row(labels[i]));
                        if (dd > fard) {
                            fard = dd;
                            far = i;
                        }
                    }
                    for (int t = 0; t < dim; ++t) centers(c, t) = points(far, t);
                    changed = true;
                }
            }
            if (!changed) break;
        }
        double wcss = 0.0;
        for (int i = 0; i < n; ++i) wcss += dist2(i, centers.row(labels[i]));
        if (wcss < best.wcss) {
            best.wcss = wcss;
            best.labels = std::move(labels);
            best.centers = std::move(centers);
        }
    }
    return best;
}

// Soft initial assignment from one layer: regularized spectral embedding,
// k-means on row-normalized coordinates, a single-layer variational refine,
// then softened hard labels. Nodes isolated in the chosen layer get uniform rows.
inline Mat spectral_init(const MultiLayerGraph& g, int layer_index, int k, std::uint64_t seed,
                         const FitOptions& opts = {}) {
    if (layer_index < 0 || layer_index >= g.m()) throw std::invalid_argument("layer index out of range");
    if (k < 1 || k > g.n) throw std::invalid_argument("k out of range");
    const Layer& layer = g.layers[layer_index];
    if (k == 1) return Mat(g.n, 1, 1.0);

    SpectralEmbedding emb = spectral_embed(layer, g.n, k);
    Mat pts = emb.coords;
    for (int i = 0; i < g.n; ++i) {
        double s = 0.0;
        for (int t = 0; t < k; ++t) s += pts(i, t) * pts(i, t);
        s = std::sqrt(s);
        if (s > 0.0) {
            for (int t = 0; t < k; ++t) pts(i, t) /= s;
        }
    }
    const KMeansResult km = kmeans(pts, k, 10, seed);
    const MlsbmFit refined =
        fit_single_layer_sbm(g, layer_index, k, soften_labels(km.labels, k), opts);
    Mat tau = soften_labels(refined.z_hat, k);
    for (int i = 0; i < g.n; ++i) {
        if (layer.adj[i].empty()) {
            for (int q = 0; q < k; ++q) tau(i, q) = 1.0 / k;
        }
    }
    return tau;
}

}  // namespace mlsbm
