#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlsbm/core.hpp"
#include "mlsbm/hungarian.hpp"

namespace mlsbm {

// Contingency counts: entry (q,l) = #{i : z1_i = q, z2_i = l}.
inline std::vector<std::vector<double>> contingency(const Assignment& z1, const Assignment& z2,
                                                    int k1, int k2) {
    if (z1.size() != z2.size()) throw std::invalid_argument("label vectors differ in length");
    check_labels(z1, k1);
    check_labels(z2, k2);
    std::vector<std::vector<double>> c(k1, std::vector<double>(k2, 0.0));
    for (std::size_t i = 0; i < z1.size(); ++i) c[z1[i]][z2[i]] += 1.0;
    return c;
}

// Normalized mutual information with the sqrt(H1*H2) normalizer, natural logs.
// Both partitions trivial (zero entropy) counts as perfect agreement.
inline double nmi(const Assignment& z1, const Assignment& z2, int k1, int k2) {
    const double n = static_cast<double>(z1.size());
    if (n == 0.0) throw std::invalid_argument("empty label vectors");
    const auto c = contingency(z1, z2, k1, k2);
    std::vector<double> p1(k1, 0.0), p2(k2, 0.0);
    for (int q = 0; q < k1; ++q) {
        for (int l = 0; l < k2; ++l) {
            p1[q] += c[q][l] / n;
            p2[l] += c[q][l] / n;
        }
    }
    double h1 = 0.0, h2 = 0.0, mi = 0.0;
    for (int q = 0; q < k1; ++q) h1 -= xlogx(p1[q]);
    for (int l = 0; l < k2; ++l) h2 -= xlogx(p2[l]);
    for (int q = 0; q < k1; ++q) {
        for (int l = 0; l < k2; ++l) {
            const double pj = c[q][l] / n;
            if (pj > 0.0) mi += pj * std::log(pj / (p1[q] * p2[l]));
        }
    }
    if (h1 <= 0.0 && h2 <= 0.0) return 1.0;
    if (h1 <= 0.0 || h2 <= 0.0) return 0.0;
    return mi / std::sqrt(h1 * h2);
}

inline double nmi(const Assignment& z1, const Assignment& z2, int k) {
    return nmi(z1, z2, k, k);
}

// Maps every estimated cluster to its modal true label (ties to the lowest
// label) and counts the nodes whose true label disagrees with the map.
inline int misclustered_count(const Assignment& z_true, const Assignment& z_hat, int k_true,
                              int k_hat) {
    const auto c = contingency(z_hat, z_true, k_hat, k_true);
    double matched = 0.0;
    for (int q = 0; q < k_hat; ++q) {
        double best = 0.0;
        for (int l = 0; l < k_true; ++l) best = std::max(best, c[q][l]);
        matched += best;
    }
    return static_cast<int>(z_true.size() - matched + 0.5);
}

// Correct classification rate under the same modal-label map.
inline double ccr(const Assignment& z_true, const Assignment& z_hat, int k_true, int k_hat) {
    if (z_true.empty()) throw std::invalid_argument("empty label vectors");
    return 1.0 - static_cast<double>(misclustered_count(z_true, z_hat, k_true, k_hat)) /
                     static_cast<double>(z_true.size());
}

inline double ccr(const Assignment& z_true, const Assignment& z_hat, int k) {
    return ccr(z_true, z_hat, k, k);
}

// Minimum Hamming fraction over label permutations, solved as a maximum
// agreement assignment on the K x K contingency table.
inline double misclustering_rate(const Assignment& z_true, const Assignment& z_hat, int k) {
    const auto c = contingency(z_true, z_hat, k, k);
    const auto perm = hungarian_max(c);
    double agreement = 0.0;
    for (int q = 0; q < k; ++q) {
        if (perm[q] >= 0 && perm[q] < k) agreement += c[q][perm[q]];
    }
    return (static_cast<double>(z_true.size()) - agreement) / static_cast<double>(z_true.size());
}

}  // namespace mlsbm
