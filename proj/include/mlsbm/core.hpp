#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlsbm {

// Probabilities are clamped to this range before entering any log.
constexpr double kProbFloor = 1e-12;

inline double clamp_prob(double p) {
    return std::min(1.0 - kProbFloor, std::max(kProbFloor, p));
}

// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double logit(double p) {
    p = clamp_prob(p);
    return std::log(p) - std::log1p(-p);
}

// x*log(x) with the 0*log(0) = 0 convention.
inline double xlogx(double x) {
    return x > 0.0 ? x * std::log(x) : 0.0;
}

// x*log(p) where x is a (possibly fractional) count; x = 0 contributes 0.
inline double xlogp(double x, double p) {
    return x != 0.0 ? x * std::log(clamp_prob(p)) : 0.0;
}

// Minimal row-major dense matrix. Enough for tau tables and K x K blocks;
// not a linear algebra library on purpose.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Node-to-block assignment, 0-based labels. File formats are 1-based; IO
// converts at the boundary.
using Assignment = std::vector<int>;

inline void check_labels(const Assignment& z, int k) {
    for (int zi : z) {
        if (zi < 0 || zi >= k) {
            throw std::invalid_argument("label out of range [1," + std::to_string(k) +
                                        "]: " + std::to_string(zi + 1));
        }
    }
}

// Index of the row maximum; ties resolve to the lowest index.
inline int argmax_row(const double* row, std::size_t k) {
    int best = 0;
    for (std::size_t q = 1; q < k; ++q) {
        if (row[q] > row[best]) best = static_cast<int>(q);
    }
    return best;
}

}  // namespace mlsbm
