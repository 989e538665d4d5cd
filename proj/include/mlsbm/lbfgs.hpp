#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <vector>

namespace mlsbm {

struct OptimOptions {
    int memory = 10;
    double armijo_c = 1e-4;
    double grad_tol = 1e-6;  // infinity norm
    int max_iter = 200;
};

struct OptimResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
    double grad_inf_norm = 0.0;
};

// Objective callback: fills grad, returns f(x).
using Objective = std::function<double(const std::vector<double>&, std::vector<double>&)>;

// Limited-memory BFGS ascent with Armijo backtracking (step halving from 1).
// Internally minimizes -f so the update formulas are the textbook ones.
inline OptimResult lbfgs_maximize(const Objective& f, std::vector<double> x0,
                                  const OptimOptions& opts = {}) {
    const std::size_t n = x0.size();
    auto neg = [&f](const std::vector<double>& x, std::vector<double>& g) {
        const double v = f(x, g);
        for (auto& gi : g) gi = -gi;
        return -v;
    };

    auto inf_norm = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double vi : v) m = std::max(m, std::abs(vi));
        return m;
    };
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };

    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    std::vector<double> x = std::move(x0);
    std::vector<double> g(n), g_new(n), d(n), x_new(n);
    double fx = neg(x, g);

    OptimResult out;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        if (inf_norm(g) < opts.grad_tol) {
            out.converged = true;
            break;
        }

        // two-loop recursion: d = -H g
        d = g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t h = s_hist.size(); h-- > 0;) {
            alpha[h] = rho_hist[h] * dot(s_hist[h], d);
            for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[h] * y_hist[h][i];
        }
        if (!s_hist.empty()) {
            const double gamma = dot(s_hist.back(), y_hist.back()) /
                                 std::max(1e-300, dot(y_hist.back(), y_hist.back()));
            for (auto& di : d) di *= gamma;
        }
        for (std::size_t h = 0; h < s_hist.size(); ++h) {
            const double beta = rho_hist[h] * dot(y_hist[h], d);
            for (std::size_t i = 0; i < n; ++i) d[i] += s_hist[h][i] * (alpha[h] - beta);
        }
        for (auto& di : d) di = -di;

        double gd = dot(g, d);
        if (gd >= 0.0) {  // not a descent direction; fall back to steepest
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            gd = dot(g, d);
        }

        double t = 1.0;
        double f_new = 0.0;
        bool accepted = false;
        while (t >= 1e-16) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + t * d[i];
            f_new = neg(x_new, g_new);
            if (f_new <= fx + opts.armijo_c * t * gd) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;  // stalled below step floor

        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s)) * std::sqrt(dot(y, y))) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opts.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x.swap(x_new);
        g.swap(g_new);
        fx = f_new;
    }

    out.grad_inf_norm = inf_norm(g);
    if (!out.converged) out.converged = out.grad_inf_norm < opts.grad_tol;
    out.x = std::move(x);
    out.f = -fx;
    out.iterations = iter;
    return out;
}

}  // namespace mlsbm
