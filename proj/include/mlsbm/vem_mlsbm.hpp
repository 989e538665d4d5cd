#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlsbm/blockmodel.hpp"
#include "mlsbm/vem_common.hpp"

namespace mlsbm {

inline double elbo_mlsbm(const MultiLayerGraph& g, const Mat& tau,
                         const std::vector<double>& alpha, const std::vector<Mat>& pi) {
    return elbo_with_tables(g, tau, alpha, mlsbm_tables(pi));
}

// One E-step: fixed-point sweeps of the tau update until the max row change
// drops below tol or s_max sweeps run.
inline Mat e_step_mlsbm(const MultiLayerGraph& g, Mat tau, const std::vector<double>& alpha,
                        const std::vector<Mat>& pi, int s_max = 50, double tol = 1e-5) {
    std::vector<double> log_alpha(alpha.size());
    for (std::size_t q = 0; q < alpha.size(); ++q) {
        log_alpha[q] = std::log(std::max(alpha[q], 1e-300));
    }
    const EStepTables tables = mlsbm_tables(pi);
    e_step_sweeps(g, tau, log_alpha, tables, s_max, tol);
    return tau;
}

// Closed-form M-step: alpha from column masses, pi from tau-weighted block
// edge shares. Blocks with (near) no pair mass fall back to the layer density.
inline MLSBMParams m_step_mlsbm(const MultiLayerGraph& g, const Mat& tau) {
    const int k = static_cast<int>(tau.cols());
    const PairStats st = stats_from_tau(g, tau);
    const std::vector<double> density = layer_densities(g);

    MLSBMParams params;
    params.alpha = alpha_from_tau(tau);
    std::vector<double> col_mass(k, 0.0);
    for (std::size_t i = 0; i < tau.rows(); ++i) {
        for (int q = 0; q < k; ++q) col_mass[q] += tau(i, q);
    }
    for (int lm = 0; lm < g.m(); ++lm) {
        Mat p(k, k);
        for (int q = 0; q < k; ++q) {
            for (int l = 0; l < k; ++l) {
                const bool degenerate =
                    col_mass[q] < 1e-8 || col_mass[l] < 1e-8 || st.w(q, l) < 1e-12;
                p(q, l) = degenerate ? density[lm] : st.y[lm](q, l) / st.w(q, l);
            }
        }
        params.pi.push_back(std::move(p));
    }
    return params;
}

struct MlsbmFit {
    MLSBMParams params;
    VariationalState state;
    Assignment z_hat;
};

// Variational EM for the unrestricted model. Alternates E-step sweeps with
// the closed-form M-step, records the ELBO after every outer iteration, and
// returns the best-ELBO iterate.
inline MlsbmFit fit_mlsbm(const MultiLayerGraph& g, int k, Mat init_tau,
                          const FitOptions& opts = {}) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (k > g.n) throw std::invalid_argument("k > n");
    if (g.m() < 1) throw std::invalid_argument("graph has no layers");
    validate_init_tau(init_tau, g.n, k);

    Mat tau = std::move(init_tau);
    MLSBMParams params = m_step_mlsbm(g, tau);
    double elbo = elbo_mlsbm(g, tau, params.alpha, params.pi);

    MlsbmFit fit;
    fit.state.elbo_trace.push_back(elbo);
    fit.params = params;
    Mat best_tau = tau;
    double best_elbo = elbo;

    std::vector<double> log_alpha(k);
    for (int t = 0; t < opts.t_max; ++t) {
        for (int q = 0; q < k; ++q) log_alpha[q] = std::log(std::max(params.alpha[q], 1e-300));
        const EStepTables tables = mlsbm_tables(params.pi);
        e_step_sweeps(g, tau, log_alpha, tables, opts.s_max, opts.estep_tol);

        MLSBMParams next = m_step_mlsbm(g, tau);
        const double next_elbo = elbo_mlsbm(g, tau, next.alpha, next.pi);
        double recorded;
        // The closed form cannot lower the ELBO; the empty-block repair can.
        if (next_elbo >= elbo - 1e-8) {
            params = std::move(next);
            recorded = next_elbo;
        } else {
            recorded = elbo_mlsbm(g, tau, params.alpha, params.pi);
        }
        fit.state.elbo_trace.push_back(recorded);
        fit.state.iterations = t + 1;
        if (recorded > best_elbo) {
            best_elbo = recorded;
            best_tau = tau;
            fit.params = params;
        }
        if (std::abs(recorded - elbo) / (1.0 + std::abs(recorded)) < opts.elbo_rel_tol) {
            fit.state.converged = true;
            elbo = recorded;
            break;
        }
        elbo = recorded;
    }
    fit.state.tau = std::move(best_tau);
    fit.z_hat = hard_labels(fit.state.tau);
    return fit;
}

}  // namespace mlsbm
