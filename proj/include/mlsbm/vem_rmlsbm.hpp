#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlsbm/restricted.hpp"
#include "mlsbm/vem_common.hpp"

namespace mlsbm {

inline double elbo_rmlsbm(const MultiLayerGraph& g, const Mat& tau,
                          const std::vector<double>& alpha, const RMLSBMParams& params) {
    return elbo_with_tables(g, tau, alpha, rmlsbm_tables(params));
}

inline Mat e_step_rmlsbm(const MultiLayerGraph& g, Mat tau, const std::vector<double>& alpha,
                         const RMLSBMParams& params, int s_max = 50, double tol = 1e-5) {
    std::vector<double> log_alpha(alpha.size());
    for (std::size_t q = 0; q < alpha.size(); ++q) {
        log_alpha[q] = std::log(std::max(alpha[q], 1e-300));
    }
    const EStepTables tables = rmlsbm_tables(params);
    e_step_sweeps(g, tau, log_alpha, tables, s_max, tol);
    return tau;
}

// Gradient of the variational objective in (pi, beta) at the given tau.
struct RmlsbmGradient {
    Mat d_pi;                   // entry (q,l) = derivative wrt the single parameter pi_ql
    std::vector<double> d_beta;
};

inline RmlsbmGradient m_step_gradients(const MultiLayerGraph& g, const Mat& tau,
                                       const RMLSBMParams& params) {
    const PairStats st = stats_from_tau(g, tau);
    std::vector<double> grad;
    restricted_objective(st, pack_params(params), &grad);
    const int k = st.k();
    RmlsbmGradient out;
    out.d_pi = Mat(k, k);
    int idx = 0;
    for (int q = 0; q < k; ++q) {
        for (int l = q; l < k; ++l, ++idx) {
            out.d_pi(q, l) = grad[idx];
            out.d_pi(l, q) = grad[idx];
        }
    }
    out.d_beta.assign(grad.begin() + idx, grad.end());
    return out;
}

// Restricted M-step: alpha in closed form, (pi, beta) by warm-started L-BFGS
// ascent, then recentering (sum beta = 0) and the parameter box. The step is
// kept only if it does not lower the pair objective (the clamp can).
inline std::pair<std::vector<double>, RMLSBMParams> m_step_rmlsbm(
    const MultiLayerGraph& g, const Mat& tau, const RMLSBMParams& warm,
    const OptimOptions& opts = {}) {
    const PairStats st = stats_from_tau(g, tau);
    RMLSBMParams fitted = maximize_restricted(st, warm, opts).params;
    const std::vector<double> x_new = pack_params(fitted);
    const std::vector<double> x_old = pack_params(warm);
    if (restricted_objective(st, x_new, nullptr) <
        restricted_objective(st, x_old, nullptr)) {
        fitted = warm;
    }
    return {alpha_from_tau(tau), fitted};
}

struct RmlsbmFit {
    RMLSBMParams params;
    std::vector<double> alpha;
    VariationalState state;
    Assignment z_hat;
};

// Variational EM for the restricted model. Same loop shape as the
// unrestricted fitter; the M-step optimizer warm-starts from the previous
// parameters, the first one from moment estimates on the initial tau.
inline RmlsbmFit fit_rmlsbm(const MultiLayerGraph& g, int k, Mat init_tau,
                            const FitOptions& opts = {}) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (k > g.n) throw std::invalid_argument("k > n");
    if (g.m() < 1) throw std::invalid_argument("graph has no layers");
    validate_init_tau(init_tau, g.n, k);

    Mat tau = std::move(init_tau);
    PairStats st = stats_from_tau(g, tau);
    RMLSBMParams params = maximize_restricted(st, moment_init(st), opts.mstep).params;
    std::vector<double> alpha = alpha_from_tau(tau);
    double elbo = elbo_rmlsbm(g, tau, alpha, params);

    RmlsbmFit fit;
    fit.state.elbo_trace.push_back(elbo);
    fit.params = params;
    fit.alpha = alpha;
    Mat best_tau = tau;
    double best_elbo = elbo;

    std::vector<double> log_alpha(k);
    for (int t = 0; t < opts.t_max; ++t) {
        for (int q = 0; q < k; ++q) log_alpha[q] = std::log(std::max(alpha[q], 1e-300));
        const EStepTables tables = rmlsbm_tables(params);
        e_step_sweeps(g, tau, log_alpha, tables, opts.s_max, opts.estep_tol);

        auto [next_alpha, next_params] = m_step_rmlsbm(g, tau, params, opts.mstep);
        const double next_elbo = elbo_rmlsbm(g, tau, next_alpha, next_params);
        double recorded;
        if (next_elbo >= elbo - 1e-8) {
            params = std::move(next_params);
            alpha = std::move(next_alpha);
            recorded = next_elbo;
        } else {
            recorded = elbo_rmlsbm(g, tau, alpha, params);
        }
        fit.state.elbo_trace.push_back(recorded);
        fit.state.iterations = t + 1;
        if (recorded > best_elbo) {
            best_elbo = recorded;
            best_tau = tau;
            fit.params = params;
            fit.alpha = alpha;
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
