#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "mlsbm/vem_mlsbm.hpp"
#include "mlsbm/vem_rmlsbm.hpp"

using namespace mlsbm;

namespace {

std::vector<double> random_alpha(int k, Rng& rng) {
    std::vector<double> alpha(k);
    double total = 0.0;
    for (int q = 0; q < k; ++q) {
        alpha[q] = rng.uniform(0.2, 1.0);
        total += alpha[q];
    }
    for (auto& a : alpha) a /= total;
    return alpha;
}

std::vector<Mat> random_pi_layers(int k, int m, Rng& rng) {
    std::vector<Mat> pi;
    for (int lm = 0; lm < m; ++lm) {
        Mat p(k, k);
        for (int q = 0; q < k; ++q) {
            for (int l = q; l < k; ++l) {
                p(q, l) = rng.uniform(0.05, 0.95);
                p(l, q) = p(q, l);
            }
        }
        pi.push_back(std::move(p));
    }
    return pi;
}

RMLSBMParams random_restricted(int k, int m, Rng& rng) {
    RMLSBMParams params;
    params.pi = Mat(k, k);
    for (int q = 0; q < k; ++q) {
        for (int l = q; l < k; ++l) {
            params.pi(q, l) = rng.uniform(-2.0, 2.0);
            params.pi(l, q) = params.pi(q, l);
        }
    }
    double s = 0.0;
    params.beta.resize(m);
    for (int lm = 0; lm < m; ++lm) {
        params.beta[lm] = rng.uniform(-1.0, 1.0);
        s += params.beta[lm];
    }
    for (auto& b : params.beta) b -= s / m;
    return params;
}

MultiLayerGraph random_graph(int n, int m, Rng& rng, double p = 0.3) {
    MultiLayerGraph g;
    g.n = n;
    for (int lm = 0; lm < m; ++lm) {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (rng.bernoulli(p)) edges.emplace_back(i, j);
            }
        }
        g.layers.push_back(make_layer(n, std::move(edges)));
    }
    return g;
}

// Sequential mean-field row updates written the slow way: each row is
// recomputed from the full Bernoulli log-mass against the current tau,
// including rows already updated earlier in the same sweep.
Mat naive_sweep(const MultiLayerGraph& g, Mat tau, const std::vector<double>& alpha,
                const std::vector<Mat>& pi) {
    const auto adj = testref::dense_adj(g);
    const int n = g.n;
    const int k = static_cast<int>(tau.cols());
    for (int i = 0; i < n; ++i) {
        std::vector<double> expo(k);
        for (int q = 0; q < k; ++q) {
            double e = std::log(alpha[q]);
            for (int m = 0; m < g.m(); ++m) {
                for (int j = 0; j < n; ++j) {
                    if (j == i) continue;
                    for (int l = 0; l < k; ++l) {
                        e += tau(j, l) * testref::bern_logmass(adj[m](i, j), pi[m](q, l));
                    }
                }
            }
            expo[q] = e;
        }
        const double mx = *std::max_element(expo.begin(), expo.end());
        double total = 0.0;
        for (int q = 0; q < k; ++q) {
            expo[q] = std::exp(expo[q] - mx);
            total += expo[q];
        }
        for (int q = 0; q < k; ++q) tau(i, q) = expo[q] / total;
    }
    return tau;
}

bool same_partition(const Assignment& a, const Assignment& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("label softening spreads rho across the other classes", "[vem]") {
    const Assignment z = {0, 2, 1};
    const Mat tau = soften_labels(z, 3, 0.1);
    CHECK(tau(0, 0) == Catch::Approx(0.9));
    CHECK(tau(0, 1) == Catch::Approx(0.05));
    CHECK(tau(0, 2) == Catch::Approx(0.05));
    CHECK(tau(1, 2) == Catch::Approx(0.9));
    CHECK(hard_labels(tau) == z);

    const Mat one_class = soften_labels({0, 0}, 1, 0.1);
    CHECK(one_class(0, 0) == 1.0);
    CHECK(one_class(1, 0) == 1.0);
}

TEST_CASE("init tau validation normalizes rows and rejects bad input", "[vem]") {
    Mat tau(2, 2);
    tau(0, 0) = 2.0;
    tau(0, 1) = 2.0;
    tau(1, 0) = 1.0;
    tau(1, 1) = 3.0;
    validate_init_tau(tau, 2, 2);
    CHECK(tau(0, 0) == Catch::Approx(0.5));
    CHECK(tau(1, 1) == Catch::Approx(0.75));

    Mat wrong(2, 3, 1.0);
    CHECK_THROWS_AS(validate_init_tau(wrong, 2, 2), std::invalid_argument);
    Mat negative(2, 2, 1.0);
    negative(0, 0) = -0.1;
    CHECK_THROWS_AS(validate_init_tau(negative, 2, 2), std::invalid_argument);
    Mat zero_row(2, 2, 0.0);
    zero_row(0, 0) = 1.0;
    CHECK_THROWS_AS(validate_init_tau(zero_row, 2, 2), std::invalid_argument);
}

TEST_CASE("mixing weights come from column masses with an empty-block floor", "[vem]") {
    Mat tau(4, 2, 0.0);
    for (int i = 0; i < 4; ++i) tau(i, 0) = 1.0;
    tau(3, 0) = 0.25;
    tau(3, 1) = 0.75;
    const auto alpha = alpha_from_tau(tau);
    CHECK(alpha[0] == Catch::Approx(3.25 / 4.0));
    CHECK(alpha[1] == Catch::Approx(0.75 / 4.0));

    Mat hollow(4, 2, 0.0);
    for (int i = 0; i < 4; ++i) hollow(i, 0) = 1.0;
    const auto floored = alpha_from_tau(hollow);
    const double lo = 1.0 / 40.0;
    CHECK(floored[1] == Catch::Approx(lo / (1.0 + lo)));
    CHECK(floored[0] + floored[1] == Catch::Approx(1.0));
}

TEST_CASE("unrestricted evidence bound matches the direct definition", "[vem]") {
    Rng rng(401);
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 8, k = 3, m = 2;
        const MultiLayerGraph g = random_graph(n, m, rng);
        const Mat tau = testref::random_tau(n, k, rng);
        const auto alpha = random_alpha(k, rng);
        const auto pi = random_pi_layers(k, m, rng);
        const double fast = elbo_mlsbm(g, tau, alpha, pi);
        const double slow = testref::naive_elbo(g, tau, alpha, pi);
        CHECK(fast == Catch::Approx(slow).margin(1e-8 * (1.0 + std::abs(slow))));
    }
}

TEST_CASE("restricted evidence bound matches the direct definition", "[vem]") {
    Rng rng(402);
    for (int rep = 0; rep < 5; ++rep) {
        const int n = 8, k = 2, m = 3;
        const MultiLayerGraph g = random_graph(n, m, rng);
        const Mat tau = testref::random_tau(n, k, rng);
        const auto alpha = random_alpha(k, rng);
        const RMLSBMParams params = random_restricted(k, m, rng);
        const double fast = elbo_rmlsbm(g, tau, alpha, params);
        const double slow = testref::naive_elbo(g, tau, alpha, phi_layers(params));
        CHECK(fast == Catch::Approx(slow).margin(1e-8 * (1.0 + std::abs(slow))));
    }
}

TEST_CASE("restricted bound equals the unrestricted bound at the mapped probabilities",
          "[vem]") {
    Rng rng(403);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 10, k = 3, m = 3;
        const MultiLayerGraph g = random_graph(n, m, rng);
        const Mat tau = testref::random_tau(n, k, rng);
        const auto alpha = random_alpha(k, rng);
        const RMLSBMParams params = random_restricted(k, m, rng);
        const double restricted = elbo_rmlsbm(g, tau, alpha, params);
        const double mapped = elbo_mlsbm(g, tau, alpha, phi_layers(params));
        CHECK(restricted == Catch::Approx(mapped).margin(1e-10 * (1.0 + std::abs(mapped))));
    }
}

TEST_CASE("one fixed-point sweep reproduces the sequential row updates", "[vem]") {
    Rng rng(404);
    for (int rep = 0; rep < 3; ++rep) {
        const int n = 7, k = 3, m = 2;
        const MultiLayerGraph g = random_graph(n, m, rng);
        const Mat tau = testref::random_tau(n, k, rng);
        const auto alpha = random_alpha(k, rng);
        const auto pi = random_pi_layers(k, m, rng);
        const Mat fast = e_step_mlsbm(g, tau, alpha, pi, 1, 0.0);
        const Mat slow = naive_sweep(g, tau, alpha, pi);
        for (int i = 0; i < n; ++i) {
            for (int q = 0; q < k; ++q) {
                CHECK(fast(i, q) == Catch::Approx(slow(i, q)).margin(1e-11));
            }
        }
    }
}

TEST_CASE("restricted fixed-point sweep agrees with the mapped probabilities", "[vem]") {
    Rng rng(405);
    const int n = 9, k = 2, m = 3;
    const MultiLayerGraph g = random_graph(n, m, rng);
    const Mat tau = testref::random_tau(n, k, rng);
    const auto alpha = random_alpha(k, rng);
    const RMLSBMParams params = random_restricted(k, m, rng);
    const Mat via_restricted = e_step_rmlsbm(g, tau, alpha, params, 2, 0.0);
    const Mat via_mapped = e_step_mlsbm(g, tau, alpha, phi_layers(params), 2, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int q = 0; q < k; ++q) {
            CHECK(via_restricted(i, q) == Catch::Approx(via_mapped(i, q)).margin(1e-9));
        }
    }
}

TEST_CASE("fixed-point sweeps never lower the bound", "[vem]") {
    Rng rng(406);
    for (int rep = 0; rep < 3; ++rep) {
        const int n = 14, k = 3, m = 2;
        const MultiLayerGraph g = random_graph(n, m, rng);
        const Mat tau = testref::random_tau(n, k, rng);
        const auto alpha = random_alpha(k, rng);
        const auto pi = random_pi_layers(k, m, rng);
        const double before = elbo_mlsbm(g, tau, alpha, pi);
        const Mat updated = e_step_mlsbm(g, tau, alpha, pi, 3, 0.0);
        const double after = elbo_mlsbm(g, updated, alpha, pi);
        CHECK(after >= before - 1e-9);
    }
}

TEST_CASE("closed-form block update reproduces the fixed-label estimator", "[vem]") {
    Rng rng(407);
    const int n = 12, k = 3, m = 2;
    Assignment z(n);
    for (int i = 0; i < n; ++i) z[i] = i % k;
    const MultiLayerGraph g = random_graph(n, m, rng, 0.4);
    const Mat tau = soften_labels(z, k, 0.0);
    const MLSBMParams params = m_step_mlsbm(g, tau);
    const auto hat = mle_pi_hat(g, z, k);
    for (int lm = 0; lm < m; ++lm) {
        for (int q = 0; q < k; ++q) {
            for (int l = 0; l < k; ++l) {
                CHECK(params.pi[lm](q, l) == Catch::Approx(hat[lm](q, l)).margin(1e-12));
            }
        }
    }
    const auto alpha = alpha_from_tau(tau);
    for (int q = 0; q < k; ++q) CHECK(params.alpha[q] == Catch::Approx(alpha[q]));
}

TEST_CASE("restricted objective gradient reshapes into symmetric block form", "[vem]") {
    Rng rng(408);
    const int n = 10, k = 3, m = 2;
    const MultiLayerGraph g = random_graph(n, m, rng);
    const Mat tau = testref::random_tau(n, k, rng);
    const RMLSBMParams params = random_restricted(k, m, rng);
    const RmlsbmGradient grad = m_step_gradients(g, tau, params);

    const PairStats st = stats_from_tau(g, tau);
    std::vector<double> flat;
    restricted_objective(st, pack_params(params), &flat);
    int idx = 0;
    for (int q = 0; q < k; ++q) {
        for (int l = q; l < k; ++l, ++idx) {
            CHECK(grad.d_pi(q, l) == flat[idx]);
            CHECK(grad.d_pi(l, q) == flat[idx]);
        }
    }
    for (int lm = 0; lm < m; ++lm) CHECK(grad.d_beta[lm] == flat[idx + lm]);
}

TEST_CASE("both fitters produce non-decreasing bound traces on planted graphs", "[vem]") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const PlantedGraph planted = generate_planted(40, 2, 2, Scenario::all_strong, seed);
        Rng rng(seed * 7 + 1);
        const Mat init = testref::random_tau(planted.graph.n, 2, rng);

        const MlsbmFit fit_u = fit_mlsbm(planted.graph, 2, init);
        REQUIRE(fit_u.state.elbo_trace.size() >= 2);
        for (std::size_t t = 1; t < fit_u.state.elbo_trace.size(); ++t) {
            CHECK(fit_u.state.elbo_trace[t] >= fit_u.state.elbo_trace[t - 1] - 1e-8);
        }

        const RmlsbmFit fit_r = fit_rmlsbm(planted.graph, 2, init);
        REQUIRE(fit_r.state.elbo_trace.size() >= 2);
        for (std::size_t t = 1; t < fit_r.state.elbo_trace.size(); ++t) {
            CHECK(fit_r.state.elbo_trace[t] >= fit_r.state.elbo_trace[t - 1] - 1e-8);
        }
    }
}

TEST_CASE("separable communities are recovered exactly", "[vem]") {
    const MultiLayerGraph g = testref::two_cliques(6);
    const Assignment truth = testref::two_block_labels(6);
    // rho must leave the first M-step clearly assortative; on a graph this
    // small a near-uniform init makes the inner E-step loop contract to the
    // symmetric fixed point, which is correct mean-field behavior.
    const Mat init = soften_labels(truth, 2, 0.2);

    const MlsbmFit fit_u = fit_mlsbm(g, 2, init);
    CHECK(same_partition(fit_u.z_hat, truth));
    CHECK(fit_u.state.converged);

    const RmlsbmFit fit_r = fit_rmlsbm(g, 2, init);
    CHECK(same_partition(fit_r.z_hat, truth));
    CHECK(fit_r.state.converged);
}

TEST_CASE("single-class fits reduce to layer densities", "[vem]") {
    Rng rng(409);
    const MultiLayerGraph g = random_graph(10, 2, rng, 0.35);
    const Mat init(10, 1, 1.0);

    const MlsbmFit fit_u = fit_mlsbm(g, 1, init);
    const auto density = layer_densities(g);
    CHECK(fit_u.params.pi[0](0, 0) == Catch::Approx(density[0]).margin(1e-12));
    CHECK(fit_u.params.pi[1](0, 0) == Catch::Approx(density[1]).margin(1e-12));
    CHECK(fit_u.state.converged);

    const RmlsbmFit fit_r = fit_rmlsbm(g, 1, init);
    const auto phi = phi_layers(fit_r.params);
    CHECK(phi[0](0, 0) == Catch::Approx(density[0]).margin(1e-5));
    CHECK(phi[1](0, 0) == Catch::Approx(density[1]).margin(1e-5));
}

TEST_CASE("isolated nodes keep finite normalized responsibilities", "[vem]") {
    // Node 5 has no edges in either layer.
    std::vector<std::pair<int, int>> e0 = {{0, 1}, {0, 2}, {1, 2}, {3, 4}};
    std::vector<std::pair<int, int>> e1 = {{0, 1}, {3, 4}, {2, 4}};
    MultiLayerGraph g;
    g.n = 6;
    g.layers.push_back(make_layer(6, std::move(e0)));
    g.layers.push_back(make_layer(6, std::move(e1)));

    Rng rng(410);
    const Mat init = testref::random_tau(6, 2, rng);
    const MlsbmFit fit = fit_mlsbm(g, 2, init);
    for (std::size_t i = 0; i < fit.state.tau.rows(); ++i) {
        double s = 0.0;
        for (std::size_t q = 0; q < fit.state.tau.cols(); ++q) {
            const double v = fit.state.tau(i, q);
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
            s += v;
        }
        CHECK(s == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("fitters validate their inputs", "[vem]") {
    const MultiLayerGraph g = testref::two_cliques(3);
    const Mat init(6, 2, 0.5);
    CHECK_THROWS_AS(fit_mlsbm(g, 0, init), std::invalid_argument);
    CHECK_THROWS_AS(fit_mlsbm(g, 7, init), std::invalid_argument);
    CHECK_THROWS_AS(fit_rmlsbm(g, 0, init), std::invalid_argument);
    CHECK_THROWS_AS(fit_rmlsbm(g, 7, init), std::invalid_argument);
    Mat bad(5, 2, 0.5);
    CHECK_THROWS_AS(fit_mlsbm(g, 2, bad), std::invalid_argument);
    MultiLayerGraph empty;
    empty.n = 4;
    CHECK_THROWS_AS(fit_mlsbm(empty, 2, Mat(4, 2, 0.5)), std::invalid_argument);
}
