// Command-line front end: fit models, run simulation sweeps, score label
// files, evaluate the theory calculators, and canonicalize edge lists.
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlsbm/experiment.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<double> split_doubles(const std::string& csv, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw std::invalid_argument(what + ": bad number '" + tok + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument(what + ": empty list");
    return out;
}

// Loader/parse failures are input-validation problems, not numerics, so remap
// them onto the validation exit path.
template <typename Fn>
auto validated(Fn&& fn) {
    try {
        return fn();
    } catch (const std::runtime_error& e) {
        throw std::invalid_argument(e.what());
    }
}

struct FitArgs {
    std::string manifest;
    int k = 0;
    std::string method = "mlsbm";
    int layer = 0;
    int init_layer = 0;
    std::uint64_t seed = 1;
    std::string out;
};

int run_fit(const FitArgs& a) {
    using namespace mlsbm;
    const LoadResult loaded = validated([&] { return load_multilayer(a.manifest); });
    if (loaded.collapsed_pairs > 0) {
        std::cerr << "note: collapsed " << loaded.collapsed_pairs
                  << " duplicate/reverse pairs while loading\n";
    }
    const MultiLayerGraph& g = loaded.graph;
    std::cout << "n " << g.n << "\nlayers " << g.m() << "\nk " << a.k << "\nmethod " << a.method
              << "\n";

    Assignment z_hat;
    double elbo = 0.0;
    int iterations = 0;
    bool converged = false;
    if (a.method == "mlsbm" || a.method == "rmlsbm") {
        if (a.init_layer < 0 || a.init_layer >= g.m()) {
            throw std::invalid_argument("--init-layer out of range");
        }
        const Mat tau0 = spectral_init(g, a.init_layer, a.k, a.seed);
        if (a.method == "mlsbm") {
            const MlsbmFit fit = fit_mlsbm(g, a.k, tau0);
            z_hat = fit.z_hat;
            elbo = detail::best_elbo(fit.state.elbo_trace);
            iterations = fit.state.iterations;
            converged = fit.state.converged;
        } else {
            const RmlsbmFit fit = fit_rmlsbm(g, a.k, tau0);
            z_hat = fit.z_hat;
            elbo = detail::best_elbo(fit.state.elbo_trace);
            iterations = fit.state.iterations;
            converged = fit.state.converged;
        }
    } else if (a.method == "agg_sbm" || a.method == "agg_mean" || a.method == "sbm") {
        MultiLayerGraph work;
        if (a.method == "sbm") {
            if (a.layer < 0 || a.layer >= g.m()) throw std::invalid_argument("--layer out of range");
            work = single_layer_graph(g, a.layer);
        } else {
            work = a.method == "agg_sbm" ? aggregate_sparse(g) : aggregate_mean(g);
        }
        const Mat tau0 = spectral_init(work, 0, a.k, a.seed);
        const MlsbmFit fit = fit_mlsbm(work, a.k, tau0);
        z_hat = fit.z_hat;
        elbo = detail::best_elbo(fit.state.elbo_trace);
        iterations = fit.state.iterations;
        converged = fit.state.converged;
    } else {
        throw std::invalid_argument("unknown method: " + a.method);
    }

    std::cout << "iterations " << iterations << "\nconverged " << (converged ? 1 : 0)
              << "\nelbo " << fmt(elbo) << "\n";
    if (loaded.truth) {
        const GroundTruth& t = *loaded.truth;
        std::cout << "nmi " << fmt(nmi(t.z, z_hat, t.k, a.k)) << "\n";
        std::cout << "ccr " << fmt(ccr(t.z, z_hat, t.k, a.k)) << "\n";
        std::cout << "misclustering_rate "
                  << fmt(misclustering_rate(t.z, z_hat, std::max(t.k, a.k))) << "\n";
    }
    if (!a.out.empty()) {
        save_labels(z_hat, a.out);
        std::cout << "labels_written " << a.out << "\n";
    }
    return 0;
}

struct SimArgs {
    std::string spec_path;
    std::string out;
    std::string svg;
    std::string metric = "nmi";
    bool timing = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> replicates;
    std::optional<int> workers;
};

int run_simulate(const SimArgs& a) {
    using namespace mlsbm;
    ExperimentSpec spec = validated([&] { return load_experiment_spec(a.spec_path); });
    if (a.seed) spec.seed = *a.seed;
    if (a.replicates) spec.replicates = *a.replicates;
    if (a.workers) spec.workers = *a.workers;
    if (spec.replicates < 1) throw std::invalid_argument("--replicates must be >= 1");
    if (spec.workers < 1) throw std::invalid_argument("--workers must be >= 1");
    const std::vector<ResultRow> rows = run_experiment(spec);
    emit_csv(rows, a.out, a.timing);
    std::cout << "rows " << rows.size() << "\ncsv " << a.out << "\n";
    if (!a.svg.empty()) {
        emit_svg_lineplot(rows, a.metric, a.svg);
        std::cout << "svg " << a.svg << "\n";
    }
    return 0;
}

struct EvalArgs {
    std::string truth_path;
    std::string pred_path;
    int k = 0;  // 0 means infer
};

int run_eval(const EvalArgs& a) {
    using namespace mlsbm;
    const Assignment zt = validated([&] { return load_labels_all(a.truth_path); });
    const Assignment zp = validated([&] { return load_labels_all(a.pred_path); });
    if (zt.size() != zp.size()) {
        throw std::invalid_argument("label files differ in length: " + std::to_string(zt.size()) +
                                    " vs " + std::to_string(zp.size()));
    }
    int kt = 0, kp = 0;
    for (int v : zt) kt = std::max(kt, v + 1);
    for (int v : zp) kp = std::max(kp, v + 1);
    if (a.k > 0) {
        if (a.k < std::max(kt, kp)) throw std::invalid_argument("--k smaller than observed labels");
        kt = kp = a.k;
    }
    std::cout << "n " << zt.size() << "\n";
    std::cout << "nmi " << fmt(nmi(zt, zp, kt, kp)) << "\n";
    std::cout << "ccr " << fmt(ccr(zt, zp, kt, kp)) << "\n";
    std::cout << "misclustered " << misclustered_count(zt, zp, kt, kp) << "\n";
    std::cout << "misclustering_rate " << fmt(misclustering_rate(zt, zp, std::max(kt, kp)))
              << "\n";
    return 0;
}

struct TheoryArgs {
    std::string a_csv;
    std::string b_csv;
    double n = 0.0;
    int k = 0;
    double s = 1.0;
    std::string alpha1_csv;
    std::string alpha2_csv;
};

int run_theory(const TheoryArgs& t) {
    using namespace mlsbm;
    const std::vector<double> a = split_doubles(t.a_csv, "--a");
    const std::vector<double> b = split_doubles(t.b_csv, "--b");
    if (a.size() != b.size()) throw std::invalid_argument("--a and --b differ in length");
    if (t.n <= 1.0) throw std::invalid_argument("--n must exceed 1");

    const DivergenceProfile prof = divergence_profile(a, b, t.n);
    nlohmann::json doc;
    doc["n"] = t.n;
    doc["k"] = t.k;
    doc["s"] = t.s;
    doc["a"] = a;
    doc["b"] = b;
    doc["renyi_per_layer"] = prof.per_layer;
    doc["renyi_sum"] = prof.sum;
    doc["renyi_aggregate"] = prof.aggregate;
    if (t.k >= 2) {
        doc["rate_multilayer"] = minimax_rate(a, b, t.n, t.k, RateModel::multilayer, t.s);
        doc["rate_aggregate"] = minimax_rate(a, b, t.n, t.k, RateModel::aggregate, t.s);
    }

    std::vector<double> alpha1, alpha2;
    if (!t.alpha1_csv.empty() || !t.alpha2_csv.empty()) {
        if (t.alpha1_csv.empty() || t.alpha2_csv.empty()) {
            throw std::invalid_argument("--alpha1 and --alpha2 must be given together");
        }
        alpha1 = split_doubles(t.alpha1_csv, "--alpha1");
        alpha2 = split_doubles(t.alpha2_csv, "--alpha2");
    } else {
        const double logn = std::log(t.n);
        for (std::size_t i = 0; i < a.size(); ++i) {
            alpha1.push_back(a[i] / logn);
            alpha2.push_back(b[i] / logn);
        }
    }
    if (t.k >= 1) {
        const ThresholdResult tm = threshold_strong(alpha1, alpha2, t.k, RateModel::multilayer);
        const ThresholdResult ta = threshold_strong(alpha1, alpha2, t.k, RateModel::aggregate);
        doc["threshold_multilayer"] = {{"margin", tm.margin}, {"strong", tm.strong}};
        doc["threshold_aggregate"] = {{"margin", ta.margin}, {"strong", ta.strong}};
    }

    bool weights_ok = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(b[i] > 0.0 && a[i] >= b[i] && a[i] < t.n)) weights_ok = false;
    }
    if (weights_ok) {
        const OracleWeights w = oracle_weights(a, b, t.n);
        doc["oracle_edge_weights"] = w.c;
        doc["oracle_penalties"] = w.k;
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
}

struct ConvertArgs {
    std::string in_path;
    std::string out_path;
    int n = 0;  // 0 means infer from max id
};

int run_convert(const ConvertArgs& a) {
    using namespace mlsbm;
    std::ifstream in(a.in_path);
    if (!in) throw std::invalid_argument("cannot open input: " + a.in_path);
    std::vector<std::pair<int, int>> pairs;
    std::string line;
    int lineno = 0;
    long self_loops = 0;
    int max_id = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        std::string ta, tb, extra;
        const std::string where = a.in_path + ":" + std::to_string(lineno);
        if (!(ss >> ta >> tb)) throw std::invalid_argument(where + ": expected 'i j'");
        if (ss >> extra) throw std::invalid_argument(where + ": trailing token");
        long i, j;
        try {
            i = detail::parse_int_token(ta, where);
            j = detail::parse_int_token(tb, where);
        } catch (const std::runtime_error& e) {
            throw std::invalid_argument(e.what());
        }
        if (i < 1 || j < 1) throw std::invalid_argument(where + ": node ids are 1-based");
        if (a.n > 0 && (i > a.n || j > a.n)) {
            throw std::invalid_argument(where + ": node id exceeds --n");
        }
        max_id = std::max(max_id, static_cast<int>(std::max(i, j)));
        if (i == j) {
            ++self_loops;
            continue;
        }
        pairs.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1));
    }
    const int n = a.n > 0 ? a.n : max_id;
    if (n < 1) throw std::invalid_argument("no nodes found in input");
    const Layer layer = symmetrize_layer(pairs, n);
    std::ofstream out(a.out_path);
    if (!out) throw std::invalid_argument("cannot write output: " + a.out_path);
    out << "# undirected edges, 1-based\n";
    for (const auto& [i, j] : layer.edges) out << (i + 1) << " " << (j + 1) << "\n";
    std::cout << "n " << n << "\nlisted " << (pairs.size() + self_loops) << "\nself_loops_dropped "
              << self_loops << "\nedges " << layer.edge_count() << "\nout " << a.out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"community detection in multi-layer networks"};
    app.require_subcommand(1);

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "fit one model to one dataset");
    fit->add_option("--manifest", fit_args.manifest, "dataset manifest (JSON)")->required();
    fit->add_option("--k", fit_args.k, "number of communities")->required()->check(CLI::PositiveNumber);
    fit->add_option("--method", fit_args.method, "mlsbm | rmlsbm | agg_sbm | agg_mean | sbm");
    fit->add_option("--layer", fit_args.layer, "layer index for method sbm (0-based)");
    fit->add_option("--init-layer", fit_args.init_layer, "layer used for initialization");
    fit->add_option("--seed", fit_args.seed, "random seed");
    fit->add_option("--out", fit_args.out, "write estimated labels here (1-based)");

    SimArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "run an experiment sweep from a JSON spec");
    sim->add_option("--spec", sim_args.spec_path, "experiment spec (JSON)")->required();
    sim->add_option("--out", sim_args.out, "output CSV path")->required();
    sim->add_option("--svg", sim_args.svg, "also write an SVG line plot here");
    sim->add_option("--metric", sim_args.metric, "metric for the SVG (default nmi)");
    sim->add_flag("--timing", sim_args.timing, "include the wall_ms column in the CSV");
    auto* sim_seed = sim->add_option("--seed", "override the spec seed");
    auto* sim_reps = sim->add_option("--replicates", "override the spec replicate count");
    auto* sim_workers = sim->add_option("--workers", "override the spec worker count");

    EvalArgs eval_args;
    auto* ev = app.add_subcommand("eval", "score predicted labels against reference labels");
    ev->add_option("--truth", eval_args.truth_path, "reference labels file")->required();
    ev->add_option("--pred", eval_args.pred_path, "predicted labels file")->required();
    ev->add_option("--k", eval_args.k, "number of communities (default: inferred)");

    TheoryArgs theory_args;
    auto* th = app.add_subcommand("theory", "divergence, rate, and threshold calculators");
    th->add_option("--a", theory_args.a_csv, "within-block expected degrees, comma separated")
        ->required();
    th->add_option("--b", theory_args.b_csv, "between-block expected degrees, comma separated")
        ->required();
    th->add_option("--n", theory_args.n, "number of nodes")->required();
    th->add_option("--k", theory_args.k, "number of communities")->required();
    th->add_option("--s", theory_args.s, "class-size imbalance parameter (default 1)");
    th->add_option("--alpha1", theory_args.alpha1_csv, "threshold within coefficients");
    th->add_option("--alpha2", theory_args.alpha2_csv, "threshold between coefficients");

    ConvertArgs conv_args;
    auto* conv = app.add_subcommand("convert", "canonicalize a raw edge list to undirected form");
    conv->add_option("--in", conv_args.in_path, "input edge list")->required();
    conv->add_option("--out", conv_args.out_path, "output edge list")->required();
    conv->add_option("--n", conv_args.n, "node count (default: max id seen)");

    try {
        app.parse(argc, argv);
        if (sim_seed->count()) sim_args.seed = sim_seed->as<std::uint64_t>();
        if (sim_reps->count()) sim_args.replicates = sim_reps->as<int>();
        if (sim_workers->count()) sim_args.workers = sim_workers->as<int>();
        if (fit->parsed()) return run_fit(fit_args);
        if (sim->parsed()) return run_simulate(sim_args);
        if (ev->parsed()) return run_eval(eval_args);
        if (th->parsed()) return run_theory(theory_args);
        if (conv->parsed()) return run_convert(conv_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
