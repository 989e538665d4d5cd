#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mlsbm/baselines.hpp"
#include "mlsbm/graph.hpp"
#include "mlsbm/graph_io.hpp"
#include "mlsbm/metrics.hpp"
#include "mlsbm/rng.hpp"
#include "mlsbm/spectral.hpp"
#include "mlsbm/theory.hpp"
#include "mlsbm/vem_mlsbm.hpp"
#include "mlsbm/vem_rmlsbm.hpp"

namespace mlsbm {

inline const std::set<std::string>& known_methods() {
    static const std::set<std::string> methods = {
        "mlsbm", "rmlsbm", "agg_sbm", "agg_mean", "single_layers", "majority", "oracle"};
    return methods;
}

struct ExperimentSpec {
    std::string sweep;  // vary_n | vary_k | vary_m
    std::vector<int> grid;
    int n = 0, k = 0, m = 0;  // fixed values; the swept one is taken from grid
    Scenario scenario = Scenario::all_strong;
    int replicates = 20;
    std::uint64_t seed = 1;
    std::vector<std::string> methods;
    int init_layer = 0;
    bool random_layer = false;
    int workers = 1;
};

inline ExperimentSpec parse_experiment_spec(const nlohmann::json& doc) {
    ExperimentSpec spec;
    auto require = [&](const char* field) {
        if (!doc.contains(field)) {
            throw std::invalid_argument(std::string("experiment spec: missing field ") + field);
        }
        return doc.at(field);
    };
    spec.sweep = require("sweep").get<std::string>();
    if (spec.sweep != "vary_n" && spec.sweep != "vary_k" && spec.sweep != "vary_m") {
        throw std::invalid_argument("experiment spec: sweep must be vary_n, vary_k, or vary_m");
    }
    for (const auto& v : require("grid")) {
        if (!v.is_number_integer() || v.get<int>() <= 0) {
            throw std::invalid_argument("experiment spec: grid entries must be positive integers");
        }
        spec.grid.push_back(v.get<int>());
    }
    if (spec.grid.empty()) throw std::invalid_argument("experiment spec: grid is empty");
    if (spec.sweep != "vary_n") spec.n = require("n").get<int>();
    if (spec.sweep != "vary_k") spec.k = require("k").get<int>();
    if (spec.sweep != "vary_m") spec.m = require("m").get<int>();
    spec.scenario = parse_scenario(require("scenario").get<std::string>());
    if (doc.contains("replicates")) spec.replicates = doc["replicates"].get<int>();
    if (spec.replicates < 1) throw std::invalid_argument("experiment spec: replicates must be >= 1");
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
    for (const auto& v : require("methods")) {
        const std::string name = v.get<std::string>();
        if (!known_methods().count(name)) {
            throw std::invalid_argument("experiment spec: unknown method " + name);
        }
        spec.methods.push_back(name);
    }
    if (spec.methods.empty()) throw std::invalid_argument("experiment spec: methods is empty");
    if (doc.contains("init_layer")) spec.init_layer = doc["init_layer"].get<int>();
    if (doc.contains("random_layer")) spec.random_layer = doc["random_layer"].get<bool>();
    if (doc.contains("workers")) spec.workers = doc["workers"].get<int>();
    if (spec.workers < 1) throw std::invalid_argument("experiment spec: workers must be >= 1");
    return spec;
}

inline ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open experiment spec: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("experiment spec parse error: ") + e.what());
    }
    return parse_experiment_spec(doc);
}

struct ResultRow {
    std::string method;
    double sweep_value = 0.0;
    int replicate = 0;
    std::uint64_t seed = 0;
    double nmi = std::numeric_limits<double>::quiet_NaN();
    double ccr = std::numeric_limits<double>::quiet_NaN();
    double mcr = std::numeric_limits<double>::quiet_NaN();
    double elbo = std::numeric_limits<double>::quiet_NaN();
    double wall_ms = 0.0;
};

namespace detail {

inline double best_elbo(const std::vector<double>& trace) {
    double best = -std::numeric_limits<double>::infinity();
    for (double v : trace) best = std::max(best, v);
    return best;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

inline void score_row(ResultRow& row, const GroundTruth& truth, const Assignment& z_hat, int k) {
    const int k_hat = k;
    row.nmi = nmi(truth.z, z_hat, truth.k, k_hat);
    row.ccr = ccr(truth.z, z_hat, truth.k, k_hat);
    const int kk = std::max(truth.k, k_hat);
    row.mcr = misclustering_rate(truth.z, z_hat, kk);
}

// All rows for one generated replicate. Row order: methods in request order;
// single_layers expands to one row per layer.
inline std::vector<ResultRow> run_replicate(const ExperimentSpec& spec, int grid_index,
                                            int replicate) {
    const int n = spec.sweep == "vary_n" ? spec.grid[grid_index] : spec.n;
    const int k = spec.sweep == "vary_k" ? spec.grid[grid_index] : spec.k;
    const int m = spec.sweep == "vary_m" ? spec.grid[grid_index] : spec.m;
    const std::uint64_t seed = mix_seed(spec.seed, grid_index, replicate);
    const double sweep_value = static_cast<double>(spec.grid[grid_index]);

    const PlantedGraph planted = generate_planted(n, k, m, spec.scenario, seed);
    const MultiLayerGraph& g = planted.graph;

    int init_layer = spec.init_layer;
    if (spec.random_layer) {
        Rng layer_rng(mix_seed(seed, 0x6c61796572ULL, 0));
        init_layer = static_cast<int>(layer_rng.uniform_int(m));
    }
    if (init_layer < 0 || init_layer >= m) {
        throw std::invalid_argument("init layer out of range for M=" + std::to_string(m));
    }

    auto wants = [&](const std::string& name) {
        for (const auto& s : spec.methods) {
            if (s == name) return true;
        }
        return false;
    };

    // shared pieces
    std::optional<Mat> shared_init;
    if (wants("mlsbm") || wants("rmlsbm")) {
        shared_init = spectral_init(g, init_layer, k, seed);
    }
    std::vector<Assignment> layer_fits;
    std::vector<double> layer_elbos, layer_ms;
    if (wants("single_layers") || wants("majority")) {
        for (int lm = 0; lm < m; ++lm) {
            Stopwatch sw;
            const Mat tau0 = spectral_init(g, lm, k, seed);
            const MlsbmFit fit = fit_single_layer_sbm(g, lm, k, tau0);
            layer_fits.push_back(fit.z_hat);
            layer_elbos.push_back(best_elbo(fit.state.elbo_trace));
            layer_ms.push_back(sw.ms());
        }
    }

    std::vector<ResultRow> rows;
    for (const auto& method : spec.methods) {
        ResultRow base;
        base.sweep_value = sweep_value;
        base.replicate = replicate;
        base.seed = seed;
        if (method == "mlsbm") {
            base.method = method;
            Stopwatch sw;
            const MlsbmFit fit = fit_mlsbm(g, k, *shared_init);
            base.wall_ms = sw.ms();
            base.elbo = best_elbo(fit.state.elbo_trace);
            score_row(base, planted.truth, fit.z_hat, k);
            rows.push_back(base);
        } else if (method == "rmlsbm") {
            base.method = method;
            Stopwatch sw;
            const RmlsbmFit fit = fit_rmlsbm(g, k, *shared_init);
            base.wall_ms = sw.ms();
            base.elbo = best_elbo(fit.state.elbo_trace);
            score_row(base, planted.truth, fit.z_hat, k);
            rows.push_back(base);
        } else if (method == "agg_sbm" || method == "agg_mean") {
            base.method = method;
            Stopwatch sw;
            const MultiLayerGraph agg =
                method == "agg_sbm" ? aggregate_sparse(g) : aggregate_mean(g);
            const Mat tau0 = spectral_init(agg, 0, k, seed);
            const MlsbmFit fit = fit_mlsbm(agg, k, tau0);
            base.wall_ms = sw.ms();
            base.elbo = best_elbo(fit.state.elbo_trace);
            score_row(base, planted.truth, fit.z_hat, k);
            rows.push_back(base);
        } else if (method == "single_layers") {
            for (int lm = 0; lm < m; ++lm) {
                ResultRow row = base;
                row.method = "sbm_L" + std::to_string(lm + 1);
                row.wall_ms = layer_ms[lm];
                row.elbo = layer_elbos[lm];
                score_row(row, planted.truth, layer_fits[lm], k);
                rows.push_back(row);
            }
        } else if (method == "majority") {
            base.method = method;
            Stopwatch sw;
            const Assignment voted = majority_vote(layer_fits, k);
            base.wall_ms = sw.ms();
            score_row(base, planted.truth, voted, k);
            rows.push_back(base);
        } else if (method == "oracle") {
            base.method = method;
            Stopwatch sw;
            std::vector<double> a, b;
            for (int lm = 0; lm < m; ++lm) {
                a.push_back(planted.within[lm] * n);
                b.push_back(planted.between[lm] * n);
            }
            const OracleMaxResult r =
                oracle_maximize_T(g, k, a, b, OracleMode::local, seed);
            base.wall_ms = sw.ms();
            score_row(base, planted.truth, r.z, k);
            rows.push_back(base);
        }
    }
    return rows;
}

inline std::vector<ResultRow> run_tasks(int task_count, int workers,
                                        const std::function<std::vector<ResultRow>(int)>& task) {
    std::vector<std::vector<ResultRow>> slots(task_count);
    if (workers <= 1) {
        for (int t = 0; t < task_count; ++t) slots[t] = task(t);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto worker = [&] {
            while (true) {
                const int t = next.fetch_add(1);
                if (t >= task_count) break;
                try {
                    slots[t] = task(t);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < std::min(workers, task_count); ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (error) std::rethrow_exception(error);
    }
    std::vector<ResultRow> rows;
    for (auto& s : slots) rows.insert(rows.end(), s.begin(), s.end());
    return rows;
}

}  // namespace detail

// Runs the full grid x replicate design. Replicates execute concurrently up
// to spec.workers; output order and content are independent of the worker
// count because every replicate derives its own seed as
// splitmix64-mix(spec.seed, grid index, replicate index) and rows are merged
// in task order.
inline std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
    for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
        const int n = spec.sweep == "vary_n" ? spec.grid[gi] : spec.n;
        const int k = spec.sweep == "vary_k" ? spec.grid[gi] : spec.k;
        const int m = spec.sweep == "vary_m" ? spec.grid[gi] : spec.m;
        if (n <= 0 || k <= 0 || m <= 0) throw std::invalid_argument("grid point with nonpositive size");
        if (k > n) {
            throw std::invalid_argument("infeasible grid point: k=" + std::to_string(k) +
                                        " > n=" + std::to_string(n));
        }
        if (!spec.random_layer && spec.init_layer >= m) {
            throw std::invalid_argument("init_layer out of range for m=" + std::to_string(m));
        }
    }
    const int reps = spec.replicates;
    const int tasks = static_cast<int>(spec.grid.size()) * reps;
    return detail::run_tasks(tasks, spec.workers, [&](int t) {
        return detail::run_replicate(spec, t / reps, t % reps);
    });
}

// Fits the requested methods on a loaded dataset, once per replicate seed and
// per layer subset; sweep_value column carries the subset index.
inline std::vector<ResultRow> run_real_data(const std::string& manifest_path, int k,
                                            const std::vector<std::string>& methods,
                                            const std::vector<std::vector<int>>& layer_subsets,
                                            std::uint64_t seed, int replicates = 1,
                                            int workers = 1) {
    const LoadResult loaded = load_multilayer(manifest_path);
    if (!loaded.truth) throw std::invalid_argument("dataset manifest has no labels_file");
    for (const auto& name : methods) {
        if (!known_methods().count(name) || name == "oracle") {
            throw std::invalid_argument("unsupported method for real data: " + name);
        }
    }
    std::vector<std::vector<int>> subsets = layer_subsets;
    if (subsets.empty()) {
        subsets.emplace_back();
        for (int lm = 0; lm < loaded.graph.m(); ++lm) subsets.back().push_back(lm);
    }
    std::vector<MultiLayerGraph> views;
    for (const auto& subset : subsets) {
        MultiLayerGraph view;
        view.n = loaded.graph.n;
        for (int lm : subset) {
            if (lm < 0 || lm >= loaded.graph.m()) throw std::invalid_argument("layer subset out of range");
            view.layers.push_back(loaded.graph.layers[lm]);
        }
        if (view.layers.empty()) throw std::invalid_argument("empty layer subset");
        views.push_back(std::move(view));
    }

    const int tasks = static_cast<int>(subsets.size()) * replicates;
    return detail::run_tasks(tasks, workers, [&](int t) {
        const int si = t / replicates;
        const int rep = t % replicates;
        const MultiLayerGraph& g = views[si];
        const std::uint64_t rep_seed = mix_seed(seed, si, rep);

        std::vector<ResultRow> rows;
        std::optional<Mat> shared_init;
        std::vector<Assignment> layer_fits;
        std::vector<double> layer_elbos, layer_ms;
        auto wants = [&](const std::string& name) {
            for (const auto& s : methods) {
                if (s == name) return true;
            }
            return false;
        };
        if (wants("mlsbm") || wants("rmlsbm")) shared_init = spectral_init(g, 0, k, rep_seed);
        if (wants("single_layers") || wants("majority")) {
            for (int lm = 0; lm < g.m(); ++lm) {
                detail::Stopwatch sw;
                const Mat tau0 = spectral_init(g, lm, k, rep_seed);
                const MlsbmFit fit = fit_single_layer_sbm(g, lm, k, tau0);
                layer_fits.push_back(fit.z_hat);
                layer_elbos.push_back(detail::best_elbo(fit.state.elbo_trace));
                layer_ms.push_back(sw.ms());
            }
        }
        for (const auto& method : methods) {
            ResultRow base;
            base.sweep_value = static_cast<double>(si);
            base.replicate = rep;
            base.seed = rep_seed;
            if (method == "mlsbm") {
                base.method = method;
                detail::Stopwatch sw;
                const MlsbmFit fit = fit_mlsbm(g, k, *shared_init);
                base.wall_ms = sw.ms();
                base.elbo = detail::best_elbo(fit.state.elbo_trace);
                detail::score_row(base, *loaded.truth, fit.z_hat, k);
                rows.push_back(base);
            } else if (method == "rmlsbm") {
                base.method = method;
                detail::Stopwatch sw;
                const RmlsbmFit fit = fit_rmlsbm(g, k, *shared_init);
                base.wall_ms = sw.ms();
                base.elbo = detail::best_elbo(fit.state.elbo_trace);
                detail::score_row(base, *loaded.truth, fit.z_hat, k);
                rows.push_back(base);
            } else if (method == "agg_sbm" || method == "agg_mean") {
                base.method = method;
                detail::Stopwatch sw;
                const MultiLayerGraph agg =
                    method == "agg_sbm" ? aggregate_sparse(g) : aggregate_mean(g);
                const Mat tau0 = spectral_init(agg, 0, k, rep_seed);
                const MlsbmFit fit = fit_mlsbm(agg, k, tau0);
                base.wall_ms = sw.ms();
                base.elbo = detail::best_elbo(fit.state.elbo_trace);
                detail::score_row(base, *loaded.truth, fit.z_hat, k);
                rows.push_back(base);
            } else if (method == "single_layers") {
                for (int lm = 0; lm < g.m(); ++lm) {
                    ResultRow row = base;
                    row.method = "sbm_L" + std::to_string(lm + 1);
                    row.wall_ms = layer_ms[lm];
                    row.elbo = layer_elbos[lm];
                    detail::score_row(row, *loaded.truth, layer_fits[lm], k);
                    rows.push_back(row);
                }
            } else if (method == "majority") {
                base.method = method;
                detail::Stopwatch sw;
                const Assignment voted = majority_vote(layer_fits, k);
                base.wall_ms = sw.ms();
                detail::score_row(base, *loaded.truth, voted, k);
                rows.push_back(base);
            }
        }
        return rows;
    });
}

// ---- output ----

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

// UTF-8 CSV with a fixed header and column order. The timing column is
// opt-in so that default output is byte-identical for identical spec + seed.
inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path,
                     bool include_timing = false) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV: " + path);
    out << "method,sweep_value,replicate,seed,nmi,ccr,misclustering_rate,elbo";
    if (include_timing) out << ",wall_ms";
    out << "\n";
    for (const auto& r : rows) {
        out << r.method << ',' << detail::format_double(r.sweep_value) << ',' << r.replicate
            << ',' << r.seed << ',' << detail::format_double(r.nmi) << ','
            << detail::format_double(r.ccr) << ',' << detail::format_double(r.mcr) << ','
            << detail::format_double(r.elbo);
        if (include_timing) out << ',' << detail::format_double(r.wall_ms);
        out << "\n";
    }
}

inline std::vector<ResultRow> parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() < 8) throw std::runtime_error("short CSV row: " + line);
        ResultRow r;
        r.method = fields[0];
        r.sweep_value = std::stod(fields[1]);
        r.replicate = std::stoi(fields[2]);
        r.seed = std::stoull(fields[3]);
        r.nmi = std::stod(fields[4]);
        r.ccr = std::stod(fields[5]);
        r.mcr = std::stod(fields[6]);
        r.elbo = std::stod(fields[7]);
        if (fields.size() > 8) r.wall_ms = std::stod(fields[8]);
        rows.push_back(std::move(r));
    }
    return rows;
}

// Self-contained SVG line plot: per-method mean with +/- sd whiskers across
// replicates, x = sweep value. metric is one of nmi, ccr, misclustering_rate,
// elbo.
inline void emit_svg_lineplot(const std::vector<ResultRow>& rows, const std::string& metric,
                              const std::string& path) {
    auto pick = [&metric](const ResultRow& r) {
        if (metric == "nmi") return r.nmi;
        if (metric == "ccr") return r.ccr;
        if (metric == "misclustering_rate") return r.mcr;
        if (metric == "elbo") return r.elbo;
        throw std::invalid_argument("unknown metric: " + metric);
    };
    // method -> sweep value -> samples
    std::map<std::string, std::map<double, std::vector<double>>> series;
    for (const auto& r : rows) {
        const double v = pick(r);
        if (std::isfinite(v)) series[r.method][r.sweep_value].push_back(v);
    }
    if (series.empty()) throw std::invalid_argument("no finite data for metric " + metric);

    struct Pt {
        double x, mean, sd;
    };
    std::map<std::string, std::vector<Pt>> stats;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& [method, by_x] : series) {
        for (const auto& [x, samples] : by_x) {
            double mean = 0.0;
            for (double s : samples) mean += s;
            mean /= samples.size();
            double var = 0.0;
            for (double s : samples) var += (s - mean) * (s - mean);
            const double sd = samples.size() > 1 ? std::sqrt(var / (samples.size() - 1)) : 0.0;
            stats[method].push_back({x, mean, sd});
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, mean - sd);
            ymax = std::max(ymax, mean + sd);
        }
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= ymin) ymax = ymin + 1.0;

    const double width = 720.0, height = 480.0, pad = 60.0;
    auto sx = [&](double x) { return pad + (x - xmin) / (xmax - xmin) * (width - 2 * pad); };
    auto sy = [&](double y) { return height - pad - (y - ymin) / (ymax - ymin) * (height - 2 * pad); };
    auto fmt = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };

    static const char* palette[] = {"#1b6ca8", "#c0392b", "#27845b", "#8e44ad",
                                    "#d68910", "#16777e", "#7d3c0a", "#455a64"};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write SVG: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << pad << "\" y1=\"" << height - pad << "\" x2=\"" << width - pad
        << "\" y2=\"" << height - pad << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\""
        << height - pad << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << pad << "\" y=\"" << height - pad + 20 << "\" font-size=\"12\">"
        << fmt(xmin) << "</text>\n";
    out << "<text x=\"" << width - pad << "\" y=\"" << height - pad + 20
        << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(xmax) << "</text>\n";
    out << "<text x=\"" << pad - 8 << "\" y=\"" << height - pad
        << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(ymin) << "</text>\n";
    out << "<text x=\"" << pad - 8 << "\" y=\"" << pad + 4
        << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(ymax) << "</text>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - pad / 4
        << "\" font-size=\"13\" text-anchor=\"middle\">sweep value</text>\n";
    out << "<text x=\"" << pad / 4 << "\" y=\"" << height / 2 << "\" font-size=\"13\" "
        << "text-anchor=\"middle\" transform=\"rotate(-90 " << pad / 4 << " " << height / 2
        << ")\">" << metric << "</text>\n";

    int color_idx = 0;
    double legend_y = pad;
    for (const auto& [method, pts_in] : stats) {
        auto pts = pts_in;
        std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return a.x < b.x; });
        const char* color = palette[color_idx % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& p : pts) out << fmt(sx(p.x)) << "," << fmt(sy(p.mean)) << " ";
        out << "\"/>\n";
        for (const auto& p : pts) {
            out << "<line x1=\"" << fmt(sx(p.x)) << "\" y1=\"" << fmt(sy(p.mean - p.sd))
                << "\" x2=\"" << fmt(sx(p.x)) << "\" y2=\"" << fmt(sy(p.mean + p.sd))
                << "\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
            out << "<circle cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.mean))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        out << "<text x=\"" << width - pad + 6 << "\" y=\"" << legend_y
            << "\" font-size=\"12\" fill=\"" << color << "\">" << method << "</text>\n";
        legend_y += 16.0;
        ++color_idx;
    }
    out << "</svg>\n";
}

}  // namespace mlsbm
