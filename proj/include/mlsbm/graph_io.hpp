#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mlsbm/graph.hpp"

namespace mlsbm {

// File formats
// ------------
// Manifest (JSON): {"n_nodes": N, "layer_files": ["a.edges", ...],
//                   "labels_file": "labels.txt"}   (labels_file optional)
// Layer file paths are resolved relative to the manifest's directory.
//
// Edge list: one "i j" pair per line, whitespace separated, 1-based node ids;
// lines starting with '#' and blank lines are ignored. Orientation and
// multiplicity are irrelevant: every listed pair is one undirected edge.
//
// Labels file: one integer per line, N lines, labels 1-based.

namespace detail {

inline long parse_int_token(const std::string& tok, const std::string& where) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": non-integer token '" + tok + "'");
    }
    if (pos != tok.size()) {
        throw std::runtime_error(where + ": non-integer token '" + tok + "'");
    }
    return v;
}

}  // namespace detail

// Raw 1-based pairs from an edge-list file, orientation preserved.
inline std::vector<std::pair<int, int>> read_edge_pairs(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge file: " + path);
    std::vector<std::pair<int, int>> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        std::string a, b, extra;
        if (!(ss >> a >> b)) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'i j'");
        }
        if (ss >> extra) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": trailing token");
        }
        const std::string where = path + ":" + std::to_string(lineno);
        const long i = detail::parse_int_token(a, where);
        const long j = detail::parse_int_token(b, where);
        if (i < 1 || j < 1 || i > n || j > n) {
            throw std::runtime_error(where + ": node id out of range [1," + std::to_string(n) + "]");
        }
        pairs.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1));
    }
    return pairs;
}

inline Assignment load_labels(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labels file: " + path);
    Assignment z;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        std::string tok, extra;
        ss >> tok;
        if (ss >> extra) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": trailing token");
        }
        const long v = detail::parse_int_token(tok, path + ":" + std::to_string(lineno));
        if (v < 1) throw std::runtime_error(path + ": labels are 1-based, got " + tok);
        z.push_back(static_cast<int>(v - 1));
    }
    if (static_cast<int>(z.size()) != n) {
        throw std::runtime_error(path + ": expected " + std::to_string(n) + " labels, got " +
                                 std::to_string(z.size()));
    }
    return z;
}

// Same format as load_labels but the count is taken from the file itself.
inline Assignment load_labels_all(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open labels file: " + path);
    Assignment z;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        std::string tok, extra;
        ss >> tok;
        if (ss >> extra) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": trailing token");
        }
        const long v = detail::parse_int_token(tok, path + ":" + std::to_string(lineno));
        if (v < 1) throw std::runtime_error(path + ": labels are 1-based, got " + tok);
        z.push_back(static_cast<int>(v - 1));
    }
    if (z.empty()) throw std::runtime_error(path + ": no labels found");
    return z;
}

struct LoadResult {
    MultiLayerGraph graph;
    std::optional<GroundTruth> truth;
    std::size_t collapsed_pairs = 0;  // listed pairs minus distinct edges
};

inline LoadResult load_multilayer(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("manifest parse error: ") + e.what());
    }
    if (!doc.contains("n_nodes") || !doc["n_nodes"].is_number_integer()) {
        throw std::runtime_error("manifest: missing integer field n_nodes");
    }
    const int n = doc["n_nodes"].get<int>();
    if (n <= 0) throw std::runtime_error("manifest: n_nodes must be positive");
    if (!doc.contains("layer_files") || !doc["layer_files"].is_array() ||
        doc["layer_files"].empty()) {
        throw std::runtime_error("manifest: layer_files must be a non-empty array");
    }
    const auto base = std::filesystem::path(manifest_path).parent_path();
    LoadResult out;
    out.graph.n = n;
    for (const auto& entry : doc["layer_files"]) {
        if (!entry.is_string()) throw std::runtime_error("manifest: layer_files entries must be strings");
        const auto path = (base / entry.get<std::string>()).string();
        auto pairs = read_edge_pairs(path, n);
        const std::size_t listed = pairs.size();
        Layer layer = symmetrize_layer(pairs, n);
        out.collapsed_pairs += listed - layer.edge_count();
        out.graph.layers.push_back(std::move(layer));
    }
    if (doc.contains("labels_file")) {
        if (!doc["labels_file"].is_string()) {
            throw std::runtime_error("manifest: labels_file must be a string");
        }
        const auto path = (base / doc["labels_file"].get<std::string>()).string();
        GroundTruth truth;
        truth.z = load_labels(path, n);
        truth.k = 1 + *std::max_element(truth.z.begin(), truth.z.end());
        out.truth = truth;
    }
    return out;
}

inline void save_labels(const Assignment& z, const std::string& path) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot write labels file: " + path);
    for (int zi : z) outf << (zi + 1) << "\n";
}

// Writes manifest + layer<i>.edges (+ labels.txt) into the manifest's directory.
inline void save_multilayer(const MultiLayerGraph& g, const std::string& manifest_path,
                            const std::optional<GroundTruth>& truth = std::nullopt) {
    const auto base = std::filesystem::path(manifest_path).parent_path();
    if (!base.empty()) std::filesystem::create_directories(base);
    nlohmann::json doc;
    doc["n_nodes"] = g.n;
    std::vector<std::string> names;
    for (int m = 0; m < g.m(); ++m) {
        names.push_back("layer" + std::to_string(m + 1) + ".edges");
        std::ofstream outf(base / names.back());
        if (!outf) throw std::runtime_error("cannot write layer file: " + names.back());
        outf << "# undirected edges, 1-based\n";
        for (const auto& [i, j] : g.layers[m].edges) outf << (i + 1) << " " << (j + 1) << "\n";
    }
    doc["layer_files"] = names;
    if (truth) {
        doc["labels_file"] = "labels.txt";
        save_labels(truth->z, (base / "labels.txt").string());
    }
    std::ofstream outf(manifest_path);
    if (!outf) throw std::runtime_error("cannot write manifest: " + manifest_path);
    outf << doc.dump(2) << "\n";
}

}  // namespace mlsbm
