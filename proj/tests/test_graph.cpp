#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mlsbm/graph.hpp"

using namespace mlsbm;

TEST_CASE("make_layer sorts, deduplicates, and validates", "[graph]") {
    Layer layer = make_layer(4, {{2, 3}, {0, 1}, {0, 1}, {1, 3}});
    REQUIRE(layer.edge_count() == 3);
    CHECK(layer.edges[0] == std::make_pair(0, 1));
    CHECK(layer.edges[2] == std::make_pair(2, 3));
    CHECK(layer.adj[1].size() == 2);
    CHECK_THROWS_AS(make_layer(2, {{0, 5}}), std::invalid_argument);
    CHECK_THROWS_AS(make_layer(3, {{2, 1}}), std::invalid_argument);
}

TEST_CASE("symmetrize_layer collapses orientation and repeats", "[graph]") {
    Layer layer = symmetrize_layer({{1, 0}, {0, 1}, {2, 1}, {1, 2}, {1, 2}}, 3);
    CHECK(layer.edge_count() == 2);
    CHECK_THROWS_AS(symmetrize_layer({{1, 1}}, 3), std::invalid_argument);
    CHECK_THROWS_AS(symmetrize_layer({{0, 3}}, 3), std::invalid_argument);
}

TEST_CASE("average degree is twice the edge count over n", "[graph]") {
    MultiLayerGraph g;
    g.n = 4;
    g.layers.push_back(make_layer(4, {{0, 1}, {1, 2}, {2, 3}}));
    g.layers.push_back(make_layer(4, {{0, 3}}));
    const auto deg = average_degrees(g);
    REQUIRE(deg.size() == 2);
    CHECK(deg[0] == Catch::Approx(1.5));
    CHECK(deg[1] == Catch::Approx(0.5));
}

TEST_CASE("single_layer_graph extracts one layer and validates the index", "[graph]") {
    MultiLayerGraph g;
    g.n = 3;
    g.layers.push_back(make_layer(3, {{0, 1}}));
    g.layers.push_back(make_layer(3, {{1, 2}}));
    const MultiLayerGraph one = single_layer_graph(g, 1);
    CHECK(one.m() == 1);
    CHECK(one.layers[0].edges[0] == std::make_pair(1, 2));
    CHECK_THROWS_AS(single_layer_graph(g, 2), std::invalid_argument);
}

TEST_CASE("sampler validates its probability matrices", "[graph]") {
    Assignment z = {0, 1, 0, 1};
    Mat bad(2, 2, 0.5);
    bad(0, 1) = 0.2;  // asymmetric
    CHECK_THROWS_AS(generate_mlsbm(4, z, {bad}, 1), std::invalid_argument);
    Mat out_of_range(2, 2, 1.5);
    CHECK_THROWS_AS(generate_mlsbm(4, z, {out_of_range}, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_mlsbm(4, {0, 1, 0, 2}, {Mat(2, 2, 0.5)}, 1), std::invalid_argument);
}

TEST_CASE("sampler is deterministic in the seed", "[graph]") {
    Assignment z;
    for (int i = 0; i < 20; ++i) z.push_back(i % 3);
    Mat p(3, 3, 0.2);
    for (int q = 0; q < 3; ++q) p(q, q) = 0.6;
    const MultiLayerGraph a = generate_mlsbm(20, z, {p, p}, 99);
    const MultiLayerGraph b = generate_mlsbm(20, z, {p, p}, 99);
    REQUIRE(a.m() == b.m());
    for (int m = 0; m < a.m(); ++m) CHECK(a.layers[m].edges == b.layers[m].edges);
    const MultiLayerGraph c = generate_mlsbm(20, z, {p, p}, 100);
    bool same = true;
    for (int m = 0; m < a.m(); ++m) same = same && (a.layers[m].edges == c.layers[m].edges);
    CHECK_FALSE(same);
}

TEST_CASE("sampled edge frequencies match the block probabilities", "[graph]") {
    // two nodes p=0.37: frequency over many seeds within 4 standard errors
    Assignment z = {0, 1};
    Mat p(2, 2, 0.37);
    const int reps = 2000;
    int hits = 0;
    for (int r = 0; r < reps; ++r) {
        const MultiLayerGraph g = generate_mlsbm(2, z, {p}, 1000 + r);
        hits += g.layers[0].edge_count() == 1 ? 1 : 0;
    }
    const double freq = static_cast<double>(hits) / reps;
    CHECK(std::abs(freq - 0.37) < 4.0 * std::sqrt(0.37 * 0.63 / reps));
}

TEST_CASE("planted scenarios respect their parameter ranges", "[graph]") {
    for (int rep = 0; rep < 10; ++rep) {
        const PlantedGraph a = generate_planted(30, 3, 4, Scenario::all_strong, 50 + rep);
        REQUIRE(a.within.size() == 4);
        for (int m = 0; m < 4; ++m) {
            CHECK(a.between[m] >= 0.08);
            CHECK(a.between[m] <= 0.12);
            CHECK(a.within[m] == Catch::Approx(3.0 * a.between[m]));
        }
        const PlantedGraph b = generate_planted(30, 3, 4, Scenario::mixed, 90 + rep);
        for (int m = 0; m < 4; ++m) {
            CHECK(b.between[m] >= 0.06);
            CHECK(b.between[m] <= 0.12);
            const double ratio = b.within[m] / b.between[m];
            CHECK(ratio >= 1.5);
            CHECK(ratio <= 3.0);
        }
    }
}

TEST_CASE("planted labels cover the requested range and sizes are sane", "[graph]") {
    const PlantedGraph p = generate_planted(200, 5, 2, Scenario::all_strong, 7);
    REQUIRE(p.truth.z.size() == 200);
    std::vector<int> counts(5, 0);
    for (int zi : p.truth.z) {
        REQUIRE(zi >= 0);
        REQUIRE(zi < 5);
        ++counts[zi];
    }
    for (int c : counts) CHECK(c > 10);  // wildly lopsided draws would signal a bug
    CHECK(parse_scenario("all_strong") == Scenario::all_strong);
    CHECK(parse_scenario("mixed") == Scenario::mixed);
    CHECK_THROWS_AS(parse_scenario("bogus"), std::invalid_argument);
    CHECK_THROWS_AS(generate_planted(3, 5, 1, Scenario::mixed, 1), std::invalid_argument);
}
