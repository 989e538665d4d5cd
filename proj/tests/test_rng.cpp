#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "mlsbm/rng.hpp"

using namespace mlsbm;

TEST_CASE("splitmix64 matches the published reference sequence", "[rng]") {
    // First outputs of the reference splitmix64 stepped from states 0 and 1.
    CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(splitmix64(1) == 0x910A2DEC89025CC1ULL);
    CHECK(splitmix64(splitmix64(0)) != splitmix64(0));
}

TEST_CASE("seed mixing separates grid cells and replicates", "[rng]") {
    std::set<std::uint64_t> seen;
    for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
            seen.insert(mix_seed(42, a, b));
        }
    }
    CHECK(seen.size() == 64);
    CHECK(mix_seed(42, 1, 2) == mix_seed(42, 1, 2));
    CHECK(mix_seed(42, 1, 2) != mix_seed(43, 1, 2));
}

TEST_CASE("identical seeds give identical streams", "[rng]") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng c(124);
    bool differs = false;
    Rng a2(123);
    for (int i = 0; i < 10; ++i) differs = differs || (a2.next_u64() != c.next_u64());
    CHECK(differs);
}

TEST_CASE("u01 stays in the half-open unit interval", "[rng]") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.u01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("uniform integers cover the range and respect bounds", "[rng]") {
    Rng rng(9);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = rng.uniform_int(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("bernoulli frequencies track the probability", "[rng]") {
    Rng rng(11);
    int hits = 0;
    const int trials = 20000;
    for (int i = 0; i < trials; ++i) hits += rng.bernoulli(0.3) ? 1 : 0;
    const double freq = static_cast<double>(hits) / trials;
    // 4 standard errors around 0.3
    CHECK(std::abs(freq - 0.3) < 4.0 * std::sqrt(0.3 * 0.7 / trials));
}

TEST_CASE("normal draws have the right first two moments", "[rng]") {
    Rng rng(13);
    const int trials = 20000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < trials; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    const double mean = sum / trials;
    const double var = sq / trials - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(trials)));
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("uniform respects interval endpoints", "[rng]") {
    Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform(-0.25, 0.75);
        CHECK(v >= -0.25);
        CHECK(v < 0.75);
    }
}
