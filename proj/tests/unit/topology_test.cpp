#include <cmath>
#include <random>

#include "doctest.h"
#include "check.hpp"
#include "fixtures.hpp"
#include "manetlab/error.hpp"
#include "manetlab/topology.hpp"

using namespace manetlab;
using namespace manetlab::testing;

namespace {

GenParams params(std::size_t n, int p, int d, std::uint64_t seed = 1) {
    GenParams g;
    g.n = n;
    g.density_pct = p;
    g.max_degree = d;
    g.seed = seed;
    return g;
}

}  // namespace

TEST_CASE("sample_matrix extremes") {
    TopologyRng rng(3);
    auto empty = sample_matrix(params(4, 0, 3), rng);
    CHECK(empty.adjacency.edges().empty());
    auto full = sample_matrix(params(4, 100, 3), rng);
    for (std::size_t i = 0; i < 4; ++i) CHECK(full.adjacency.degree(i) == 3);
    CHECK_NOTHROW(validate_matrix(full.adjacency));
    CHECK_FALSE(full.status.has_value());
}

TEST_CASE("sample_matrix edge frequency at p=50 stays within 3 sigma") {
    // 0.5 +- 3*sqrt(0.25/10000) = [0.485, 0.515]
    TopologyRng rng(11);
    int hits[3] = {0, 0, 0};
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        auto t = sample_matrix(params(3, 50, 2), rng);
        hits[0] += t.adjacency(0, 1);
        hits[1] += t.adjacency(0, 2);
        hits[2] += t.adjacency(1, 2);
    }
    for (int h : hits) {
        double f = static_cast<double>(h) / trials;
        CHECK(f >= 0.485);
        CHECK(f <= 0.515);
    }
}

TEST_CASE("classify examples") {
    std::vector<std::pair<std::size_t, std::size_t>> path{{0, 1}, {1, 2}};
    Topology t{AdjacencyMatrix::from_edges(3, path), {}, 0, false};
    CHECK(classify(t, 2) == TopologyStatus::Accepted100);

    std::vector<std::pair<std::size_t, std::size_t>> split{{0, 1}};
    t.adjacency = AdjacencyMatrix::from_edges(3, split);
    CHECK(classify(t, 4) == TopologyStatus::Rejected99);
    CHECK(classify_detailed(t.adjacency, 4).reason == RejectReason::Disconnected);

    std::vector<std::pair<std::size_t, std::size_t>> k4{{0, 1}, {0, 2}, {0, 3},
                                                        {1, 2}, {1, 3}, {2, 3}};
    t.adjacency = AdjacencyMatrix::from_edges(4, k4);
    CHECK(classify(t, 2) == TopologyStatus::Rejected99);
    CHECK(classify_detailed(t.adjacency, 2).reason == RejectReason::OverConnected);
    CHECK(classify(t, 3) == TopologyStatus::Accepted100);

    t.adjacency = AdjacencyMatrix(1);
    CHECK(classify(t, 0) == TopologyStatus::Accepted100);
    t.adjacency = AdjacencyMatrix(2);
    CHECK(classify(t, 1) == TopologyStatus::Rejected99);
}

TEST_CASE("classify rejects malformed matrices") {
    CHECK(code_of([] { classify_detailed(AdjacencyMatrix::from_rows({{0, 1}, {0, 0}}), 2); }) ==
          Errc::MalformedMatrix);
    CHECK(code_of([] { classify_detailed(AdjacencyMatrix::from_rows({{1, 0}, {0, 0}}), 2); }) ==
          Errc::MalformedMatrix);
    CHECK(code_of([] { classify_detailed(AdjacencyMatrix::from_rows({{0, 2}, {2, 0}}), 2); }) ==
          Errc::MalformedMatrix);
    CHECK(code_of([] { AdjacencyMatrix::from_rows({{0, 1}, {1}}); }) == Errc::MalformedMatrix);
}

TEST_CASE("classify agrees with path search on every graph up to n=4 and sampled n=5") {
    for (std::size_t n = 1; n <= 4; ++n) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pair_count(n)); ++mask) {
            auto m = matrix_from_mask(n, mask);
            for (int d = 0; d <= 4; ++d) {
                bool expect = path_search_connected(m) &&
                              oracle_max_degree(m) <= static_cast<std::size_t>(d);
                REQUIRE((classify_detailed(m, d).status == TopologyStatus::Accepted100) == expect);
            }
        }
    }
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        auto m = matrix_from_mask(5, rng() & 0x3ff);
        int d = static_cast<int>(rng() % 5);
        bool expect = path_search_connected(m) && oracle_max_degree(m) <= static_cast<std::size_t>(d);
        REQUIRE((classify_detailed(m, d).status == TopologyStatus::Accepted100) == expect);
    }
}

TEST_CASE("BFS root choice is immaterial for connectivity") {
    // Relabelling the nodes (moving each one to index 0) never changes the verdict.
    for (std::uint64_t mask = 0; mask < 64; ++mask) {
        auto m = matrix_from_mask(4, mask);
        bool base = is_connected(m);
        for (std::size_t root = 1; root < 4; ++root) {
            AdjacencyMatrix swapped(4);
            auto relabel = [&](std::size_t x) { return x == 0 ? root : (x == root ? 0 : x); };
            for (std::size_t a = 0; a < 4; ++a)
                for (std::size_t b = 0; b < 4; ++b) swapped.set_cell(relabel(a), relabel(b), m(a, b));
            REQUIRE(is_connected(swapped) == base);
        }
    }
}

TEST_CASE("generate examples") {
    auto one = generate(params(1, 37, 0));
    CHECK(one.topology.adjacency.size() == 1);
    CHECK(one.topology.status == TopologyStatus::Accepted100);
    CHECK(one.attempts == 1);

    CHECK(code_of([] { generate(params(5, 50, 1)); }) == Errc::Infeasible);
    CHECK(code_of([] { generate(params(2, 50, 0)); }) == Errc::Infeasible);
    CHECK(code_of([] { generate(params(3, 101, 2)); }) == Errc::Infeasible);
    CHECK(code_of([] { generate(params(3, -1, 2)); }) == Errc::Infeasible);
    CHECK_NOTHROW(generate(params(2, 50, 1)));
}

TEST_CASE("generate reports exhaustion with rejection counts") {
    auto p = params(4, 0, 3);
    p.max_attempts = 25;
    try {
        generate(p);
        FAIL("expected exhaustion");
    } catch (const GenerationExhausted& e) {
        CHECK(e.code() == Errc::GenerationExhausted);
        CHECK(e.disconnected() == 25);
        CHECK(e.over_connected() == 0);
    }
    p = params(4, 100, 2);
    p.max_attempts = 10;
    try {
        generate(p);
        FAIL("expected exhaustion");
    } catch (const GenerationExhausted& e) {
        CHECK(e.over_connected() == 10);
    }
}

TEST_CASE("first-attempt acceptance at n=3 p=50 D=2 matches enumeration") {
    // Oracle: 4 of the 8 edge subsets on 3 nodes are connected with degree <= 2.
    int good = 0;
    for (std::uint64_t mask = 0; mask < 8; ++mask) {
        auto m = matrix_from_mask(3, mask);
        good += union_find_connected(m) && oracle_max_degree(m) <= 2;
    }
    REQUIRE(good == 4);
    const double analytic = good / 8.0;

    int first = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) first += generate(params(3, 50, 2, seed)).attempts == 1;
    double rate = first / 10000.0;
    CHECK(std::abs(rate - analytic) <= 0.015);
}

TEST_CASE("generate output invariants over random feasible params") {
    std::mt19937_64 rng(2024);
    int generated = 0, exhausted = 0;
    for (int i = 0; i < 1000; ++i) {
        auto p = params(2 + rng() % 7, static_cast<int>(10 + rng() % 81), static_cast<int>(1 + rng() % 4),
                        rng());
        try {
            check_feasible(p);
        } catch (const Error&) {
            continue;
        }
        Generated g;
        try {
            g = generate(p);
        } catch (const GenerationExhausted& e) {
            // Dense draws against a tight degree bound can legitimately run out.
            REQUIRE(e.over_connected() + e.disconnected() == p.max_attempts);
            ++exhausted;
            continue;
        }
        ++generated;
        const auto& m = g.topology.adjacency;
        REQUIRE(m.size() == p.n);
        for (std::size_t a = 0; a < m.size(); ++a) {
            REQUIRE(m(a, a) == 0);
            for (std::size_t b = 0; b < m.size(); ++b) {
                REQUIRE(m(a, b) == m(b, a));
                REQUIRE(m(a, b) <= 1);
            }
        }
        REQUIRE(oracle_max_degree(m) <= static_cast<std::size_t>(p.max_degree));
        REQUIRE(union_find_connected(m));
        REQUIRE(g.topology.status == TopologyStatus::Accepted100);

        auto again = generate(p);
        REQUIRE(again.topology == g.topology);
        REQUIRE(again.attempts == g.attempts);
    }
    CHECK(generated > 500);
    MESSAGE("generated " << generated << ", exhausted " << exhausted);
}

TEST_CASE("to_dot canonical form") {
    std::vector<std::string> names{"sai", "pritu", "nitin"};
    std::vector<std::pair<std::size_t, std::size_t>> one{{0, 1}};
    Topology t{AdjacencyMatrix::from_edges(3, one), TopologyStatus::Rejected99, 4, false};
    CHECK(to_dot(t, names) ==
          "graph topo_4 {\n  \"sai\" -- \"pritu\";\n  \"nitin\";\n}\n");

    Topology single{AdjacencyMatrix(1), TopologyStatus::Accepted100, 0, false};
    std::vector<std::string> solo{"sai"};
    CHECK(to_dot(single, solo) == "graph topo_0 {\n  \"sai\";\n}\n");

    std::vector<std::pair<std::size_t, std::size_t>> k3{{0, 1}, {0, 2}, {1, 2}};
    Topology tri{AdjacencyMatrix::from_edges(3, k3), TopologyStatus::Accepted100, 0, false};
    auto dot = to_dot(tri, names);
    CHECK(dot == "graph topo_0 {\n  \"sai\" -- \"pritu\";\n  \"sai\" -- \"nitin\";\n"
                 "  \"pritu\" -- \"nitin\";\n}\n");

    CHECK(code_of([&] { to_dot(tri, solo); }) == Errc::DimensionMismatch);
    Topology bad{AdjacencyMatrix::from_rows({{0, 1}, {0, 0}}), {}, 0, false};
    CHECK(code_of([&] { to_dot(bad, std::vector<std::string>{"a", "b"}); }) == Errc::MalformedMatrix);
}

TEST_CASE("to_dot parses back to the same adjacency") {
    for (std::size_t n = 1; n <= 5; ++n) {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pair_count(n)); ++mask) {
            Topology t{matrix_from_mask(n, mask), {}, mask, false};
            auto dot = to_dot(t, names);
            REQUIRE(parse_dot(dot, names) == t.adjacency);
            // Each undirected edge appears once.
            std::size_t arrows = 0;
            for (std::size_t pos = dot.find("--"); pos != std::string::npos; pos = dot.find("--", pos + 2)) ++arrows;
            REQUIRE(arrows == t.adjacency.edges().size());
        }
    }
    std::vector<std::string> names{"a", "b"};
    CHECK_THROWS_AS(parse_dot("graph x {\n  \"a\" -- \"zz\";\n}\n", names), ParseError);
    CHECK_THROWS_AS(parse_dot("graph x {\n  \"a\" -- \"b\"\n}\n", names), ParseError);
    CHECK_THROWS_AS(parse_dot("graph x {\n", names), ParseError);
}
