#include <doctest.h>

#include <vector>

#include "housing/region_graph.hpp"
#include "housing/rng.hpp"

using namespace housing;

namespace {

/// Independent all-pairs oracle: Floyd-Warshall on an explicit matrix.
std::vector<std::vector<int>> floyd_warshall(int n, const std::vector<std::pair<int, int>>& edges) {
    const int inf = 1 << 20;
    std::vector<std::vector<int>> d(static_cast<std::size_t>(n),
                                    std::vector<int>(static_cast<std::size_t>(n), inf));
    for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0;
    for (const auto& [a, b] : edges) {
        d[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = 1;
        d[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = 1;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int via = d[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] +
                                d[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                if (via < d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                    d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = via;
            }
    return d;
}

} // namespace

TEST_CASE("three-vertex path distances and outreach by hand") {
    const RegionGraph g(Topology::adjacency(3, {{0, 1}, {1, 2}}));
    CHECK(g.distance(0, 2) == 2);
    CHECK(g.distance(2, 0) == 2);
    CHECK(g.distance(0, 1) == 1);
    CHECK(g.eccentricity(0) == 2);
    CHECK(g.eccentricity(1) == 1);
    CHECK(g.outreach(0, 0) == doctest::Approx(1.0));
    CHECK(g.outreach(0, 1) == doctest::Approx(0.5));
    CHECK(g.outreach(0, 2) == doctest::Approx(0.0));
    // From the center both neighbours sit at the eccentricity.
    CHECK(g.outreach(1, 0) == doctest::Approx(0.0));
    CHECK(g.outreach(1, 2) == doctest::Approx(0.0));
}

TEST_CASE("singleton graph reaches itself fully") {
    const RegionGraph g(Topology::singleton());
    CHECK(g.size() == 1);
    CHECK(g.eccentricity(0) == 0);
    CHECK(g.outreach(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("complete graph has unit distances everywhere") {
    const RegionGraph g(Topology::complete(5));
    for (int i = 0; i < 5; ++i) {
        CHECK(g.eccentricity(i) == 1);
        for (int j = 0; j < 5; ++j) {
            CHECK(g.distance(i, j) == (i == j ? 0 : 1));
            CHECK(g.outreach(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("distances match a Floyd-Warshall oracle on random graphs") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(2, 8));
        // Random spanning tree keeps it connected; extra edges add cycles.
        std::vector<std::pair<int, int>> edges;
        for (int v = 1; v < n; ++v)
            edges.emplace_back(static_cast<int>(rng.uniform_int(0, v - 1)), v);
        const int extra = static_cast<int>(rng.uniform_int(0, n));
        for (int e = 0; e < extra; ++e) {
            const int a = static_cast<int>(rng.uniform_int(0, n - 1));
            const int b = static_cast<int>(rng.uniform_int(0, n - 1));
            if (a != b) edges.emplace_back(a, b);
        }

        const RegionGraph g(Topology::adjacency(n, edges));
        const auto oracle = floyd_warshall(n, edges);
        for (int i = 0; i < n; ++i) {
            int ecc = 0;
            for (int j = 0; j < n; ++j) {
                REQUIRE(g.distance(i, j) ==
                        oracle[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
                ecc = std::max(ecc, oracle[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            }
            REQUIRE(g.eccentricity(i) == ecc);
        }
    }
}

TEST_CASE("disconnected topologies are rejected") {
    CHECK_THROWS_AS(RegionGraph(Topology::adjacency(4, {{0, 1}, {2, 3}})), DisconnectedGraph);
    CHECK_THROWS_AS(RegionGraph(Topology::adjacency(2, {})), DisconnectedGraph);
}

TEST_CASE("area index bounds are enforced") {
    const RegionGraph g(Topology::complete(3));
    CHECK_THROWS_AS(g.distance(0, 3), UnknownArea);
    CHECK_THROWS_AS(g.distance(-1, 0), UnknownArea);
    CHECK_THROWS_AS(g.eccentricity(7), UnknownArea);
}

TEST_CASE("edge lists parse with first-appearance area indexing") {
    const std::vector<std::vector<std::string>> rows = {
        {"area_a", "area_b"}, {"west", "north"}, {"north", "east"}, {"west", "east"}};
    std::vector<std::string> names;
    const Topology topo = parse_edge_list(rows, names);
    REQUIRE(names.size() == 3);
    CHECK(names[0] == "west");
    CHECK(names[1] == "north");
    CHECK(names[2] == "east");
    CHECK(topo.n_areas == 3);
    REQUIRE(topo.edges.size() == 3);
    CHECK(topo.edges[0] == std::pair<int, int>{0, 1});
    const RegionGraph g(topo);
    CHECK(g.distance(0, 2) == 1);
}
