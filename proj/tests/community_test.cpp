#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "grag/community.hpp"
#include "grag/util.hpp"
#include "support/oracles.hpp"

using namespace grag;
using test::OracleEdge;

namespace {

community::WeightedGraph make_graph(int nodes, const std::vector<OracleEdge>& edges) {
    std::vector<community::Edge> converted;
    converted.reserve(edges.size());
    for (const auto& e : edges) {
        converted.push_back({e.u, e.v, e.w});
    }
    return community::WeightedGraph(static_cast<std::size_t>(nodes), converted);
}

std::vector<OracleEdge> clique(int offset, int size) {
    std::vector<OracleEdge> edges;
    for (int u = 0; u < size; ++u) {
        for (int v = u + 1; v < size; ++v) {
            edges.push_back({offset + u, offset + v, 1.0});
        }
    }
    return edges;
}

// Random graph: size 2..12, edge probability drawn per graph, sometimes
// weighted, sometimes with isolated nodes.
std::vector<OracleEdge> random_graph(std::mt19937_64& rng, int nodes) {
    const double p = 0.15 + static_cast<double>(rng() % 60) / 100.0;
    const bool weighted = rng() % 2 == 0;
    std::vector<OracleEdge> edges;
    for (int u = 0; u < nodes; ++u) {
        for (int v = u + 1; v < nodes; ++v) {
            if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p) {
                const double w = weighted ? 0.5 * (1.0 + static_cast<double>(rng() % 6)) : 1.0;
                edges.push_back({u, v, w});
            }
        }
    }
    return edges;
}

void check_hierarchy_valid(const community::WeightedGraph& graph,
                           const community::CommunityHierarchy& hierarchy) {
    REQUIRE(hierarchy.levels() >= 1);
    for (std::size_t level = 0; level < hierarchy.levels(); ++level) {
        const auto& membership = hierarchy.membership[level];
        REQUIRE(membership.size() == graph.size());
        // every node covered exactly once with contiguous ids
        const std::size_t count = hierarchy.community_count(level);
        std::vector<int> seen(count, 0);
        for (int c : membership) {
            REQUIRE(c >= 0);
            REQUIRE(static_cast<std::size_t>(c) < count);
            seen[c] = 1;
        }
        CHECK(std::accumulate(seen.begin(), seen.end(), 0) == static_cast<int>(count));

        // connectivity of every community via BFS over the induced subgraph
        for (const auto& members : hierarchy.communities(level)) {
            REQUIRE(!members.empty());
            std::set<int> inside(members.begin(), members.end());
            std::set<int> visited{members.front()};
            std::vector<int> stack{members.front()};
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (const auto& [u, w] : graph.neighbors(v)) {
                    if (inside.count(u) && !visited.count(u)) {
                        visited.insert(u);
                        stack.push_back(u);
                    }
                }
            }
            CHECK(visited.size() == inside.size());
        }

        // level k+1 communities are unions of level k communities
        if (level + 1 < hierarchy.levels()) {
            std::map<int, int> parent_of;
            for (std::size_t v = 0; v < graph.size(); ++v) {
                const int child = hierarchy.membership[level][v];
                const int parent = hierarchy.membership[level + 1][v];
                auto it = parent_of.find(child);
                if (it == parent_of.end()) {
                    parent_of[child] = parent;
                } else {
                    CHECK(it->second == parent);
                }
                CHECK(hierarchy.parent_link[level][child] == parent);
            }
        }
    }
}

}  // namespace

TEST_CASE("modularity matches the hand cases") {
    // K3 in one community at resolution 1 scores 0.
    auto k3 = make_graph(3, clique(0, 3));
    CHECK(community::modularity(k3, {0, 0, 0}, 1.0) == doctest::Approx(0.0).epsilon(1e-12));

    // Edgeless graph scores 0 by definition.
    auto edgeless = make_graph(4, {});
    CHECK(community::modularity(edgeless, {0, 1, 2, 3}, 1.0) == 0.0);

    // Two triangles joined by a bridge, split into the triangles: brute force
    // confirms this is the optimum over all partitions of the 6 nodes.
    auto edges = clique(0, 3);
    auto right = clique(3, 3);
    edges.insert(edges.end(), right.begin(), right.end());
    edges.push_back({2, 3, 1.0});
    auto graph = make_graph(6, edges);
    const double split = community::modularity(graph, {0, 0, 0, 1, 1, 1}, 1.0);
    CHECK(split == doctest::Approx(5.0 / 14.0).epsilon(1e-12));
    const double best = test::oracle_max_modularity(6, edges, 1.0);
    CHECK(split == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("modularity rejects a partition that misses nodes") {
    auto k3 = make_graph(3, clique(0, 3));
    const std::vector<int> partial{0, 0};
    CHECK_THROWS_AS(community::modularity(k3, partial, 1.0), Error);
}

TEST_CASE("detect_communities on trivial graphs") {
    community::DetectOptions options;

    auto empty = community::detect_communities(community::WeightedGraph(0, {}), options);
    CHECK(empty.levels() == 0);

    auto single = community::detect_communities(community::WeightedGraph(1, {}), options);
    REQUIRE(single.levels() == 1);
    CHECK(single.community_count(0) == 1);

    auto isolated = community::detect_communities(community::WeightedGraph(5, {}), options);
    REQUIRE(isolated.levels() == 1);
    CHECK(isolated.community_count(0) == 5);
}

TEST_CASE("two 5-cliques joined by one edge split into the cliques") {
    auto edges = clique(0, 5);
    auto right = clique(5, 5);
    edges.insert(edges.end(), right.begin(), right.end());
    edges.push_back({4, 5, 1.0});
    auto graph = make_graph(10, edges);

    community::DetectOptions options;
    auto hierarchy = community::detect_communities(graph, options);
    check_hierarchy_valid(graph, hierarchy);
    REQUIRE(hierarchy.community_count(0) == 2);
    std::vector<int> expected = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    CHECK(hierarchy.membership[0] == expected);
}

TEST_CASE("planted partition with 1000 nodes is recovered in under a second") {
    std::vector<int> labels;
    auto edges = test::planted_partition(1000, 10, 0.15, 0.002, 2024, labels);
    auto graph = make_graph(1000, edges);

    const auto started = std::chrono::steady_clock::now();
    community::DetectOptions options;
    auto hierarchy = community::detect_communities(graph, options);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    CHECK(elapsed < 1.0);

    const auto& top = hierarchy.membership[hierarchy.levels() - 1];
    CHECK(test::adjusted_rand_index(top, labels) >= 0.9);
}

TEST_CASE("property suite: validity, connectivity, optimality, determinism") {
    std::mt19937_64 rng(4242);
    int exhaustive_checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int nodes = 2 + static_cast<int>(rng() % 11);  // 2..12
        auto edges = random_graph(rng, nodes);
        auto graph = make_graph(nodes, edges);
        community::DetectOptions options;
        options.seed = rng();

        auto hierarchy = community::detect_communities(graph, options);
        check_hierarchy_valid(graph, hierarchy);

        // replay determinism under the fixed seed
        auto replay = community::detect_communities(graph, options);
        CHECK(replay.membership == hierarchy.membership);
        CHECK(community::dump_partitions(replay, {}) ==
              community::dump_partitions(hierarchy, {}));

        // modularity never decreases across local-moving passes
        for (std::size_t i = 1; i < hierarchy.pass_modularity.size(); ++i) {
            CHECK(hierarchy.pass_modularity[i] >= hierarchy.pass_modularity[i - 1] - 1e-9);
        }

        const double level0 = community::modularity(graph, hierarchy.membership[0], 1.0);

        // level 0 beats the trivial partitions
        std::vector<int> singles(nodes);
        std::iota(singles.begin(), singles.end(), 0);
        CHECK(level0 >= community::modularity(graph, singles, 1.0) - 1e-9);
        CHECK(level0 >=
              community::modularity(graph, std::vector<int>(nodes, 0), 1.0) - 1e-9);

        // exhaustive optimum on small instances
        if (nodes <= 8) {
            ++exhaustive_checked;
            const double best = test::oracle_max_modularity(nodes, edges, 1.0);
            CHECK(std::abs(level0 - best) < 1e-9);
        }
    }
    CHECK(exhaustive_checked > 50);
}

TEST_CASE("higher resolution splits the two-clique graph no coarser") {
    auto edges = clique(0, 4);
    auto right = clique(4, 4);
    edges.insert(edges.end(), right.begin(), right.end());
    edges.push_back({3, 4, 1.0});
    auto graph = make_graph(8, edges);
    community::DetectOptions fine;
    fine.resolution = 4.0;
    community::DetectOptions coarse;
    coarse.resolution = 0.25;
    auto fine_h = community::detect_communities(graph, fine);
    auto coarse_h = community::detect_communities(graph, coarse);
    CHECK(fine_h.community_count(fine_h.levels() - 1) >=
          coarse_h.community_count(coarse_h.levels() - 1));
}

TEST_CASE("query level picks the deepest level with at least two communities") {
    auto edges = clique(0, 5);
    auto right = clique(5, 5);
    edges.insert(edges.end(), right.begin(), right.end());
    edges.push_back({4, 5, 1.0});
    auto graph = make_graph(10, edges);
    auto hierarchy = community::detect_communities(graph, community::DetectOptions{});
    const auto level = hierarchy.query_level();
    CHECK(hierarchy.community_count(level) >= 2);
}
