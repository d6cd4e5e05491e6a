#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace grag::community {

struct Edge {
    int u = 0;
    int v = 0;
    double w = 1.0;
};

/// Undirected weighted graph. Duplicate edges are merged by summing weights;
/// u == v entries become self-loops. Neighbor lists are kept sorted so
/// traversal order is reproducible.
class WeightedGraph {
public:
    WeightedGraph() = default;
    WeightedGraph(std::size_t nodes, const std::vector<Edge>& edges);

    std::size_t size() const { return adjacency_.size(); }
    const std::vector<std::pair<int, double>>& neighbors(int node) const { return adjacency_[node]; }
    double self_loop(int node) const { return self_loop_[node]; }
    /// Weighted degree; self-loops count twice.
    double strength(int node) const { return strength_[node]; }
    /// Total edge weight m, each edge counted once.
    double total_weight() const { return total_weight_; }
    std::size_t edge_count() const { return edge_count_; }

private:
    std::vector<std::vector<std::pair<int, double>>> adjacency_;
    std::vector<double> self_loop_;
    std::vector<double> strength_;
    double total_weight_ = 0.0;
    std::size_t edge_count_ = 0;
};

/// Q = sum_c [ e_c/m - resolution * (d_c / 2m)^2 ]. Zero-edge graphs score 0.
double modularity(const WeightedGraph& graph, const std::vector<int>& membership, double resolution);

/// Leveled partition of the graph. Level 0 is the finest; each level k+1
/// community is a union of level k communities, and every community's
/// induced subgraph is connected. Community ids at each level are assigned
/// in order of smallest member node.
struct CommunityHierarchy {
    std::size_t node_count = 0;
    std::vector<std::vector<int>> membership;  // [level][node] -> community id
    std::vector<std::vector<int>> parent_link; // [level][community] -> id at level+1
    std::vector<double> level_modularity;
    std::vector<double> pass_modularity;       // after each local-moving pass

    std::size_t levels() const { return membership.size(); }
    std::size_t community_count(std::size_t level) const;
    /// Member node lists at `level`, indexed by community id, members sorted.
    std::vector<std::vector<int>> communities(std::size_t level) const;
    /// Deepest level with >= 2 communities, else level 0.
    std::size_t query_level() const;
};

struct DetectOptions {
    double resolution = 1.0;
    std::uint64_t seed = 42;
    int restarts = 16;         // independent seeded runs; best modularity wins
    std::size_t max_levels = 4;
    double min_gain = 1e-7;    // stop aggregating below this modularity gain
    double theta = 0.01;       // refinement randomness; 0 = greedy argmax
};

/// Leiden community detection: local moving, refinement, aggregation,
/// iterated to convergence. Deterministic for a fixed seed. Empty graphs
/// yield an empty hierarchy.
CommunityHierarchy detect_communities(const WeightedGraph& graph, const DetectOptions& options);

/// Per-level "node<TAB>community" dump, levels separated by headers.
std::string dump_partitions(const CommunityHierarchy& hierarchy,
                            const std::vector<std::string>& node_names);

}  // namespace grag::community
