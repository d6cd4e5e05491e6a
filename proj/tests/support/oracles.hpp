#pragma once

// Independent oracles used by the community-detection tests. Everything here
// recomputes from first principles (edge lists, pair counting) so it shares
// no code with the implementation under test.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace grag::test {

struct OracleEdge {
    int u;
    int v;
    double w;
};

// Modularity straight from the definition: Q = sum_c [e_c/m - g*(d_c/2m)^2].
inline double oracle_modularity(int nodes, const std::vector<OracleEdge>& edges,
                                const std::vector<int>& membership, double resolution) {
    double m = 0.0;
    for (const auto& e : edges) {
        m += e.w;
    }
    if (m <= 0.0) {
        return 0.0;
    }
    std::map<int, double> intra;
    std::map<int, double> degree;
    for (const auto& e : edges) {
        if (membership[e.u] == membership[e.v]) {
            intra[membership[e.u]] += e.w;
        }
        degree[membership[e.u]] += e.w;
        degree[membership[e.v]] += e.w;  // self-loop counts twice
    }
    double q = 0.0;
    for (int c = 0; c < nodes; ++c) {
        auto deg = degree.find(c);
        const double d = deg == degree.end() ? 0.0 : deg->second;
        auto in = intra.find(c);
        const double e_c = in == intra.end() ? 0.0 : in->second;
        q += e_c / m - resolution * (d / (2.0 * m)) * (d / (2.0 * m));
    }
    return q;
}

// Exhaustive maximum over all set partitions (restricted growth strings).
// Feasible up to ~10 nodes.
inline double oracle_max_modularity(int nodes, const std::vector<OracleEdge>& edges,
                                    double resolution,
                                    std::vector<int>* best_partition = nullptr) {
    std::vector<int> assignment(nodes, 0);
    std::vector<int> max_prefix(nodes, 0);  // highest label used before index i
    double best = -1e18;
    for (;;) {
        const double q = oracle_modularity(nodes, edges, assignment, resolution);
        if (q > best) {
            best = q;
            if (best_partition) {
                *best_partition = assignment;
            }
        }
        // next restricted growth string
        int i = nodes - 1;
        for (; i > 0; --i) {
            if (assignment[i] <= max_prefix[i]) {
                ++assignment[i];
                break;
            }
        }
        if (i == 0) {
            break;
        }
        for (int j = i + 1; j < nodes; ++j) {
            assignment[j] = 0;
        }
        for (int j = i; j < nodes; ++j) {
            max_prefix[j] = std::max(max_prefix[j - 1], assignment[j - 1]);
        }
    }
    return best;
}

// Adjusted Rand Index between two labelings by pair counting.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    std::map<std::pair<int, int>, double> cross;
    std::map<int, double> row;
    std::map<int, double> col;
    for (std::size_t i = 0; i < n; ++i) {
        cross[{a[i], b[i]}] += 1.0;
        row[a[i]] += 1.0;
        col[b[i]] += 1.0;
    }
    auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
    double sum_cross = 0.0, sum_row = 0.0, sum_col = 0.0;
    for (const auto& [k, v] : cross) {
        sum_cross += choose2(v);
    }
    for (const auto& [k, v] : row) {
        sum_row += choose2(v);
    }
    for (const auto& [k, v] : col) {
        sum_col += choose2(v);
    }
    const double total = choose2(static_cast<double>(n));
    const double expected = sum_row * sum_col / total;
    const double max_index = (sum_row + sum_col) / 2.0;
    if (max_index == expected) {
        return 1.0;
    }
    return (sum_cross - expected) / (max_index - expected);
}

// Planted-partition graph: `blocks` equal groups, p_in within, p_out across.
inline std::vector<OracleEdge> planted_partition(int nodes, int blocks, double p_in, double p_out,
                                                 std::uint64_t seed, std::vector<int>& labels) {
    labels.resize(nodes);
    const int block_size = nodes / blocks;
    for (int v = 0; v < nodes; ++v) {
        labels[v] = std::min(v / block_size, blocks - 1);
    }
    std::mt19937_64 rng(seed);
    auto coin = [&](double p) {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
    };
    std::vector<OracleEdge> edges;
    for (int u = 0; u < nodes; ++u) {
        for (int v = u + 1; v < nodes; ++v) {
            if (coin(labels[u] == labels[v] ? p_in : p_out)) {
                edges.push_back({u, v, 1.0});
            }
        }
    }
    return edges;
}

}  // namespace grag::test
