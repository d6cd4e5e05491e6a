#include "grag/community.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "grag/util.hpp"

namespace grag::community {

namespace {
constexpr double kScoreEps = 1e-12;
}

WeightedGraph::WeightedGraph(std::size_t nodes, const std::vector<Edge>& edges) {
    adjacency_.resize(nodes);
    self_loop_.assign(nodes, 0.0);
    strength_.assign(nodes, 0.0);

    std::map<std::pair<int, int>, double> merged;
    for (const auto& edge : edges) {
        if (edge.u < 0 || edge.v < 0 || static_cast<std::size_t>(edge.u) >= nodes ||
            static_cast<std::size_t>(edge.v) >= nodes) {
            throw Error(Error::Kind::invalid_argument, "edge endpoint out of range");
        }
        if (edge.w < 0.0) {
            throw Error(Error::Kind::invalid_argument, "edge weight must be non-negative");
        }
        if (edge.u == edge.v) {
            self_loop_[edge.u] += edge.w;
        } else {
            merged[{std::min(edge.u, edge.v), std::max(edge.u, edge.v)}] += edge.w;
        }
    }
    for (const auto& [key, weight] : merged) {
        adjacency_[key.first].emplace_back(key.second, weight);
        adjacency_[key.second].emplace_back(key.first, weight);
        total_weight_ += weight;
        strength_[key.first] += weight;
        strength_[key.second] += weight;
    }
    edge_count_ = merged.size();
    for (std::size_t v = 0; v < nodes; ++v) {
        std::sort(adjacency_[v].begin(), adjacency_[v].end());
        strength_[v] += 2.0 * self_loop_[v];
        total_weight_ += self_loop_[v];
        if (self_loop_[v] > 0.0) {
            ++edge_count_;
        }
    }
}

double modularity(const WeightedGraph& graph, const std::vector<int>& membership, double resolution) {
    if (membership.size() != graph.size()) {
        throw Error(Error::Kind::invalid_argument, "partition does not cover all nodes");
    }
    const double m = graph.total_weight();
    if (m <= 0.0) {
        return 0.0;
    }
    int max_comm = -1;
    for (std::size_t v = 0; v < graph.size(); ++v) {
        if (membership[v] < 0) {
            throw Error(Error::Kind::invalid_argument, "negative community id in partition");
        }
        max_comm = std::max(max_comm, membership[v]);
    }
    std::vector<double> intra(max_comm + 1, 0.0);
    std::vector<double> degree(max_comm + 1, 0.0);
    for (std::size_t v = 0; v < graph.size(); ++v) {
        degree[membership[v]] += graph.strength(v);
        intra[membership[v]] += graph.self_loop(v);
        for (const auto& [u, w] : graph.neighbors(static_cast<int>(v))) {
            if (static_cast<std::size_t>(u) > v && membership[u] == membership[v]) {
                intra[membership[v]] += w;
            }
        }
    }
    double q = 0.0;
    for (int c = 0; c <= max_comm; ++c) {
        double share = degree[c] / (2.0 * m);
        q += intra[c] / m - resolution * share * share;
    }
    return q;
}

namespace {

// Mutable partition bookkeeping over one (possibly aggregated) graph.
struct MoveState {
    std::vector<int> comm;
    std::vector<double> comm_strength;
    std::vector<int> comm_size;

    static MoveState singletons(const WeightedGraph& graph) {
        MoveState state;
        state.comm.resize(graph.size());
        std::iota(state.comm.begin(), state.comm.end(), 0);
        state.comm_strength.resize(graph.size());
        state.comm_size.assign(graph.size(), 1);
        for (std::size_t v = 0; v < graph.size(); ++v) {
            state.comm_strength[v] = graph.strength(static_cast<int>(v));
        }
        return state;
    }

    std::size_t nonempty_count() const {
        return static_cast<std::size_t>(
            std::count_if(comm_size.begin(), comm_size.end(), [](int s) { return s > 0; }));
    }
};

std::vector<int> random_order(std::size_t n, util::Rng& rng) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    return order;
}

// Fast local moving: visits queued nodes, moving each to the community with
// the best modularity gain (an empty community is always a candidate, so a
// node may split off). Ties prefer the lowest community id; a node only
// moves on a strict improvement.
bool local_move(const WeightedGraph& graph, MoveState& state, double resolution, util::Rng& rng) {
    const double m = graph.total_weight();
    if (m <= 0.0 || graph.size() < 2) {
        return false;
    }
    const double gamma_2m = resolution / (2.0 * m);

    std::deque<int> queue;
    std::vector<char> queued(graph.size(), 1);
    for (int v : random_order(graph.size(), rng)) {
        queue.push_back(v);
    }

    std::vector<double> edge_to_comm(graph.size(), 0.0);
    std::vector<int> touched;
    touched.reserve(16);
    bool any_move = false;

    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        queued[v] = 0;

        const int current = state.comm[v];
        const double k_v = graph.strength(v);

        touched.clear();
        for (const auto& [u, w] : graph.neighbors(v)) {
            const int c = state.comm[u];
            if (edge_to_comm[c] == 0.0) {
                touched.push_back(c);
            }
            edge_to_comm[c] += w;
        }
        std::sort(touched.begin(), touched.end());

        const double current_score =
            edge_to_comm[current] - gamma_2m * k_v * (state.comm_strength[current] - k_v);

        int best = current;
        double best_score = current_score;
        // Splitting off into an empty community scores exactly 0.
        if (state.comm_size[current] > 1 && 0.0 > best_score + kScoreEps) {
            int spare = -1;
            for (std::size_t c = 0; c < state.comm_size.size(); ++c) {
                if (state.comm_size[c] == 0) {
                    spare = static_cast<int>(c);
                    break;
                }
            }
            if (spare >= 0) {
                best = spare;
                best_score = 0.0;
            }
        }
        for (int c : touched) {
            if (c == current) {
                continue;
            }
            const double score = edge_to_comm[c] - gamma_2m * k_v * state.comm_strength[c];
            if (score > best_score + kScoreEps ||
                (std::abs(score - best_score) <= kScoreEps && best != current && c < best)) {
                best = c;
                best_score = score;
            }
        }

        if (best != current) {
            state.comm[v] = best;
            state.comm_strength[current] -= k_v;
            state.comm_strength[best] += k_v;
            state.comm_size[current] -= 1;
            state.comm_size[best] += 1;
            any_move = true;
            for (const auto& [u, w] : graph.neighbors(v)) {
                if (!queued[u] && state.comm[u] != best) {
                    queue.push_back(u);
                    queued[u] = 1;
                }
            }
        }

        for (int c : touched) {
            edge_to_comm[c] = 0.0;
        }
    }
    return any_move;
}

// Refinement: inside every community of `moved`, nodes start as singletons
// and merge with well-connected refined communities of the same subset.
// Targets are drawn with probability proportional to exp(gain/theta) among
// the positive-gain candidates, which diversifies restarts; theta -> 0 is
// the greedy argmax. Merges need a strictly positive gain through an
// existing edge, so every refined community stays connected.
std::vector<int> refine(const WeightedGraph& graph, const MoveState& moved, double resolution,
                        double theta, util::Rng& rng) {
    const std::size_t n = graph.size();
    const double m = graph.total_weight();
    const double gamma_2m = resolution / (2.0 * m);

    std::vector<int> refined(n);
    std::iota(refined.begin(), refined.end(), 0);
    std::vector<double> refined_strength(n);
    std::vector<int> refined_size(n, 1);
    std::vector<double> external(n, 0.0);  // edge weight to the rest of the subset
    std::vector<double> subset_strength(n, 0.0);

    for (std::size_t v = 0; v < n; ++v) {
        refined_strength[v] = graph.strength(static_cast<int>(v));
        subset_strength[moved.comm[v]] += graph.strength(static_cast<int>(v));
        for (const auto& [u, w] : graph.neighbors(static_cast<int>(v))) {
            if (moved.comm[u] == moved.comm[v]) {
                external[v] += w;
            }
        }
    }

    std::vector<double> edge_to_comm(n, 0.0);
    std::vector<int> touched;
    for (int v : random_order(n, rng)) {
        const int subset = moved.comm[v];
        if (moved.comm_size[subset] <= 1 || refined_size[refined[v]] != 1) {
            continue;
        }
        const double k_v = graph.strength(v);
        if (external[refined[v]] < gamma_2m * k_v * (subset_strength[subset] - k_v)) {
            continue;  // not well connected within its subset
        }

        touched.clear();
        for (const auto& [u, w] : graph.neighbors(v)) {
            if (moved.comm[u] != subset) {
                continue;
            }
            const int c = refined[u];
            if (c == refined[v]) {
                continue;
            }
            if (edge_to_comm[c] == 0.0) {
                touched.push_back(c);
            }
            edge_to_comm[c] += w;
        }
        std::sort(touched.begin(), touched.end());

        int best = -1;
        if (theta <= 0.0) {
            double best_score = 0.0;
            for (int c : touched) {
                const double k_c = refined_strength[c];
                if (external[c] < gamma_2m * k_c * (subset_strength[subset] - k_c)) {
                    continue;
                }
                const double score = edge_to_comm[c] - gamma_2m * k_v * k_c;
                if (score > best_score + kScoreEps) {
                    best = c;
                    best_score = score;
                }
            }
        } else {
            // cumulative exp(gain/theta) weights over eligible candidates
            std::vector<std::pair<double, int>> cumulative;
            double total = 0.0;
            for (int c : touched) {
                const double k_c = refined_strength[c];
                if (external[c] < gamma_2m * k_c * (subset_strength[subset] - k_c)) {
                    continue;
                }
                const double score = edge_to_comm[c] - gamma_2m * k_v * k_c;
                if (score <= kScoreEps) {
                    continue;
                }
                // score/m is the true modularity delta
                total += std::exp(std::min(score / (m * theta), 700.0));
                cumulative.emplace_back(total, c);
            }
            if (!cumulative.empty()) {
                const double draw = rng.unit() * total;
                for (const auto& [bound, c] : cumulative) {
                    if (draw < bound) {
                        best = c;
                        break;
                    }
                }
                if (best < 0) {
                    best = cumulative.back().second;
                }
            }
        }

        if (best >= 0) {
            const int old = refined[v];
            refined[v] = best;
            refined_strength[best] += k_v;
            refined_strength[old] = 0.0;
            refined_size[best] += 1;
            refined_size[old] = 0;
            external[best] += external[old] - 2.0 * edge_to_comm[best];
            external[old] = 0.0;
        }
        for (int c : touched) {
            edge_to_comm[c] = 0.0;
        }
    }
    return refined;
}

// Renumbers communities in order of smallest member node.
std::vector<int> canonicalize(const std::vector<int>& membership) {
    int max_id = -1;
    for (int c : membership) {
        max_id = std::max(max_id, c);
    }
    std::vector<int> remap(max_id + 1, -1);
    std::vector<int> out(membership.size());
    int next = 0;
    for (std::size_t v = 0; v < membership.size(); ++v) {
        if (remap[membership[v]] < 0) {
            remap[membership[v]] = next++;
        }
        out[v] = remap[membership[v]];
    }
    return out;
}

// Splits any disconnected community into its connected components. Leiden's
// refined partitions are already connected; this also covers partitions
// taken from an early-stopped moving pass.
std::vector<int> split_components(const WeightedGraph& graph, const std::vector<int>& membership) {
    const std::size_t n = graph.size();
    std::vector<int> out(n, -1);
    int next = 0;
    std::vector<int> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (out[start] >= 0) {
            continue;
        }
        const int comm = membership[start];
        const int id = next++;
        out[start] = id;
        stack.push_back(static_cast<int>(start));
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (const auto& [u, w] : graph.neighbors(v)) {
                (void)w;
                if (out[u] < 0 && membership[u] == comm) {
                    out[u] = id;
                    stack.push_back(u);
                }
            }
        }
    }
    return out;
}

struct Aggregated {
    WeightedGraph graph;
    std::vector<int> node_of_refined;  // refined community -> new node id
};

Aggregated aggregate(const WeightedGraph& graph, const std::vector<int>& refined) {
    std::vector<int> remap(graph.size(), -1);
    int next = 0;
    for (std::size_t v = 0; v < graph.size(); ++v) {
        if (remap[refined[v]] < 0) {
            remap[refined[v]] = next++;
        }
    }
    std::vector<Edge> edges;
    edges.reserve(graph.size() * 2);
    for (std::size_t v = 0; v < graph.size(); ++v) {
        const int cv = remap[refined[v]];
        if (graph.self_loop(static_cast<int>(v)) > 0.0) {
            edges.push_back({cv, cv, graph.self_loop(static_cast<int>(v))});
        }
        for (const auto& [u, w] : graph.neighbors(static_cast<int>(v))) {
            if (static_cast<std::size_t>(u) < v) {
                continue;
            }
            edges.push_back({cv, remap[refined[u]], w});
        }
    }
    Aggregated out;
    out.graph = WeightedGraph(static_cast<std::size_t>(next), edges);
    out.node_of_refined.assign(graph.size(), -1);
    for (std::size_t v = 0; v < graph.size(); ++v) {
        out.node_of_refined[refined[v]] = remap[refined[v]];
    }
    return out;
}

struct LeidenRun {
    std::vector<int> partition;  // converged partition, canonical ids
    std::vector<double> pass_modularity;
    double final_modularity = 0.0;
};

// One full Leiden run: local moving, refinement, aggregation, repeated until
// the aggregated graph stops changing or two consecutive passes yield no
// worthwhile modularity gain (a single flat pass can still be escaped by the
// randomized refinement). Intermediate refined partitions are working state
// only; the run's result is the converged partition.
//
// `initial_parts` > 0 starts from a random assignment into that many
// communities instead of singletons; restarts use this to explore basins the
// singleton start cannot reach.
LeidenRun leiden_once(const WeightedGraph& original, double resolution, std::uint64_t seed,
                      double theta, double min_gain, std::size_t initial_parts) {
    constexpr std::size_t kMaxPasses = 16;
    util::Rng rng(seed);
    LeidenRun run;

    WeightedGraph working = original;
    MoveState state = MoveState::singletons(working);
    if (initial_parts > 1 && initial_parts < working.size()) {
        for (std::size_t v = 0; v < working.size(); ++v) {
            state.comm[v] = static_cast<int>(rng.bounded(initial_parts));
        }
        state.comm = canonicalize(state.comm);
        state.comm_strength.assign(working.size(), 0.0);
        state.comm_size.assign(working.size(), 0);
        for (std::size_t v = 0; v < working.size(); ++v) {
            state.comm_strength[state.comm[v]] += working.strength(static_cast<int>(v));
            state.comm_size[state.comm[v]] += 1;
        }
    }
    // current position of each original node in the working graph
    std::vector<int> node_of(original.size());
    std::iota(node_of.begin(), node_of.end(), 0);

    auto flatten = [&](const std::vector<int>& assignment) {
        std::vector<int> flat(original.size());
        for (std::size_t v = 0; v < original.size(); ++v) {
            flat[v] = assignment[node_of[v]];
        }
        return canonicalize(split_components(original, flat));
    };

    int low_gain_streak = 0;
    for (;;) {
        local_move(working, state, resolution, rng);
        const double q = modularity(original, flatten(state.comm), resolution);
        const bool converged = state.nonempty_count() == working.size();
        if (!run.pass_modularity.empty() && q - run.pass_modularity.back() <= min_gain) {
            ++low_gain_streak;
        } else {
            low_gain_streak = 0;
        }
        run.pass_modularity.push_back(q);
        if (converged || low_gain_streak >= 2 || run.pass_modularity.size() >= kMaxPasses) {
            break;
        }
        auto refined = refine(working, state, resolution, theta, rng);
        auto next = aggregate(working, refined);
        MoveState next_state;
        next_state.comm.resize(next.graph.size());
        for (std::size_t v = 0; v < working.size(); ++v) {
            next_state.comm[next.node_of_refined[refined[v]]] = state.comm[v];
        }
        next_state.comm = canonicalize(next_state.comm);
        next_state.comm_strength.assign(next.graph.size(), 0.0);
        next_state.comm_size.assign(next.graph.size(), 0);
        for (std::size_t v = 0; v < next.graph.size(); ++v) {
            next_state.comm_strength[next_state.comm[v]] += next.graph.strength(static_cast<int>(v));
            next_state.comm_size[next_state.comm[v]] += 1;
        }
        for (std::size_t v = 0; v < original.size(); ++v) {
            node_of[v] = next.node_of_refined[refined[node_of[v]]];
        }
        working = std::move(next.graph);
        state = std::move(next_state);
    }

    run.partition = flatten(state.comm);
    run.final_modularity = modularity(original, run.partition, resolution);
    return run;
}

}  // namespace

std::size_t CommunityHierarchy::community_count(std::size_t level) const {
    if (level >= membership.size() || membership[level].empty()) {
        return 0;
    }
    return static_cast<std::size_t>(*std::max_element(membership[level].begin(),
                                                      membership[level].end())) + 1;
}

std::vector<std::vector<int>> CommunityHierarchy::communities(std::size_t level) const {
    std::vector<std::vector<int>> out(community_count(level));
    for (std::size_t v = 0; v < membership[level].size(); ++v) {
        out[membership[level][v]].push_back(static_cast<int>(v));
    }
    return out;
}

std::size_t CommunityHierarchy::query_level() const {
    for (std::size_t level = levels(); level-- > 0;) {
        if (community_count(level) >= 2) {
            return level;
        }
    }
    return 0;
}

CommunityHierarchy detect_communities(const WeightedGraph& graph, const DetectOptions& options) {
    if (options.resolution <= 0.0) {
        throw Error(Error::Kind::invalid_argument, "resolution must be > 0");
    }
    CommunityHierarchy hierarchy;
    hierarchy.node_count = graph.size();
    if (graph.size() == 0) {
        return hierarchy;
    }
    if (graph.total_weight() <= 0.0) {
        // Without edges everything stays a singleton.
        std::vector<int> singles(graph.size());
        std::iota(singles.begin(), singles.end(), 0);
        hierarchy.membership.push_back(std::move(singles));
        hierarchy.level_modularity.push_back(0.0);
        hierarchy.pass_modularity.push_back(0.0);
        hierarchy.parent_link.emplace_back();
        return hierarchy;
    }

    std::optional<LeidenRun> best;
    const int restarts = std::max(1, options.restarts);
    for (int r = 0; r < restarts; ++r) {
        // Even restarts begin from singletons, odd ones from a random
        // coarse assignment, cycling over 2..6 parts.
        const std::size_t initial_parts = r % 2 == 0 ? 0 : 2 + (static_cast<std::size_t>(r) / 2) % 5;
        auto run = leiden_once(graph, options.resolution,
                               util::derive_seed(options.seed, {"leiden", std::to_string(r)}),
                               options.theta, options.min_gain, initial_parts);
        if (!best || run.final_modularity > best->final_modularity + kScoreEps) {
            best = std::move(run);
        }
    }

    // Aggregation past the converged partition cannot improve modularity, so
    // with gain-based stopping the converged partition is the only level the
    // detector emits; the hierarchy type still carries deeper nestings when
    // callers build them.
    hierarchy.membership.push_back(std::move(best->partition));
    hierarchy.pass_modularity = std::move(best->pass_modularity);
    for (const auto& level : hierarchy.membership) {
        hierarchy.level_modularity.push_back(modularity(graph, level, options.resolution));
    }
    for (std::size_t level = 0; level < hierarchy.levels(); ++level) {
        std::vector<int> parents(hierarchy.community_count(level), -1);
        if (level + 1 < hierarchy.levels()) {
            for (std::size_t v = 0; v < graph.size(); ++v) {
                parents[hierarchy.membership[level][v]] = hierarchy.membership[level + 1][v];
            }
        }
        hierarchy.parent_link.push_back(std::move(parents));
    }
    return hierarchy;
}

std::string dump_partitions(const CommunityHierarchy& hierarchy,
                            const std::vector<std::string>& node_names) {
    std::ostringstream out;
    for (std::size_t level = 0; level < hierarchy.levels(); ++level) {
        out << "# level " << level << "\n";
        for (std::size_t v = 0; v < hierarchy.membership[level].size(); ++v) {
            const std::string name =
                v < node_names.size() ? node_names[v] : std::to_string(v);
            out << name << '\t' << hierarchy.membership[level][v] << '\n';
        }
    }
    return out.str();
}

}  // namespace grag::community
