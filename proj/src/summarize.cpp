#include "grag/summarize.hpp"

#include <algorithm>
#include <set>

#include "grag/prompts.hpp"
#include "grag/text.hpp"
#include "grag/util.hpp"

namespace grag::summarize {

namespace {

std::vector<std::string> member_lines(const kgraph::KnowledgeGraph& graph,
                                      const std::vector<std::string>& member_ids) {
    std::set<std::string> members(member_ids.begin(), member_ids.end());
    std::vector<std::string> lines;
    for (const auto& id : member_ids) {
        auto it = graph.entities.find(id);
        if (it == graph.entities.end()) {
            continue;
        }
        std::string line = it->second.name;
        if (!it->second.type_tag.empty()) {
            line += " (" + it->second.type_tag + ")";
        }
        if (!it->second.description.empty()) {
            line += ": " + it->second.description;
        }
        lines.push_back(std::move(line));
    }
    for (const auto& rel : graph.relationships) {
        if (members.count(rel.source) && members.count(rel.target)) {
            lines.push_back(rel.source + " -- " + rel.target +
                            (rel.description.empty() ? "" : ": " + rel.description));
        }
    }
    for (const auto& claim : graph.claims) {
        if (members.count(claim.subject)) {
            lines.push_back("claim about " + claim.subject + ": " + claim.statement);
        }
    }
    return lines;
}

}  // namespace

std::vector<CommunitySummary> summarize_communities(const community::CommunityHierarchy& hierarchy,
                                                    const kgraph::KnowledgeGraph& graph,
                                                    const std::vector<std::string>& node_entity_ids,
                                                    llm::Gateway& gateway,
                                                    const llm::ChatDefaults& defaults,
                                                    const SummarizeOptions& options) {
    std::vector<CommunitySummary> all;
    if (hierarchy.levels() == 0 || node_entity_ids.size() != hierarchy.node_count) {
        return all;
    }

    std::vector<std::vector<std::string>> previous_level_summaries;
    for (std::size_t level = 0; level < hierarchy.levels(); ++level) {
        const auto communities = hierarchy.communities(level);
        std::vector<CommunitySummary> level_summaries(communities.size());
        // Child summary texts per community at this level (level > 0 only).
        std::vector<std::vector<std::string>> children(communities.size());
        if (level > 0) {
            const auto& parents = hierarchy.parent_link[level - 1];
            for (std::size_t child = 0; child < parents.size(); ++child) {
                children[parents[child]].push_back(previous_level_summaries[0][child]);
            }
        }

        util::parallel_for(communities.size(), options.parallelism, [&](std::size_t c) {
            CommunitySummary summary;
            summary.level = level;
            summary.community_id = static_cast<int>(c);
            for (int node : communities[c]) {
                summary.member_entities.push_back(node_entity_ids[node]);
            }
            std::set<std::string> members(summary.member_entities.begin(),
                                          summary.member_entities.end());
            for (const auto& claim : graph.claims) {
                if (members.count(claim.subject)) {
                    summary.member_claims.push_back(claim.subject + ": " + claim.statement);
                }
            }

            const auto lines = level == 0 ? member_lines(graph, summary.member_entities)
                                          : children[c];
            const auto prompt = level == 0
                                    ? prompts::render_summary_prompt(lines, options.token_budget)
                                    : prompts::render_merge_summary_prompt(lines, options.token_budget);
            try {
                auto request = defaults.make_request(prompt.system_text, prompt.user_text);
                auto response =
                    options.use_cache ? gateway.cached_complete(request) : gateway.complete(request);
                summary.summary = text::truncate_to_tokens(
                    text::normalize_whitespace(response), options.token_budget);
            } catch (const Error&) {
                std::string joined;
                for (const auto& line : lines) {
                    if (!joined.empty()) {
                        joined += "; ";
                    }
                    joined += line;
                }
                summary.summary = text::truncate_to_tokens(joined, options.token_budget);
                summary.fallback = true;
            }
            if (summary.summary.empty() && !summary.member_entities.empty()) {
                summary.summary = summary.member_entities.front();
            }
            level_summaries[c] = std::move(summary);
        });

        previous_level_summaries.assign(1, {});
        previous_level_summaries[0].reserve(level_summaries.size());
        for (const auto& s : level_summaries) {
            previous_level_summaries[0].push_back(s.summary);
        }
        all.insert(all.end(), std::make_move_iterator(level_summaries.begin()),
                   std::make_move_iterator(level_summaries.end()));
    }
    return all;
}

}  // namespace grag::summarize
