#pragma once

#include <string>
#include <vector>

#include "grag/community.hpp"
#include "grag/kgraph.hpp"
#include "grag/llm.hpp"

namespace grag::summarize {

struct CommunitySummary {
    std::size_t level = 0;
    int community_id = 0;
    std::string summary;
    std::vector<std::string> member_entities;  // entity ids
    std::vector<std::string> member_claims;
    bool fallback = false;  // backend failed; deterministic concatenation used
};

struct SummarizeOptions {
    std::size_t token_budget = 120;
    std::size_t parallelism = 4;
    bool use_cache = true;
};

/// Summaries for every community at every level. Level 0 summaries come from
/// member entity/relationship/claim descriptions; level k+1 prompts contain
/// the child summaries verbatim, so level k completes before level k+1
/// starts. Backend failures fall back to a flagged concatenation of member
/// descriptions. Every summary fits the token budget.
std::vector<CommunitySummary> summarize_communities(const community::CommunityHierarchy& hierarchy,
                                                    const kgraph::KnowledgeGraph& graph,
                                                    const std::vector<std::string>& node_entity_ids,
                                                    llm::Gateway& gateway,
                                                    const llm::ChatDefaults& defaults,
                                                    const SummarizeOptions& options = {});

}  // namespace grag::summarize
