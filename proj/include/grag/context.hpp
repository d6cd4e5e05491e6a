#pragma once

#include <string>
#include <vector>

#include "grag/kgraph.hpp"
#include "grag/summarize.hpp"

namespace grag::pipeline {

/// Structured-context block injected into the answer prompt. Sections are
/// emitted in priority order (summaries, claims, relationships, entities)
/// until the token budget runs out.
struct AssembledContext {
    std::string summary_section;
    std::string claim_section;
    std::string relationship_section;
    std::string entity_section;
    std::size_t token_estimate = 0;
    bool truncated = false;
    bool empty_graph = false;

    std::string text() const;
};

/// `summaries` should hold the query-level community summaries; they are
/// ordered by community size (descending) then id. An empty graph yields a
/// context holding only an explicit marker.
AssembledContext assemble_context(const kgraph::KnowledgeGraph& graph,
                                  const std::vector<summarize::CommunitySummary>& summaries,
                                  std::size_t token_budget);

}  // namespace grag::pipeline
