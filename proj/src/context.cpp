#include "grag/context.hpp"

#include <algorithm>

#include "grag/text.hpp"
#include "grag/util.hpp"

namespace grag::pipeline {

namespace {

constexpr const char* kEmptyMarker = "(no structured knowledge extracted)";

// Appends lines to `section` while the budget holds. When a line does not
// fit it is word-truncated into the remaining budget; once the budget is
// exhausted nothing further is emitted anywhere.
class BudgetWriter {
public:
    explicit BudgetWriter(std::size_t budget) : remaining_(budget) {}

    void append(std::string& section, const std::string& line) {
        if (exhausted_) {
            return;
        }
        const std::size_t cost = text::token_estimate(line);
        if (cost <= remaining_) {
            section += line;
            section += '\n';
            remaining_ -= cost;
            return;
        }
        std::string cut = text::truncate_to_tokens(line, remaining_);
        if (!cut.empty()) {
            section += cut;
            section += '\n';
            remaining_ -= text::token_estimate(cut);
        }
        exhausted_ = true;
        truncated_ = true;
    }

    bool truncated() const { return truncated_; }

private:
    std::size_t remaining_;
    bool exhausted_ = false;
    bool truncated_ = false;
};

}  // namespace

std::string AssembledContext::text() const {
    if (empty_graph) {
        return kEmptyMarker;
    }
    std::string out;
    for (const std::string* section :
         {&summary_section, &claim_section, &relationship_section, &entity_section}) {
        if (!section->empty()) {
            if (!out.empty()) {
                out += '\n';
            }
            out += *section;
        }
    }
    return out;
}

AssembledContext assemble_context(const kgraph::KnowledgeGraph& graph,
                                  const std::vector<summarize::CommunitySummary>& summaries,
                                  std::size_t token_budget) {
    if (token_budget == 0) {
        throw Error(Error::Kind::invalid_argument, "context budget must be > 0");
    }
    AssembledContext context;
    if (graph.empty()) {
        context.empty_graph = true;
        context.token_estimate = text::token_estimate(kEmptyMarker);
        return context;
    }

    BudgetWriter writer(token_budget);

    auto ordered = summaries;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const summarize::CommunitySummary& a, const summarize::CommunitySummary& b) {
                         if (a.member_entities.size() != b.member_entities.size()) {
                             return a.member_entities.size() > b.member_entities.size();
                         }
                         return a.community_id < b.community_id;
                     });
    if (!ordered.empty()) {
        writer.append(context.summary_section, "COMMUNITY SUMMARIES:");
        for (const auto& summary : ordered) {
            writer.append(context.summary_section, "- " + summary.summary);
        }
    }
    if (!graph.claims.empty()) {
        writer.append(context.claim_section, "CLAIMS:");
        for (const auto& claim : graph.claims) {
            writer.append(context.claim_section, "- " + claim.subject + ": " + claim.statement);
        }
    }
    if (!graph.relationships.empty()) {
        writer.append(context.relationship_section, "RELATIONSHIPS:");
        for (const auto& rel : graph.relationships) {
            writer.append(context.relationship_section,
                          "- " + rel.source + " -- " + rel.target +
                              (rel.description.empty() ? "" : ": " + rel.description));
        }
    }
    writer.append(context.entity_section, "ENTITIES:");
    for (const auto& [id, entity] : graph.entities) {
        std::string line = "- " + entity.name;
        if (!entity.type_tag.empty()) {
            line += " (" + entity.type_tag + ")";
        }
        if (!entity.description.empty()) {
            line += ": " + entity.description;
        }
        writer.append(context.entity_section, line);
    }

    context.truncated = writer.truncated();
    context.token_estimate = text::token_estimate(context.text());
    return context;
}

}  // namespace grag::pipeline
