#pragma once

#include <map>
#include <string>
#include <vector>

#include "grag/corpus.hpp"

namespace grag::kgraph {

struct Chunk {
    std::string id;           // "d<doc>c<index>"
    int doc_index = 0;
    std::size_t start = 0;    // character offsets into the document
    std::size_t end = 0;
    std::string text;
    std::size_t token_estimate = 0;
};

/// Splits every document into word-aligned chunks of about chunk_tokens with
/// overlap_tokens of overlap. The non-overlapping regions concatenate back to
/// the exact document text; short documents yield a single chunk, empty ones
/// none.
std::vector<Chunk> chunk_documents(const corpus::DocumentSet& docset, std::size_t chunk_tokens,
                                   std::size_t overlap_tokens);

struct EntityCandidate {
    std::string name;         // surface form as first extracted
    std::string type_tag;
    std::string description;
    double confidence = 0.0;  // extractor's self-reported score in [0,1]
    std::vector<std::string> source_chunks;
};

struct Relationship {
    std::string source;       // entity ids (normalized names)
    std::string target;
    std::string description;
    double weight = 1.0;
    std::vector<std::string> source_chunks;
};

struct Claim {
    std::string subject;      // entity id
    std::string statement;
    std::vector<std::string> source_chunks;
};

struct RawElements {
    std::vector<EntityCandidate> entities;
    std::vector<Relationship> relationships;   // source/target hold raw names
    std::vector<Claim> claims;                 // subject holds raw name
    std::vector<std::string> failed_chunks;
};

/// Parses one extraction response: lines of
///   ("entity"|NAME|TYPE|DESCRIPTION|CONFIDENCE)
///   ("relationship"|SOURCE|TARGET|DESCRIPTION|WEIGHT)
///   ("claim"|SUBJECT|STATEMENT)
/// Returns false when the response holds no valid record.
bool parse_extraction(const std::string& response, const std::string& chunk_id, RawElements& out);

/// Entity id: case-folded, whitespace-normalized surface form.
std::string entity_id(const std::string& name);

struct KnowledgeGraph {
    std::map<std::string, EntityCandidate> entities;  // id -> entity
    std::vector<Relationship> relationships;          // unordered pairs, canonical order
    std::vector<Claim> claims;

    bool empty() const { return entities.empty(); }
};

/// Merges duplicate entities (max confidence, concatenated descriptions,
/// unioned provenance), drops entities below confidence_threshold, then drops
/// relationships/claims with missing endpoints and merges duplicate edges by
/// summing weights. Output ordering is canonical.
KnowledgeGraph build_graph(const RawElements& raw, double confidence_threshold);

/// Throws Error::Kind::validation when referential integrity is broken.
void validate_graph(const KnowledgeGraph& graph);

/// Node/edge list dump (entities with confidence, relationships with weight).
std::string dump_graph(const KnowledgeGraph& graph);

/// Parses dump_graph output back; used by inspection tooling.
KnowledgeGraph parse_graph_dump(const std::string& dump);

}  // namespace grag::kgraph
