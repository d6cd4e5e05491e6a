#include "grag/kgraph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "grag/text.hpp"
#include "grag/util.hpp"

namespace grag::kgraph {

std::vector<Chunk> chunk_documents(const corpus::DocumentSet& docset, std::size_t chunk_tokens,
                                   std::size_t overlap_tokens) {
    if (chunk_tokens <= overlap_tokens) {
        throw Error(Error::Kind::invalid_argument, "chunk_tokens must exceed overlap_tokens");
    }
    const auto words_per_chunk =
        std::max<std::size_t>(1, static_cast<std::size_t>(static_cast<double>(chunk_tokens) / 1.3));
    const auto overlap_words =
        static_cast<std::size_t>(static_cast<double>(overlap_tokens) / 1.3);
    const auto step = std::max<std::size_t>(1, words_per_chunk - overlap_words);

    std::vector<Chunk> chunks;
    for (std::size_t doc = 0; doc < docset.docs.size(); ++doc) {
        const std::string& body = docset.docs[doc].text;
        auto spans = text::word_spans(body);
        if (spans.empty()) {
            continue;
        }
        std::size_t prev_end = 0;
        for (std::size_t k = 0, word = 0; word < spans.size(); ++k, word += step) {
            Chunk chunk;
            chunk.doc_index = static_cast<int>(doc);
            chunk.id = "d" + std::to_string(doc) + "c" + std::to_string(k);
            // First chunk starts at 0; with no overlap, successors start where
            // the previous ended so the regions tile the document exactly.
            chunk.start = k == 0 ? 0 : (overlap_words == 0 ? prev_end : spans[word].start);
            const std::size_t last_word = std::min(word + words_per_chunk, spans.size()) - 1;
            chunk.end = last_word + 1 == spans.size() ? body.size() : spans[last_word].end;
            chunk.text = body.substr(chunk.start, chunk.end - chunk.start);
            chunk.token_estimate = text::token_estimate(chunk.text);
            prev_end = chunk.end;
            chunks.push_back(std::move(chunk));
            if (last_word + 1 == spans.size()) {
                break;
            }
        }
    }
    return chunks;
}

namespace {

std::string strip_outer(const std::string& field) {
    std::string out = text::normalize_whitespace(field);
    while (!out.empty() && (out.front() == '"' || out.front() == '\'')) {
        out.erase(out.begin());
    }
    while (!out.empty() && (out.back() == '"' || out.back() == '\'')) {
        out.pop_back();
    }
    return text::normalize_whitespace(out);
}

std::vector<std::string> split_record(const std::string& line) {
    std::string body = text::normalize_whitespace(line);
    if (!body.empty() && body.front() == '(') {
        body.erase(body.begin());
    }
    if (!body.empty() && body.back() == ')') {
        body.pop_back();
    }
    std::vector<std::string> fields;
    std::string current;
    for (char c : body) {
        if (c == '|') {
            fields.push_back(strip_outer(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(strip_outer(current));
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

bool parse_extraction(const std::string& response, const std::string& chunk_id, RawElements& out) {
    std::istringstream stream(response);
    std::string line;
    std::size_t parsed = 0;
    while (std::getline(stream, line)) {
        auto trimmed = text::normalize_whitespace(line);
        if (trimmed.empty() || trimmed.front() != '(') {
            continue;
        }
        auto fields = split_record(trimmed);
        if (fields.empty()) {
            continue;
        }
        const std::string tag = text::to_lower_ascii(fields[0]);
        if (tag == "entity" && fields.size() >= 5) {
            double confidence = 0.0;
            if (fields[1].empty() || !parse_double(fields[4], confidence)) {
                continue;
            }
            EntityCandidate entity;
            entity.name = fields[1];
            entity.type_tag = fields[2];
            entity.description = fields[3];
            entity.confidence = std::clamp(confidence, 0.0, 1.0);
            entity.source_chunks = {chunk_id};
            out.entities.push_back(std::move(entity));
            ++parsed;
        } else if (tag == "relationship" && fields.size() >= 4) {
            if (fields[1].empty() || fields[2].empty()) {
                continue;
            }
            Relationship rel;
            rel.source = fields[1];
            rel.target = fields[2];
            rel.description = fields[3];
            rel.weight = 1.0;
            if (fields.size() >= 5) {
                double w = 1.0;
                if (parse_double(fields[4], w) && w >= 0.0) {
                    rel.weight = w;
                }
            }
            rel.source_chunks = {chunk_id};
            out.relationships.push_back(std::move(rel));
            ++parsed;
        } else if (tag == "claim" && fields.size() >= 3) {
            if (fields[1].empty() || fields[2].empty()) {
                continue;
            }
            Claim claim;
            claim.subject = fields[1];
            claim.statement = fields[2];
            claim.source_chunks = {chunk_id};
            out.claims.push_back(std::move(claim));
            ++parsed;
        }
    }
    return parsed > 0;
}

std::string entity_id(const std::string& name) {
    return text::normalize_for_match(name);
}

namespace {

std::vector<std::string> union_sorted(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

void append_description(std::string& target, const std::string& extra) {
    if (extra.empty() || target.find(extra) != std::string::npos) {
        return;
    }
    if (!target.empty()) {
        target += "; ";
    }
    target += extra;
}

}  // namespace

KnowledgeGraph build_graph(const RawElements& raw, double confidence_threshold) {
    if (confidence_threshold < 0.0 || confidence_threshold > 1.0) {
        throw Error(Error::Kind::invalid_argument, "confidence threshold must be in [0, 1]");
    }
    KnowledgeGraph graph;

    // Merge duplicates first so a surviving merge keeps the max confidence.
    for (const auto& entity : raw.entities) {
        const std::string id = entity_id(entity.name);
        if (id.empty()) {
            continue;
        }
        auto [it, inserted] = graph.entities.try_emplace(id, entity);
        if (inserted) {
            it->second.name = text::normalize_whitespace(entity.name);
            std::sort(it->second.source_chunks.begin(), it->second.source_chunks.end());
        } else {
            it->second.confidence = std::max(it->second.confidence, entity.confidence);
            append_description(it->second.description, entity.description);
            if (it->second.type_tag.empty()) {
                it->second.type_tag = entity.type_tag;
            }
            it->second.source_chunks = union_sorted(it->second.source_chunks, entity.source_chunks);
        }
    }
    for (auto it = graph.entities.begin(); it != graph.entities.end();) {
        if (it->second.confidence < confidence_threshold) {
            it = graph.entities.erase(it);
        } else {
            ++it;
        }
    }

    std::map<std::pair<std::string, std::string>, Relationship> merged_rels;
    for (const auto& rel : raw.relationships) {
        std::string a = entity_id(rel.source);
        std::string b = entity_id(rel.target);
        if (a == b || !graph.entities.count(a) || !graph.entities.count(b)) {
            continue;  // dangling or self-loop
        }
        if (b < a) {
            std::swap(a, b);
        }
        auto [it, inserted] = merged_rels.try_emplace(std::make_pair(a, b), rel);
        if (inserted) {
            it->second.source = a;
            it->second.target = b;
            std::sort(it->second.source_chunks.begin(), it->second.source_chunks.end());
        } else {
            it->second.weight += rel.weight;
            append_description(it->second.description, rel.description);
            it->second.source_chunks = union_sorted(it->second.source_chunks, rel.source_chunks);
        }
    }
    graph.relationships.reserve(merged_rels.size());
    for (auto& [key, rel] : merged_rels) {
        graph.relationships.push_back(std::move(rel));
    }

    std::map<std::pair<std::string, std::string>, Claim> merged_claims;
    for (const auto& claim : raw.claims) {
        const std::string subject = entity_id(claim.subject);
        if (!graph.entities.count(subject)) {
            continue;
        }
        auto key = std::make_pair(subject, text::normalize_whitespace(claim.statement));
        auto [it, inserted] = merged_claims.try_emplace(key, claim);
        if (inserted) {
            it->second.subject = subject;
            std::sort(it->second.source_chunks.begin(), it->second.source_chunks.end());
        } else {
            it->second.source_chunks = union_sorted(it->second.source_chunks, claim.source_chunks);
        }
    }
    graph.claims.reserve(merged_claims.size());
    for (auto& [key, claim] : merged_claims) {
        graph.claims.push_back(std::move(claim));
    }
    return graph;
}

void validate_graph(const KnowledgeGraph& graph) {
    for (const auto& rel : graph.relationships) {
        if (!graph.entities.count(rel.source) || !graph.entities.count(rel.target)) {
            throw Error(Error::Kind::validation,
                        "dangling relationship " + rel.source + " -- " + rel.target);
        }
        if (rel.source == rel.target) {
            throw Error(Error::Kind::validation, "self-loop relationship on " + rel.source);
        }
        if (rel.weight < 0.0) {
            throw Error(Error::Kind::validation, "negative relationship weight on " + rel.source);
        }
    }
    for (const auto& claim : graph.claims) {
        if (!graph.entities.count(claim.subject)) {
            throw Error(Error::Kind::validation, "dangling claim subject " + claim.subject);
        }
    }
    for (const auto& [id, entity] : graph.entities) {
        if (id.empty() || entity.confidence < 0.0 || entity.confidence > 1.0) {
            throw Error(Error::Kind::validation, "invalid entity record " + id);
        }
    }
}

namespace {

std::string escape_tabs(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '\t' || c == '\n') {
            out.push_back(' ');
        } else {
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string dump_graph(const KnowledgeGraph& graph) {
    std::ostringstream out;
    out << "# entity\tid\tconfidence\ttype\tdescription\n";
    for (const auto& [id, entity] : graph.entities) {
        out << "E\t" << id << '\t' << util::format_fixed2(entity.confidence) << '\t'
            << escape_tabs(entity.type_tag) << '\t' << escape_tabs(entity.description) << '\n';
    }
    out << "# relationship\tsource\ttarget\tweight\tdescription\n";
    for (const auto& rel : graph.relationships) {
        out << "R\t" << rel.source << '\t' << rel.target << '\t' << rel.weight << '\t'
            << escape_tabs(rel.description) << '\n';
    }
    out << "# claim\tsubject\tstatement\n";
    for (const auto& claim : graph.claims) {
        out << "C\t" << claim.subject << '\t' << escape_tabs(claim.statement) << '\n';
    }
    return out.str();
}

KnowledgeGraph parse_graph_dump(const std::string& dump) {
    KnowledgeGraph graph;
    std::istringstream stream(dump);
    std::string line;
    while (std::getline(stream, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::string current;
        for (char c : line) {
            if (c == '\t') {
                fields.push_back(current);
                current.clear();
            } else {
                current.push_back(c);
            }
        }
        fields.push_back(current);
        if (fields[0] == "E" && fields.size() >= 5) {
            EntityCandidate entity;
            entity.name = fields[1];
            entity.confidence = std::stod(fields[2]);
            entity.type_tag = fields[3];
            entity.description = fields[4];
            graph.entities.emplace(fields[1], std::move(entity));
        } else if (fields[0] == "R" && fields.size() >= 5) {
            Relationship rel;
            rel.source = fields[1];
            rel.target = fields[2];
            rel.weight = std::stod(fields[3]);
            rel.description = fields[4];
            graph.relationships.push_back(std::move(rel));
        } else if (fields[0] == "C" && fields.size() >= 3) {
            Claim claim;
            claim.subject = fields[1];
            claim.statement = fields[2];
            graph.claims.push_back(std::move(claim));
        }
    }
    return graph;
}

}  // namespace grag::kgraph
