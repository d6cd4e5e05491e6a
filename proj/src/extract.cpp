#include "grag/extract.hpp"

#include "grag/prompts.hpp"
#include "grag/util.hpp"

namespace grag::extract {

kgraph::RawElements extract_elements(const std::vector<kgraph::Chunk>& chunks, llm::Gateway& gateway,
                                     const llm::ChatDefaults& defaults,
                                     const ExtractOptions& options) {
    std::vector<kgraph::RawElements> per_chunk(chunks.size());
    std::vector<char> failed(chunks.size(), 0);

    util::parallel_for(chunks.size(), options.parallelism, [&](std::size_t i) {
        const auto& chunk = chunks[i];
        auto ask = [&](const prompts::RenderedPrompt& prompt) {
            auto request = defaults.make_request(prompt.system_text, prompt.user_text);
            return options.use_cache ? gateway.cached_complete(request) : gateway.complete(request);
        };
        auto response = ask(prompts::render_extraction_prompt(chunk));
        if (kgraph::parse_extraction(response, chunk.id, per_chunk[i])) {
            return;
        }
        per_chunk[i] = {};
        response = ask(prompts::render_extraction_repair_prompt(chunk));
        if (!kgraph::parse_extraction(response, chunk.id, per_chunk[i])) {
            per_chunk[i] = {};
            failed[i] = 1;
        }
    });

    kgraph::RawElements merged;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (failed[i]) {
            merged.failed_chunks.push_back(chunks[i].id);
            continue;
        }
        auto& part = per_chunk[i];
        merged.entities.insert(merged.entities.end(), part.entities.begin(), part.entities.end());
        merged.relationships.insert(merged.relationships.end(), part.relationships.begin(),
                                    part.relationships.end());
        merged.claims.insert(merged.claims.end(), part.claims.begin(), part.claims.end());
    }
    return merged;
}

}  // namespace grag::extract
