#pragma once

#include <string>
#include <vector>

#include "grag/corpus.hpp"
#include "grag/kgraph.hpp"

namespace grag::prompts {

/// The five answer-prompt configurations under evaluation.
enum class ConfigKind {
    rgb_baseline,  // plain retrieved documents, benchmark default prompt
    gr_rgb,        // structured context with the benchmark default prompt
    gr_def,        // structured context with the stock graph-RAG answer prompt
    gr_ext,        // noise-aware prompt, external knowledge only
    gr_comb,       // noise-aware prompt plus the model's own knowledge
};

std::string to_string(ConfigKind kind);
ConfigKind config_from_string(const std::string& name);

struct PromptConfig {
    ConfigKind kind = ConfigKind::rgb_baseline;
    corpus::TaskKind task = corpus::TaskKind::noise;
};

struct RenderedPrompt {
    std::string system_text;
    std::string user_text;
};

/// Renders the answer prompt for a configuration. `context` is the assembled
/// structured-context block (or the raw concatenated documents for the
/// baseline). An empty context is only legal for the no-document
/// counterfactual probe, which asks the model to answer from its own
/// knowledge.
RenderedPrompt render_answer_prompt(const PromptConfig& config, const std::string& context,
                                    const std::string& question);

/// Entity/relationship/claim extraction request for one chunk.
RenderedPrompt render_extraction_prompt(const kgraph::Chunk& chunk);

/// Stricter re-ask used once after a parse failure.
RenderedPrompt render_extraction_repair_prompt(const kgraph::Chunk& chunk);

/// Base-level community summary from member descriptions.
RenderedPrompt render_summary_prompt(const std::vector<std::string>& member_lines,
                                     std::size_t token_budget);

/// Higher-level summary built from child community summaries.
RenderedPrompt render_merge_summary_prompt(const std::vector<std::string>& child_summaries,
                                           std::size_t token_budget);

/// Refusal phrases tied to the prompt instruction sets; responses containing
/// any of these count as rejections.
std::vector<std::string> rejection_markers();

/// Marker phrase signalling the model flagged factual errors in the context.
std::string error_marker();

}  // namespace grag::prompts
