#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "grag/corpus.hpp"
#include "grag/llm.hpp"
#include "grag/prompts.hpp"

namespace grag::pipeline {

enum class Classification {
    answered,
    rejected,
    error_detected,
    backend_failed,
};

std::string to_string(Classification c);
Classification classification_from_string(const std::string& name);

enum class TrialMode {
    with_docs,      // standard trial over a document set
    no_doc_probe,   // counterfactual accuracy probe without documents
};

std::string to_string(TrialMode mode);

/// Outcome of one (case, configuration, noise ratio) trial. Latency is
/// excluded from the canonical serialization so replayed runs are
/// byte-identical.
struct AnswerRecord {
    std::string case_id;
    corpus::TaskKind task = corpus::TaskKind::noise;
    prompts::ConfigKind config = prompts::ConfigKind::rgb_baseline;
    double noise_ratio = 0.0;
    TrialMode mode = TrialMode::with_docs;
    std::string docset_fingerprint;  // empty for the no-document probe
    std::string prompt_digest;
    std::string response;
    Classification classification = Classification::answered;
    std::string failure;             // backend failure message, when failed
    std::vector<std::vector<std::string>> gold_answers;
    double latency_ms = 0.0;

    /// Stable identifier: case, config, ratio, mode.
    std::string key() const;
};

/// Per-trial inspection bundle persisted alongside the records.
struct TrialArtifacts {
    std::string docset_json;
    std::string graph_dump;
    std::string communities_dump;
    std::string context_text;
    std::string prompt_text;
    std::string response_text;
};

struct PipelineOptions {
    std::size_t n_docs = 5;
    std::uint64_t seed = 42;
    double entity_threshold = 0.7;
    double resolution = 1.0;
    int leiden_restarts = 16;
    std::size_t chunk_tokens = 600;
    std::size_t overlap_tokens = 100;
    std::size_t context_budget = 4000;
    std::size_t summary_budget = 120;
    std::size_t parallelism = 4;
    bool shuffle_docs = true;
    bool use_cache = true;
    llm::ChatDefaults chat;
    std::vector<std::string> extra_rejection_markers;
};

struct TrialResult {
    AnswerRecord record;
    TrialArtifacts artifacts;
};

/// Runs one full trial. KG configurations run mix -> chunk -> extract ->
/// build -> detect -> summarize -> assemble -> render -> complete; the
/// baseline skips the KG stages and feeds raw documents; the no-document
/// probe skips retrieval entirely. Backend failures yield a backend_failed
/// record instead of propagating.
TrialResult answer_query(const corpus::TestCase& test_case, const prompts::PromptConfig& config,
                         double noise_ratio, TrialMode mode, llm::Gateway& gateway,
                         const PipelineOptions& options);

struct RunReport {
    corpus::TaskKind task = corpus::TaskKind::noise;
    std::vector<TrialResult> trials;  // merged by (case, config, ratio, mode)
    std::size_t failures = 0;

    std::vector<AnswerRecord> records() const;
};

/// Cartesian product of (case x config x ratio) with bounded parallelism.
/// The rejection task runs each case once per configuration over an
/// all-negative set; the counterfactual task runs the counterfactual docset
/// per configuration plus, for the baseline, the no-document probe. Partial
/// failures are recorded, not fatal; zero successes is a run-level error.
RunReport run_task(const std::vector<corpus::TestCase>& cases, corpus::TaskKind task,
                   const std::vector<prompts::ConfigKind>& configs, const std::vector<double>& ratios,
                   llm::Gateway& gateway, const PipelineOptions& options);

/// Canonical record serialization (no volatile fields).
std::string record_to_json(const AnswerRecord& record);
AnswerRecord record_from_json(const std::string& line);

}  // namespace grag::pipeline
