#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "grag/corpus.hpp"
#include "grag/llm.hpp"
#include "grag/pipeline.hpp"
#include "grag/prompts.hpp"

namespace grag::config {

struct BackendConfig {
    std::string kind = "mock";  // mock | http
    std::string model = "mock-model";
    double temperature = 0.0;
    std::size_t max_output_tokens = 1024;
    std::string api_base;          // http: falls back to $LLM_API_BASE
    std::string fixtures;          // mock: optional fixture file
    bool strict = false;           // mock: fixture miss is an error
    double rate_limit_per_sec = 0.0;
    int max_attempts = 3;
    int backoff_base_ms = 500;
};

struct RunConfig {
    corpus::TaskKind task = corpus::TaskKind::noise;
    std::string testset;
    std::vector<prompts::ConfigKind> configs = {prompts::ConfigKind::rgb_baseline,
                                                prompts::ConfigKind::gr_ext};
    std::vector<double> ratios;  // empty: task default
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
    bool write_artifacts = true;
    std::string cache_dir = ".grag-cache";
    std::vector<std::string> extra_rejection_markers;
    BackendConfig backend;
};

/// Task-default noise ratios when the config leaves them empty.
std::vector<double> default_ratios(corpus::TaskKind task);

RunConfig config_from_json(const std::string& json_text);
std::string config_to_json(const RunConfig& config);

/// Reads a config file (JSON, // comments allowed).
RunConfig load_config_file(const std::filesystem::path& path);

/// Rejects out-of-range values and, for the http backend, missing
/// credentials — before any work starts.
void validate(const RunConfig& config);

struct GatewaySetup {
    std::shared_ptr<llm::Backend> backend;
    std::unique_ptr<llm::Gateway> gateway;
};

GatewaySetup make_gateway(const RunConfig& config);

pipeline::PipelineOptions pipeline_options(const RunConfig& config);

}  // namespace grag::config
