#include "grag/config.hpp"

#include <json.hpp>

#include <cstdlib>

#include "grag/util.hpp"

namespace grag::config {

using nlohmann::ordered_json;

std::vector<double> default_ratios(corpus::TaskKind task) {
    switch (task) {
        case corpus::TaskKind::noise: return {0.0, 0.2, 0.4, 0.6, 0.8};
        case corpus::TaskKind::integration: return {0.0, 0.2, 0.4};
        case corpus::TaskKind::rejection: return {1.0};
        case corpus::TaskKind::counterfactual: return {0.0};
    }
    return {0.0};
}

RunConfig config_from_json(const std::string& json_text) {
    auto parsed = ordered_json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    RunConfig config;
    if (parsed.contains("task")) {
        config.task = corpus::task_from_string(parsed.at("task").get<std::string>());
    }
    config.testset = parsed.value("testset", config.testset);
    if (parsed.contains("configs")) {
        config.configs.clear();
        for (const auto& name : parsed.at("configs")) {
            config.configs.push_back(prompts::config_from_string(name.get<std::string>()));
        }
    }
    if (parsed.contains("ratios")) {
        config.ratios = parsed.at("ratios").get<std::vector<double>>();
    }
    config.n_docs = parsed.value("n_docs", config.n_docs);
    config.seed = parsed.value("seed", config.seed);
    config.entity_threshold = parsed.value("entity_threshold", config.entity_threshold);
    config.resolution = parsed.value("resolution", config.resolution);
    config.leiden_restarts = parsed.value("leiden_restarts", config.leiden_restarts);
    config.chunk_tokens = parsed.value("chunk_tokens", config.chunk_tokens);
    config.overlap_tokens = parsed.value("overlap_tokens", config.overlap_tokens);
    config.context_budget = parsed.value("context_budget", config.context_budget);
    config.summary_budget = parsed.value("summary_budget", config.summary_budget);
    config.parallelism = parsed.value("parallelism", config.parallelism);
    config.shuffle_docs = parsed.value("shuffle_docs", config.shuffle_docs);
    config.write_artifacts = parsed.value("write_artifacts", config.write_artifacts);
    config.cache_dir = parsed.value("cache_dir", config.cache_dir);
    if (parsed.contains("extra_rejection_markers")) {
        config.extra_rejection_markers =
            parsed.at("extra_rejection_markers").get<std::vector<std::string>>();
    }
    if (parsed.contains("backend")) {
        const auto& backend = parsed.at("backend");
        config.backend.kind = backend.value("kind", config.backend.kind);
        config.backend.model = backend.value("model", config.backend.model);
        config.backend.temperature = backend.value("temperature", config.backend.temperature);
        config.backend.max_output_tokens =
            backend.value("max_output_tokens", config.backend.max_output_tokens);
        config.backend.api_base = backend.value("api_base", config.backend.api_base);
        config.backend.fixtures = backend.value("fixtures", config.backend.fixtures);
        config.backend.strict = backend.value("strict", config.backend.strict);
        config.backend.rate_limit_per_sec =
            backend.value("rate_limit_per_sec", config.backend.rate_limit_per_sec);
        config.backend.max_attempts = backend.value("max_attempts", config.backend.max_attempts);
        config.backend.backoff_base_ms =
            backend.value("backoff_base_ms", config.backend.backoff_base_ms);
    }
    return config;
}

std::string config_to_json(const RunConfig& config) {
    ordered_json out;
    out["task"] = corpus::to_string(config.task);
    out["testset"] = config.testset;
    auto configs = ordered_json::array();
    for (const auto kind : config.configs) {
        configs.push_back(prompts::to_string(kind));
    }
    out["configs"] = std::move(configs);
    out["ratios"] = config.ratios.empty() ? default_ratios(config.task) : config.ratios;
    out["n_docs"] = config.n_docs;
    out["seed"] = config.seed;
    out["entity_threshold"] = config.entity_threshold;
    out["resolution"] = config.resolution;
    out["leiden_restarts"] = config.leiden_restarts;
    out["chunk_tokens"] = config.chunk_tokens;
    out["overlap_tokens"] = config.overlap_tokens;
    out["context_budget"] = config.context_budget;
    out["summary_budget"] = config.summary_budget;
    out["parallelism"] = config.parallelism;
    out["shuffle_docs"] = config.shuffle_docs;
    out["write_artifacts"] = config.write_artifacts;
    out["cache_dir"] = config.cache_dir;
    out["extra_rejection_markers"] = config.extra_rejection_markers;
    ordered_json backend;
    backend["kind"] = config.backend.kind;
    backend["model"] = config.backend.model;
    backend["temperature"] = config.backend.temperature;
    backend["max_output_tokens"] = config.backend.max_output_tokens;
    backend["api_base"] = config.backend.api_base;
    backend["fixtures"] = config.backend.fixtures;
    backend["strict"] = config.backend.strict;
    backend["rate_limit_per_sec"] = config.backend.rate_limit_per_sec;
    backend["max_attempts"] = config.backend.max_attempts;
    backend["backoff_base_ms"] = config.backend.backoff_base_ms;
    out["backend"] = std::move(backend);
    return out.dump(2);
}

RunConfig load_config_file(const std::filesystem::path& path) {
    return config_from_json(util::read_file(path));
}

namespace {

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value ? value : "";
}

}  // namespace

void validate(const RunConfig& config) {
    for (double ratio : config.ratios) {
        if (ratio < 0.0 || ratio > 1.0) {
            throw Error(Error::Kind::invalid_argument, "noise ratios must be in [0, 1]");
        }
    }
    if (config.n_docs < 1) {
        throw Error(Error::Kind::invalid_argument, "n_docs must be >= 1");
    }
    if (config.entity_threshold < 0.0 || config.entity_threshold > 1.0) {
        throw Error(Error::Kind::invalid_argument, "entity_threshold must be in [0, 1]");
    }
    if (config.resolution <= 0.0) {
        throw Error(Error::Kind::invalid_argument, "resolution must be > 0");
    }
    if (config.chunk_tokens <= config.overlap_tokens) {
        throw Error(Error::Kind::invalid_argument, "chunk_tokens must exceed overlap_tokens");
    }
    if (config.context_budget == 0 || config.summary_budget == 0) {
        throw Error(Error::Kind::invalid_argument, "token budgets must be > 0");
    }
    if (config.configs.empty()) {
        throw Error(Error::Kind::invalid_argument, "at least one prompt configuration is required");
    }
    if (config.backend.kind == "http") {
        if (env_or_empty("LLM_API_KEY").empty()) {
            throw Error(Error::Kind::invalid_argument,
                        "http backend selected but LLM_API_KEY is not set");
        }
        if (config.backend.api_base.empty() && env_or_empty("LLM_API_BASE").empty()) {
            throw Error(Error::Kind::invalid_argument,
                        "http backend selected but no API base URL configured "
                        "(backend.api_base or LLM_API_BASE)");
        }
    } else if (config.backend.kind != "mock") {
        throw Error(Error::Kind::invalid_argument,
                    "unknown backend kind: " + config.backend.kind);
    }
}

GatewaySetup make_gateway(const RunConfig& config) {
    GatewaySetup setup;
    if (config.backend.kind == "http") {
        llm::HttpOptions options;
        options.base_url = config.backend.api_base.empty() ? env_or_empty("LLM_API_BASE")
                                                           : config.backend.api_base;
        options.api_key = env_or_empty("LLM_API_KEY");
        setup.backend = std::make_shared<llm::HttpBackend>(options);
    } else {
        llm::MockOptions options;
        if (!config.backend.fixtures.empty()) {
            options.fixtures_path = config.backend.fixtures;
        }
        options.strict = config.backend.strict;
        setup.backend = std::make_shared<llm::MockBackend>(options);
    }
    llm::GatewayOptions gateway_options;
    gateway_options.max_attempts = config.backend.max_attempts;
    gateway_options.backoff_base_ms = config.backend.backoff_base_ms;
    gateway_options.rate_limit_per_sec = config.backend.rate_limit_per_sec;
    if (!config.cache_dir.empty()) {
        gateway_options.cache_dir = config.cache_dir;
    }
    setup.gateway = std::make_unique<llm::Gateway>(setup.backend, gateway_options);
    return setup;
}

pipeline::PipelineOptions pipeline_options(const RunConfig& config) {
    pipeline::PipelineOptions options;
    options.n_docs = config.n_docs;
    options.seed = config.seed;
    options.entity_threshold = config.entity_threshold;
    options.resolution = config.resolution;
    options.leiden_restarts = config.leiden_restarts;
    options.chunk_tokens = config.chunk_tokens;
    options.overlap_tokens = config.overlap_tokens;
    options.context_budget = config.context_budget;
    options.summary_budget = config.summary_budget;
    options.parallelism = config.parallelism;
    options.shuffle_docs = config.shuffle_docs;
    options.use_cache = !config.cache_dir.empty();
    options.chat.model = config.backend.model;
    options.chat.temperature = config.backend.temperature;
    options.chat.max_output_tokens = config.backend.max_output_tokens;
    options.extra_rejection_markers = config.extra_rejection_markers;
    return options;
}

}  // namespace grag::config
