// Command-line front end. Builds a run-config JSON from flags and an
// optional config file, then drives the library through the C API only.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "grag/grag_c.h"

namespace {

using nlohmann::ordered_json;

struct SessionHolder {
    grag_session* session = nullptr;
    ~SessionHolder() { grag_session_destroy(session); }
};

struct StringHolder {
    char* text = nullptr;
    ~StringHolder() { grag_string_free(text); }
    std::string str() const { return text ? text : ""; }
};

int fail(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return 1;
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream stream(csv);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::string default_run_dir(const std::string& task) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    localtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
    return "runs/" + task + "-" + buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph-based RAG robustness benchmark runner"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(grag_version()));

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "convert an upstream test-set file");
    std::string ingest_input, ingest_task = "noise", ingest_output;
    ingest->add_option("input", ingest_input, "upstream JSONL file")->required();
    ingest->add_option("--task", ingest_task, "noise|integration|rejection|counterfactual");
    ingest->add_option("-o,--out", ingest_output, "canonical output file")->required();

    // ---- run ----
    auto* run = app.add_subcommand("run", "execute a benchmark task");
    std::string config_file, out_dir;
    std::string task = "noise", testset, configs_csv, ratios_csv;
    std::string backend_kind, model, fixtures, cache_dir;
    std::size_t n_docs = 5, chunk_tokens = 600, overlap_tokens = 100;
    std::size_t context_budget = 4000, summary_budget = 120, parallelism = 4;
    std::uint64_t seed = 42;
    double threshold = 0.7, resolution = 1.0, temperature = 0.0, rate_limit = 0.0;
    bool no_shuffle = false, no_artifacts = false, strict_mock = false;
    run->add_option("-c,--config", config_file, "config file (JSON, // comments allowed)");
    run->add_option("--task", task, "noise|integration|rejection|counterfactual");
    run->add_option("--testset", testset, "canonical test-set file");
    run->add_option("--configs", configs_csv, "comma list: rgb,gr_rgb,gr_def,gr_ext,gr_comb");
    run->add_option("--ratios", ratios_csv, "comma list of noise ratios in [0,1]");
    run->add_option("--n-docs", n_docs, "retrieved documents per query");
    run->add_option("--seed", seed, "run seed");
    run->add_option("--threshold", threshold, "entity confidence threshold");
    run->add_option("--resolution", resolution, "community detection resolution");
    run->add_option("--chunk-tokens", chunk_tokens, "chunk size in tokens");
    run->add_option("--overlap-tokens", overlap_tokens, "chunk overlap in tokens");
    run->add_option("--context-budget", context_budget, "structured context token budget");
    run->add_option("--summary-budget", summary_budget, "community summary token budget");
    run->add_option("--parallelism", parallelism, "worker threads");
    run->add_flag("--no-shuffle", no_shuffle, "keep positives-first document order");
    run->add_flag("--no-artifacts", no_artifacts, "skip per-trial artifact bundles");
    run->add_option("--cache-dir", cache_dir, "response cache directory ('' disables)");
    run->add_option("--backend", backend_kind, "mock|http");
    run->add_option("--model", model, "model id sent to the backend");
    run->add_option("--temperature", temperature, "sampling temperature");
    run->add_option("--fixtures", fixtures, "mock fixture file");
    run->add_flag("--strict-mock", strict_mock, "mock fixture misses become errors");
    run->add_option("--rate-limit", rate_limit, "requests per second (0 = unlimited)");
    run->add_option("-o,--out", out_dir, "run output directory");

    // ---- report ----
    auto* report = app.add_subcommand("report", "render metrics for a finished run");
    std::string report_dir, report_format = "table";
    report->add_option("run_dir", report_dir, "run directory")->required();
    report->add_option("--format", report_format, "table|machine|plotdata");

    // ---- inspect ----
    auto* inspect = app.add_subcommand("inspect", "dump stored artifacts for one case");
    std::string inspect_dir, inspect_case;
    inspect->add_option("case_id", inspect_case, "case id")->required();
    inspect->add_option("run_dir", inspect_dir, "run directory")->required();

    // ---- cache ----
    auto* cache = app.add_subcommand("cache", "response cache maintenance");
    cache->require_subcommand(1);
    auto* purge = cache->add_subcommand("purge", "delete cached responses");
    std::string purge_dir;
    purge->add_option("--cache-dir", purge_dir, "cache directory (default: configured)");

    CLI11_PARSE(app, argc, argv);

    // Effective config: file first, then explicitly set flags on top.
    ordered_json config = ordered_json::object();
    if (!config_file.empty()) {
        try {
            std::ifstream in(config_file);
            if (!in) {
                return fail("cannot open config file: " + config_file);
            }
            config = ordered_json::parse(in, nullptr, true, /*ignore_comments=*/true);
        } catch (const std::exception& e) {
            return fail(std::string("bad config file: ") + e.what());
        }
    }
    ordered_json backend =
        config.contains("backend") ? config["backend"] : ordered_json::object();
    auto set_if = [&](const CLI::Option* option, const char* key, ordered_json value) {
        if (option && option->count() > 0) {
            config[key] = std::move(value);
        }
    };
    auto set_backend_if = [&](const CLI::Option* option, const char* key, ordered_json value) {
        if (option && option->count() > 0) {
            backend[key] = std::move(value);
        }
    };
    set_if(run->get_option("--task"), "task", task);
    set_if(run->get_option("--testset"), "testset", testset);
    if (run->get_option("--configs")->count() > 0) {
        config["configs"] = split_csv(configs_csv);
    }
    if (run->get_option("--ratios")->count() > 0) {
        std::vector<double> ratios;
        for (const auto& item : split_csv(ratios_csv)) {
            try {
                ratios.push_back(std::stod(item));
            } catch (const std::exception&) {
                return fail("bad ratio value: " + item);
            }
        }
        config["ratios"] = ratios;
    }
    set_if(run->get_option("--n-docs"), "n_docs", n_docs);
    set_if(run->get_option("--seed"), "seed", seed);
    set_if(run->get_option("--threshold"), "entity_threshold", threshold);
    set_if(run->get_option("--resolution"), "resolution", resolution);
    set_if(run->get_option("--chunk-tokens"), "chunk_tokens", chunk_tokens);
    set_if(run->get_option("--overlap-tokens"), "overlap_tokens", overlap_tokens);
    set_if(run->get_option("--context-budget"), "context_budget", context_budget);
    set_if(run->get_option("--summary-budget"), "summary_budget", summary_budget);
    set_if(run->get_option("--parallelism"), "parallelism", parallelism);
    set_if(run->get_option("--no-shuffle"), "shuffle_docs", !no_shuffle);
    set_if(run->get_option("--no-artifacts"), "write_artifacts", !no_artifacts);
    set_if(run->get_option("--cache-dir"), "cache_dir", cache_dir);
    set_backend_if(run->get_option("--backend"), "kind", backend_kind);
    set_backend_if(run->get_option("--model"), "model", model);
    set_backend_if(run->get_option("--temperature"), "temperature", temperature);
    set_backend_if(run->get_option("--fixtures"), "fixtures", fixtures);
    set_backend_if(run->get_option("--strict-mock"), "strict", strict_mock);
    set_backend_if(run->get_option("--rate-limit"), "rate_limit_per_sec", rate_limit);
    if (!backend.empty()) {
        config["backend"] = backend;
    }

    SessionHolder holder;
    {
        StringHolder error;
        if (grag_session_create(config.dump().c_str(), &holder.session, &error.text) != GRAG_OK) {
            return fail("invalid configuration: " + error.str());
        }
    }

    if (*ingest) {
        StringHolder summary;
        if (grag_ingest(holder.session, ingest_input.c_str(), ingest_task.c_str(),
                        ingest_output.c_str(), &summary.text) != GRAG_OK) {
            return fail(grag_last_error(holder.session));
        }
        std::cout << summary.str();
        return 0;
    }
    if (*run) {
        if (out_dir.empty()) {
            out_dir = default_run_dir(config.value("task", std::string("noise")));
        }
        StringHolder manifest;
        if (grag_run(holder.session, out_dir.c_str(), &manifest.text) != GRAG_OK) {
            return fail(grag_last_error(holder.session));
        }
        std::cout << manifest.str();
        std::cerr << "run written to " << out_dir << "\n";
        return 0;
    }
    if (*report) {
        StringHolder text;
        if (grag_report(holder.session, report_dir.c_str(), report_format.c_str(), &text.text) !=
            GRAG_OK) {
            return fail(grag_last_error(holder.session));
        }
        std::cout << text.str();
        return 0;
    }
    if (*inspect) {
        StringHolder text;
        if (grag_inspect(holder.session, inspect_dir.c_str(), inspect_case.c_str(), &text.text) !=
            GRAG_OK) {
            return fail(grag_last_error(holder.session));
        }
        std::cout << text.str();
        return 0;
    }
    if (*purge) {
        StringHolder summary;
        const char* dir = purge_dir.empty() ? nullptr : purge_dir.c_str();
        if (grag_cache_purge(holder.session, dir, &summary.text) != GRAG_OK) {
            return fail(grag_last_error(holder.session));
        }
        std::cout << summary.str();
        return 0;
    }
    return fail("no subcommand selected");
}
