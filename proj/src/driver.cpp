#include "grag/driver.hpp"

#include <json.hpp>

#include <chrono>
#include <sstream>

#include "grag/eval.hpp"
#include "grag/text.hpp"
#include "grag/util.hpp"

namespace grag::driver {

using nlohmann::ordered_json;

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Digest of each configuration's rendered instruction template, recorded in
// the manifest so runs can be compared across prompt revisions.
ordered_json prompt_digests(const std::vector<prompts::ConfigKind>& configs,
                            corpus::TaskKind task) {
    ordered_json out;
    for (const auto kind : configs) {
        prompts::PromptConfig config{kind, task};
        const auto rendered = prompts::render_answer_prompt(config, "<context>", "<question>");
        out[prompts::to_string(kind)] = util::sha256_hex(rendered.system_text);
    }
    return out;
}

std::string sanitize_key(const std::string& key) {
    std::string out;
    for (char c : key) {
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'
                          ? c
                          : '_');
    }
    return out;
}

}  // namespace

std::string run(const config::RunConfig& config, const std::filesystem::path& out_dir) {
    config::validate(config);
    if (config.testset.empty()) {
        throw Error(Error::Kind::invalid_argument, "no test set configured");
    }
    const auto started = iso_timestamp();
    const auto cases = corpus::load_testset(config.testset, config.task);
    auto setup = config::make_gateway(config);
    const auto options = config::pipeline_options(config);
    const auto ratios = config.ratios.empty() ? config::default_ratios(config.task) : config.ratios;

    const auto report =
        pipeline::run_task(cases, config.task, config.configs, ratios, *setup.gateway, options);

    std::filesystem::create_directories(out_dir);

    std::string records_text;
    std::string timings_text;
    for (const auto& trial : report.trials) {
        records_text += pipeline::record_to_json(trial.record);
        records_text += '\n';
        ordered_json timing;
        timing["key"] = trial.record.key();
        timing["latency_ms"] = trial.record.latency_ms;
        timings_text += timing.dump();
        timings_text += '\n';
    }
    util::write_file(out_dir / "records.jsonl", records_text);
    util::write_file(out_dir / "timings.jsonl", timings_text);

    if (config.write_artifacts) {
        for (const auto& trial : report.trials) {
            ordered_json bundle;
            bundle["key"] = trial.record.key();
            bundle["case_id"] = trial.record.case_id;
            bundle["classification"] = pipeline::to_string(trial.record.classification);
            bundle["failure"] = trial.record.failure;
            bundle["docset"] = trial.artifacts.docset_json;
            bundle["graph"] = trial.artifacts.graph_dump;
            bundle["communities"] = trial.artifacts.communities_dump;
            bundle["context"] = trial.artifacts.context_text;
            bundle["prompt"] = trial.artifacts.prompt_text;
            bundle["response"] = trial.artifacts.response_text;
            util::write_file(out_dir / "artifacts" / (sanitize_key(trial.record.key()) + ".json"),
                             bundle.dump(2));
        }
    }

    eval::EvalOptions eval_options;
    eval_options.extra_rejection_markers = config.extra_rejection_markers;
    const auto metrics = eval::compute_metrics(report.records(), config.task, eval_options);
    util::write_file(out_dir / "metrics.jsonl", eval::emit_machine(metrics));
    util::write_file(out_dir / "metrics.txt", eval::emit_table(metrics, config.task));

    ordered_json manifest;
    manifest["version"] = version();
    manifest["task"] = corpus::to_string(config.task);
    manifest["started"] = started;
    manifest["finished"] = iso_timestamp();
    manifest["backend"] = setup.backend->name();
    manifest["model"] = config.backend.model;
    manifest["seed"] = config.seed;
    manifest["cases"] = cases.size();
    manifest["records"] = report.trials.size();
    manifest["failures"] = report.failures;
    manifest["backend_calls"] = setup.backend->calls();
    manifest["cache_hits"] = setup.gateway->cache_hits();
    manifest["cache_misses"] = setup.gateway->cache_misses();
    manifest["prompt_digests"] = prompt_digests(config.configs, config.task);
    manifest["effective_config"] = ordered_json::parse(config::config_to_json(config));
    const std::string manifest_text = manifest.dump(2) + "\n";
    util::write_file(out_dir / "manifest.json", manifest_text);
    return manifest_text;
}

std::string report(const std::filesystem::path& run_dir, const std::string& format) {
    const auto records_path = run_dir / "records.jsonl";
    if (!std::filesystem::exists(records_path)) {
        throw Error(Error::Kind::not_found,
                    "no records.jsonl under " + run_dir.string() + " (not a run directory?)");
    }
    std::vector<pipeline::AnswerRecord> records;
    for (const auto& line : util::read_lines(records_path)) {
        if (!text::normalize_whitespace(line).empty()) {
            records.push_back(pipeline::record_from_json(line));
        }
    }
    if (records.empty()) {
        throw Error(Error::Kind::not_found, "run directory holds no records");
    }
    const auto task = records.front().task;
    const auto metrics = eval::compute_metrics(records, task);

    switch (eval::report_format_from_string(format)) {
        case eval::ReportFormat::table:
            return eval::emit_table(metrics, task);
        case eval::ReportFormat::machine:
            return eval::emit_machine(metrics);
        case eval::ReportFormat::plotdata: {
            std::string listing;
            for (const auto& [name, content] : eval::emit_plotdata(metrics)) {
                const auto path = run_dir / "plot" / name;
                util::write_file(path, content);
                listing += path.string() + "\n";
            }
            if (listing.empty()) {
                throw Error(Error::Kind::not_found, "no plottable series in this run");
            }
            return listing;
        }
    }
    throw Error(Error::Kind::internal, "unhandled report format");
}

std::string inspect(const std::filesystem::path& run_dir, const std::string& case_id) {
    const auto artifacts_dir = run_dir / "artifacts";
    if (!std::filesystem::exists(artifacts_dir)) {
        throw Error(Error::Kind::not_found,
                    "no artifacts under " + run_dir.string() +
                        " (run was written with write_artifacts=false?)");
    }
    std::vector<std::filesystem::path> matches;
    for (const auto& entry : std::filesystem::directory_iterator(artifacts_dir)) {
        if (entry.path().extension() != ".json") {
            continue;
        }
        const auto bundle = ordered_json::parse(util::read_file(entry.path()));
        if (bundle.value("case_id", "") == case_id) {
            matches.push_back(entry.path());
        }
    }
    if (matches.empty()) {
        throw Error(Error::Kind::not_found, "case id `" + case_id + "` not found in run");
    }
    std::sort(matches.begin(), matches.end());

    std::ostringstream out;
    for (const auto& path : matches) {
        const auto bundle = ordered_json::parse(util::read_file(path));
        out << "=== " << bundle.value("key", path.stem().string()) << " ===\n";
        if (!bundle.value("failure", std::string()).empty()) {
            out << "--- FAILED ---\n" << bundle["failure"].get<std::string>() << "\n";
        }
        const std::pair<const char*, const char*> sections[] = {
            {"docset", "DOCUMENT SET"},       {"graph", "KNOWLEDGE GRAPH"},
            {"communities", "COMMUNITIES"},   {"context", "ASSEMBLED CONTEXT"},
            {"prompt", "PROMPT"},             {"response", "RESPONSE"},
        };
        for (const auto& [key, title] : sections) {
            out << "--- " << title << " ---\n";
            const std::string body = bundle.value(key, "");
            out << (body.empty() ? "(empty)" : body);
            if (body.empty() || body.back() != '\n') {
                out << '\n';
            }
        }
        out << '\n';
    }
    return out.str();
}

std::string ingest(const std::filesystem::path& upstream, corpus::TaskKind task,
                   const std::filesystem::path& out_path) {
    const auto result = corpus::ingest_upstream(upstream, task);
    if (result.cases.empty()) {
        throw Error(Error::Kind::validation,
                    "no valid cases found in " + upstream.string() + " (" +
                        std::to_string(result.diagnostics.size()) + " problem lines)");
    }
    corpus::save_testset(out_path, result.cases);
    ordered_json summary;
    summary["task"] = corpus::to_string(task);
    summary["cases"] = result.cases.size();
    summary["output"] = out_path.string();
    auto diagnostics = ordered_json::array();
    for (const auto& diagnostic : result.diagnostics) {
        diagnostics.push_back({{"line", diagnostic.line}, {"message", diagnostic.message}});
    }
    summary["diagnostics"] = std::move(diagnostics);
    return summary.dump(2) + "\n";
}

std::string cache_purge(const std::filesystem::path& cache_dir) {
    const auto removed = llm::purge_cache(cache_dir);
    return "purged " + std::to_string(removed) + " cache entries from " + cache_dir.string() + "\n";
}

std::string version() {
    return "0.1.0";
}

}  // namespace grag::driver
