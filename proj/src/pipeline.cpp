#include "grag/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <sstream>

#include "grag/community.hpp"
#include "grag/context.hpp"
#include "grag/detectors.hpp"
#include "grag/extract.hpp"
#include "grag/kgraph.hpp"
#include "grag/summarize.hpp"
#include "grag/text.hpp"
#include "grag/util.hpp"

namespace grag::pipeline {

using nlohmann::ordered_json;

std::string to_string(Classification c) {
    switch (c) {
        case Classification::answered: return "answered";
        case Classification::rejected: return "rejected";
        case Classification::error_detected: return "error_detected";
        case Classification::backend_failed: return "backend_failed";
    }
    return "answered";
}

Classification classification_from_string(const std::string& name) {
    if (name == "answered") return Classification::answered;
    if (name == "rejected") return Classification::rejected;
    if (name == "error_detected") return Classification::error_detected;
    if (name == "backend_failed") return Classification::backend_failed;
    throw Error(Error::Kind::parse, "unknown classification: " + name);
}

std::string to_string(TrialMode mode) {
    return mode == TrialMode::with_docs ? "docs" : "probe";
}

std::string AnswerRecord::key() const {
    return case_id + "__" + prompts::to_string(config) + "__r" + util::format_fixed2(noise_ratio) +
           "__" + to_string(mode);
}

namespace {

std::string docset_to_json(const corpus::DocumentSet& docset) {
    ordered_json out;
    out["noise_ratio"] = docset.noise_ratio;
    out["seed"] = docset.seed;
    out["negative_filled"] = docset.negative_filled;
    out["padded"] = docset.padded;
    auto docs = ordered_json::array();
    for (const auto& doc : docset.docs) {
        docs.push_back({{"label", corpus::to_string(doc.label)}, {"text", doc.text}});
    }
    out["docs"] = std::move(docs);
    return out.dump();
}

corpus::DocumentSet docset_for(const corpus::TestCase& test_case, const prompts::PromptConfig& config,
                               double noise_ratio, const PipelineOptions& options) {
    corpus::MixOptions mix;
    mix.shuffle = options.shuffle_docs;
    switch (config.task) {
        case corpus::TaskKind::rejection:
            // Only noisy documents: the model is expected to refuse.
            mix.allow_negative_fill = true;
            return corpus::mix_documents(test_case, 1.0, options.n_docs, options.seed, mix);
        case corpus::TaskKind::counterfactual:
            return corpus::counterfactual_docset(test_case, options.n_docs);
        default:
            return corpus::mix_documents(test_case, noise_ratio, options.n_docs, options.seed, mix);
    }
}

Classification classify(const std::string& response,
                        const std::vector<std::string>& extra_markers) {
    if (eval::detects_error(response)) {
        return Classification::error_detected;
    }
    if (eval::is_rejection(response, extra_markers)) {
        return Classification::rejected;
    }
    return Classification::answered;
}

}  // namespace

TrialResult answer_query(const corpus::TestCase& test_case, const prompts::PromptConfig& config,
                         double noise_ratio, TrialMode mode, llm::Gateway& gateway,
                         const PipelineOptions& options) {
    if (config.task != test_case.task) {
        throw Error(Error::Kind::invalid_argument,
                    "prompt configuration task does not match case task");
    }
    if (mode == TrialMode::no_doc_probe &&
        (config.task != corpus::TaskKind::counterfactual ||
         config.kind != prompts::ConfigKind::rgb_baseline)) {
        throw Error(Error::Kind::invalid_argument,
                    "the no-document probe only applies to the counterfactual baseline");
    }

    TrialResult result;
    auto& record = result.record;
    record.case_id = test_case.id;
    record.task = test_case.task;
    record.config = config.kind;
    record.noise_ratio = noise_ratio;
    record.mode = mode;
    record.gold_answers = test_case.gold_answers;

    const auto started = std::chrono::steady_clock::now();
    try {
        std::string context_text;
        if (mode == TrialMode::with_docs) {
            const auto docset = docset_for(test_case, config, noise_ratio, options);
            record.docset_fingerprint = docset.fingerprint();
            result.artifacts.docset_json = docset_to_json(docset);

            if (config.kind == prompts::ConfigKind::rgb_baseline) {
                std::string joined;
                for (const auto& doc : docset.docs) {
                    if (!joined.empty()) {
                        joined += "\n\n";
                    }
                    joined += doc.text;
                }
                context_text = joined;
            } else {
                const auto chunks =
                    kgraph::chunk_documents(docset, options.chunk_tokens, options.overlap_tokens);
                extract::ExtractOptions extract_options;
                extract_options.parallelism = options.parallelism;
                extract_options.use_cache = options.use_cache;
                const auto raw =
                    extract::extract_elements(chunks, gateway, options.chat, extract_options);
                const auto graph = kgraph::build_graph(raw, options.entity_threshold);
                result.artifacts.graph_dump = kgraph::dump_graph(graph);

                // Entity ids sorted by the map give the node numbering.
                std::vector<std::string> node_ids;
                node_ids.reserve(graph.entities.size());
                for (const auto& [id, entity] : graph.entities) {
                    node_ids.push_back(id);
                }
                std::vector<community::Edge> edges;
                for (const auto& rel : graph.relationships) {
                    const auto src = std::lower_bound(node_ids.begin(), node_ids.end(), rel.source);
                    const auto dst = std::lower_bound(node_ids.begin(), node_ids.end(), rel.target);
                    edges.push_back({static_cast<int>(src - node_ids.begin()),
                                     static_cast<int>(dst - node_ids.begin()), rel.weight});
                }
                community::WeightedGraph entity_graph(node_ids.size(), edges);
                community::DetectOptions detect;
                detect.resolution = options.resolution;
                detect.seed = util::derive_seed(options.seed, {test_case.id, "leiden"});
                detect.restarts = options.leiden_restarts;
                const auto hierarchy = community::detect_communities(entity_graph, detect);
                result.artifacts.communities_dump = community::dump_partitions(hierarchy, node_ids);

                summarize::SummarizeOptions summarize_options;
                summarize_options.token_budget = options.summary_budget;
                summarize_options.parallelism = options.parallelism;
                summarize_options.use_cache = options.use_cache;
                const auto summaries = summarize::summarize_communities(
                    hierarchy, graph, node_ids, gateway, options.chat, summarize_options);

                const std::size_t level = hierarchy.query_level();
                std::vector<summarize::CommunitySummary> query_summaries;
                for (const auto& summary : summaries) {
                    if (summary.level == level) {
                        query_summaries.push_back(summary);
                    }
                }
                const auto context =
                    assemble_context(graph, query_summaries, options.context_budget);
                result.artifacts.context_text = context.text();
                context_text = context.text();
            }
        }

        const auto prompt = prompts::render_answer_prompt(config, context_text, test_case.question);
        record.prompt_digest = util::sha256_hex(prompt.system_text + "\x1f" + prompt.user_text);
        result.artifacts.prompt_text = prompt.system_text + "\n---\n" + prompt.user_text;

        auto request = options.chat.make_request(prompt.system_text, prompt.user_text);
        record.response =
            options.use_cache ? gateway.cached_complete(request) : gateway.complete(request);
        result.artifacts.response_text = record.response;
        record.classification = classify(record.response, options.extra_rejection_markers);
    } catch (const Error& e) {
        record.classification = Classification::backend_failed;
        record.failure = e.what();
        record.response.clear();
    }
    record.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    return result;
}

std::vector<AnswerRecord> RunReport::records() const {
    std::vector<AnswerRecord> out;
    out.reserve(trials.size());
    for (const auto& trial : trials) {
        out.push_back(trial.record);
    }
    return out;
}

RunReport run_task(const std::vector<corpus::TestCase>& cases, corpus::TaskKind task,
                   const std::vector<prompts::ConfigKind>& configs, const std::vector<double>& ratios,
                   llm::Gateway& gateway, const PipelineOptions& options) {
    for (const auto& test_case : cases) {
        if (test_case.task != task) {
            throw Error(Error::Kind::invalid_argument,
                        "test set is not homogeneous: case `" + test_case.id + "` has task " +
                            corpus::to_string(test_case.task));
        }
    }
    if (configs.empty()) {
        throw Error(Error::Kind::invalid_argument, "no prompt configurations selected");
    }

    struct Trial {
        const corpus::TestCase* test_case;
        prompts::ConfigKind config;
        double ratio;
        TrialMode mode;
    };
    std::vector<Trial> trials;
    for (const auto& test_case : cases) {
        for (const auto config : configs) {
            switch (task) {
                case corpus::TaskKind::rejection:
                    trials.push_back({&test_case, config, 1.0, TrialMode::with_docs});
                    break;
                case corpus::TaskKind::counterfactual:
                    trials.push_back({&test_case, config, 0.0, TrialMode::with_docs});
                    if (config == prompts::ConfigKind::rgb_baseline) {
                        trials.push_back({&test_case, config, 0.0, TrialMode::no_doc_probe});
                    }
                    break;
                default:
                    for (double ratio : ratios) {
                        trials.push_back({&test_case, config, ratio, TrialMode::with_docs});
                    }
                    break;
            }
        }
    }

    RunReport report;
    report.task = task;
    report.trials.resize(trials.size());
    util::parallel_for(trials.size(), options.parallelism, [&](std::size_t i) {
        const auto& trial = trials[i];
        prompts::PromptConfig prompt_config{trial.config, task};
        report.trials[i] =
            answer_query(*trial.test_case, prompt_config, trial.ratio, trial.mode, gateway, options);
    });

    // Deterministic merge order regardless of completion order.
    std::sort(report.trials.begin(), report.trials.end(),
              [](const TrialResult& a, const TrialResult& b) {
                  return std::make_tuple(a.record.case_id, prompts::to_string(a.record.config),
                                         a.record.noise_ratio, to_string(a.record.mode)) <
                         std::make_tuple(b.record.case_id, prompts::to_string(b.record.config),
                                         b.record.noise_ratio, to_string(b.record.mode));
              });
    for (const auto& trial : report.trials) {
        if (trial.record.classification == Classification::backend_failed) {
            ++report.failures;
        }
    }
    if (report.failures == report.trials.size()) {
        throw Error(Error::Kind::backend, "run produced zero successful records");
    }
    return report;
}

std::string record_to_json(const AnswerRecord& record) {
    ordered_json out;
    out["case_id"] = record.case_id;
    out["task"] = corpus::to_string(record.task);
    out["config"] = prompts::to_string(record.config);
    out["noise_ratio"] = record.noise_ratio;
    out["mode"] = to_string(record.mode);
    out["docset_fingerprint"] = record.docset_fingerprint;
    out["prompt_digest"] = record.prompt_digest;
    out["response"] = record.response;
    out["classification"] = to_string(record.classification);
    out["failure"] = record.failure;
    out["gold_answers"] = record.gold_answers;
    return out.dump();
}

AnswerRecord record_from_json(const std::string& line) {
    auto parsed = ordered_json::parse(line);
    AnswerRecord record;
    record.case_id = parsed.at("case_id").get<std::string>();
    record.task = corpus::task_from_string(parsed.at("task").get<std::string>());
    record.config = prompts::config_from_string(parsed.at("config").get<std::string>());
    record.noise_ratio = parsed.at("noise_ratio").get<double>();
    record.mode = parsed.at("mode").get<std::string>() == "probe" ? TrialMode::no_doc_probe
                                                                  : TrialMode::with_docs;
    record.docset_fingerprint = parsed.value("docset_fingerprint", "");
    record.prompt_digest = parsed.value("prompt_digest", "");
    record.response = parsed.value("response", "");
    record.classification = classification_from_string(parsed.at("classification").get<std::string>());
    record.failure = parsed.value("failure", "");
    record.gold_answers =
        parsed.at("gold_answers").get<std::vector<std::vector<std::string>>>();
    return record;
}

}  // namespace grag::pipeline
