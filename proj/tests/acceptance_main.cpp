// Acceptance suite: runs every gating criterion and prints one PASS/FAIL
// line per criterion. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grag/community.hpp"
#include "grag/config.hpp"
#include "grag/corpus.hpp"
#include "grag/detectors.hpp"
#include "grag/driver.hpp"
#include "grag/eval.hpp"
#include "grag/kgraph.hpp"
#include "grag/llm.hpp"
#include "grag/pipeline.hpp"
#include "grag/prompts.hpp"
#include "grag/util.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace {

struct CheckFailure {
    std::string message;
};

void require(bool condition, const std::string& message) {
    if (!condition) {
        throw CheckFailure{message};
    }
}

int g_failures = 0;

void criterion(const std::string& name, const std::function<void()>& body) {
    const auto started = std::chrono::steady_clock::now();
    try {
        body();
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::printf("[PASS] %s (%.2fs)\n", name.c_str(), s);
    } catch (const CheckFailure& failure) {
        ++g_failures;
        std::printf("[FAIL] %s: %s\n", name.c_str(), failure.message.c_str());
    } catch (const std::exception& e) {
        ++g_failures;
        std::printf("[FAIL] %s: unexpected exception: %s\n", name.c_str(), e.what());
    }
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

void noise_mixing_exactness() {
    const auto started = std::chrono::steady_clock::now();
    auto test_case = grag::test::make_case("accept-mix", grag::corpus::TaskKind::noise, 64, 64);

    const std::size_t expected_neg[] = {0, 1, 2, 3, 4};
    const double ratios[] = {0.0, 0.2, 0.4, 0.6, 0.8};
    for (int i = 0; i < 5; ++i) {
        auto set = grag::corpus::mix_documents(test_case, ratios[i], 5, 42);
        require(set.docs.size() == 5, "docset size must be 5");
        require(set.count_label(grag::corpus::DocLabel::negative) == expected_neg[i],
                "negative count wrong at ratio " + std::to_string(ratios[i]));
    }

    std::mt19937_64 rng(2025);
    std::size_t checked = 0;
    while (checked < 1000) {
        const std::size_t n = 1 + rng() % 48;
        const double ratio = static_cast<double>(rng() % 1001) / 1000.0;
        const std::size_t expected = static_cast<std::size_t>(std::floor(ratio * n + 0.5));
        if (n - expected > test_case.positive_docs.size() ||
            expected > test_case.negative_docs.size()) {
            continue;
        }
        auto set = grag::corpus::mix_documents(test_case, ratio, n, rng());
        require(set.docs.size() == n, "docset size mismatch");
        require(set.count_label(grag::corpus::DocLabel::negative) == expected,
                "count != round(r*n) at n=" + std::to_string(n) + " r=" + std::to_string(ratio));
        ++checked;
    }
    require(seconds_since(started) < 1.0, "noise-mixing property suite exceeded 1s");
}

// ---------------------------------------------------------------------------

struct ScriptedRecord {
    grag::pipeline::AnswerRecord record;
    bool expect_match;
    bool expect_reject;
    bool expect_detect;
    bool failed;
    bool probe;
};

std::vector<ScriptedRecord> scripted_records(grag::corpus::TaskKind task) {
    using grag::pipeline::AnswerRecord;
    using grag::pipeline::Classification;
    using grag::pipeline::TrialMode;
    std::vector<ScriptedRecord> scripted;
    std::mt19937_64 rng(static_cast<unsigned>(task) + 7);
    for (int i = 0; i < 24; ++i) {
        AnswerRecord record;
        record.case_id = "s" + std::to_string(i);
        record.task = task;
        record.config = grag::prompts::ConfigKind::gr_comb;
        record.noise_ratio = 0.2;
        record.gold_answers = {{"Aldoria", "the Aldorian capital"}};
        ScriptedRecord entry{};
        const int kind = static_cast<int>(rng() % 6);
        switch (kind) {
            case 0:
                record.response = "The capital is Aldoria.";
                entry = {record, true, false, false, false, false};
                break;
            case 1:
                record.response = "I cannot answer the question due to insufficient information "
                                  "in the documents.";
                entry = {record, false, true, false, false, false};
                break;
            case 2:
                record.response = "There are factual errors in the provided documents. "
                                  "The correct answer is Aldoria.";
                entry = {record, true, false, true, false, false};
                break;
            case 3:
                record.response = "There are factual errors in the provided documents.";
                entry = {record, false, false, true, false, false};
                break;
            case 4:
                record.response = "Some unrelated ramble about Velmont.";
                entry = {record, false, false, false, false, false};
                break;
            default:
                record.response.clear();
                record.classification = Classification::backend_failed;
                entry = {record, false, false, false, true, false};
                break;
        }
        if (task == grag::corpus::TaskKind::counterfactual && i % 6 == 5) {
            // convert the occasional record into a no-document probe
            entry.record.mode = TrialMode::no_doc_probe;
            entry.record.classification = Classification::answered;
            entry.record.response = "Aldoria";
            entry.record.failure.clear();
            entry = {entry.record, true, false, false, false, true};
        }
        scripted.push_back(entry);
    }
    return scripted;
}

void metric_oracle_equivalence() {
    const grag::corpus::TaskKind tasks[] = {
        grag::corpus::TaskKind::noise,
        grag::corpus::TaskKind::integration,
        grag::corpus::TaskKind::rejection,
        grag::corpus::TaskKind::counterfactual,
    };
    const double tolerance = 0.005;
    for (const auto task : tasks) {
        auto scripted = scripted_records(task);
        std::vector<grag::pipeline::AnswerRecord> records;
        // independent brute-force recount from the scripted expectations
        std::size_t n = 0, probe_n = 0, matched = 0, rejected = 0, detected = 0, corrected = 0,
                    probe_matched = 0, failures = 0;
        for (const auto& entry : scripted) {
            records.push_back(entry.record);
            if (entry.failed) {
                ++failures;
                continue;
            }
            if (entry.probe) {
                ++probe_n;
                probe_matched += entry.expect_match ? 1 : 0;
                continue;
            }
            ++n;
            matched += entry.expect_match ? 1 : 0;
            rejected += entry.expect_reject ? 1 : 0;
            detected += entry.expect_detect ? 1 : 0;
            corrected += (entry.expect_detect && entry.expect_match) ? 1 : 0;
        }
        auto metrics = grag::eval::compute_group_metrics(records, task);
        require(metrics.n == n && metrics.failures == failures,
                "denominators disagree with the recount");
        auto close = [&](const std::optional<double>& got, double want, const char* what) {
            require(got.has_value(), std::string(what) + " missing");
            require(std::abs(*got - want) <= tolerance,
                    std::string(what) + " off: got " + std::to_string(*got) + " want " +
                        std::to_string(want));
        };
        switch (task) {
            case grag::corpus::TaskKind::noise:
            case grag::corpus::TaskKind::integration:
                close(metrics.acc, 100.0 * matched / n, "acc");
                break;
            case grag::corpus::TaskKind::rejection:
                close(metrics.rejection_rate, 100.0 * rejected / n, "rejection_rate");
                break;
            case grag::corpus::TaskKind::counterfactual:
                close(metrics.acc_doc, 100.0 * matched / n, "acc_doc");
                close(metrics.ed, 100.0 * detected / n, "ed");
                if (detected > 0) {
                    close(metrics.cr, 100.0 * corrected / detected, "cr");
                }
                close(metrics.acc, 100.0 * probe_matched / probe_n, "acc (probe)");
                break;
        }
    }

    // CR-undefined guard: zero detections must omit cr entirely.
    std::vector<grag::pipeline::AnswerRecord> plain;
    for (int i = 0; i < 20; ++i) {
        grag::pipeline::AnswerRecord record;
        record.case_id = "g" + std::to_string(i);
        record.task = grag::corpus::TaskKind::counterfactual;
        record.config = grag::prompts::ConfigKind::gr_def;
        record.response = "A plain answer.";
        record.gold_answers = {{"Aldoria"}};
        plain.push_back(record);
    }
    auto metrics = grag::eval::compute_group_metrics(plain, grag::corpus::TaskKind::counterfactual);
    require(!metrics.cr.has_value(), "cr must be undefined with zero detections");
    require(metrics.ed.has_value() && *metrics.ed == 0.0, "ed must be 0 with zero detections");
}

// ---------------------------------------------------------------------------

void phrase_detectors() {
    // Exact phrases as printed in the prompt figures.
    const std::string fig2_reject =
        "I cannot answer the question because of the insufficient information in documents.";
    const std::string fig3_reject =
        "I cannot answer the question due to insufficient information in the documents.";
    const std::string fig2_error = "There are factual errors in the provided documents.";
    require(grag::eval::is_rejection(fig2_reject), "fig2 refusal phrase must classify as rejection");
    require(grag::eval::is_rejection(fig3_reject), "fig3 refusal phrase must classify as rejection");
    require(grag::eval::detects_error(fig2_error + " The correct answer is 2004."),
            "error phrase must classify as error detection");
    require(!grag::eval::detects_error(fig3_reject), "refusal alone is not error detection");

    // 50 negative controls: ordinary answers must trip neither detector.
    const char* topics[] = {"the capital is Aldoria",
                            "the merger closed in 2019",
                            "Mount Harwick is 3,402 meters tall",
                            "the enzyme binds at site B",
                            "the treaty was signed in Oslo"};
    for (int i = 0; i < 50; ++i) {
        std::ostringstream response;
        response << "Answer " << i << ": based on the documents, " << topics[i % 5]
                 << ". Additional context follows in summary " << i << ".";
        require(!grag::eval::is_rejection(response.str()),
                "control response misclassified as rejection: " + response.str());
        require(!grag::eval::detects_error(response.str()),
                "control response misclassified as error detection: " + response.str());
    }
}

// ---------------------------------------------------------------------------

grag::community::WeightedGraph to_graph(int nodes, const std::vector<grag::test::OracleEdge>& edges) {
    std::vector<grag::community::Edge> converted;
    for (const auto& e : edges) {
        converted.push_back({e.u, e.v, e.w});
    }
    return grag::community::WeightedGraph(static_cast<std::size_t>(nodes), converted);
}

void leiden_correctness() {
    std::mt19937_64 rng(90210);
    std::size_t exhaustive_checked = 0;

    for (int trial = 0; trial < 200; ++trial) {
        const int nodes = 2 + static_cast<int>(rng() % 11);
        const double p = 0.15 + static_cast<double>(rng() % 60) / 100.0;
        std::vector<grag::test::OracleEdge> edges;
        for (int u = 0; u < nodes; ++u) {
            for (int v = u + 1; v < nodes; ++v) {
                if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p) {
                    edges.push_back({u, v, rng() % 2 ? 1.0 : 2.0});
                }
            }
        }
        auto graph = to_graph(nodes, edges);
        grag::community::DetectOptions options;
        options.seed = rng();
        auto hierarchy = grag::community::detect_communities(graph, options);

        // (a) partition validity + connectivity at every level
        for (std::size_t level = 0; level < hierarchy.levels(); ++level) {
            require(hierarchy.membership[level].size() == graph.size(),
                    "partition does not cover all nodes");
            for (const auto& members : hierarchy.communities(level)) {
                require(!members.empty(), "empty community");
                std::set<int> inside(members.begin(), members.end());
                std::set<int> visited{members.front()};
                std::vector<int> stack{members.front()};
                while (!stack.empty()) {
                    int v = stack.back();
                    stack.pop_back();
                    for (const auto& [u, w] : graph.neighbors(v)) {
                        if (inside.count(u) && !visited.count(u)) {
                            visited.insert(u);
                            stack.push_back(u);
                        }
                    }
                }
                require(visited.size() == inside.size(), "disconnected community");
            }
        }

        // (e) replay determinism
        auto replay = grag::community::detect_communities(graph, options);
        require(replay.membership == hierarchy.membership, "replay with fixed seed diverged");

        // (b) exhaustive optimum on graphs with <= 8 nodes
        if (nodes <= 8) {
            ++exhaustive_checked;
            const double best = grag::test::oracle_max_modularity(nodes, edges, 1.0);
            const double got =
                grag::community::modularity(graph, hierarchy.membership[0], 1.0);
            require(std::abs(got - best) < 1e-9,
                    "level-0 modularity " + std::to_string(got) + " != optimum " +
                        std::to_string(best) + " on " + std::to_string(nodes) + " nodes");
        }
    }
    require(exhaustive_checked >= 50, "suite produced too few small graphs");

    // (c) two 5-cliques joined by one edge recover the cliques
    std::vector<grag::test::OracleEdge> cliques;
    for (int u = 0; u < 5; ++u) {
        for (int v = u + 1; v < 5; ++v) {
            cliques.push_back({u, v, 1.0});
            cliques.push_back({5 + u, 5 + v, 1.0});
        }
    }
    cliques.push_back({4, 5, 1.0});
    auto bridge = to_graph(10, cliques);
    auto hierarchy = grag::community::detect_communities(bridge, grag::community::DetectOptions{});
    const std::vector<int> expected = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    require(hierarchy.membership[0] == expected, "two-clique bridge graph not split into cliques");

    // (d) planted partition: 1000 nodes, agreement >= 0.9, under a second
    std::vector<int> labels;
    auto planted = grag::test::planted_partition(1000, 10, 0.15, 0.002, 777, labels);
    auto big = to_graph(1000, planted);
    const auto started = std::chrono::steady_clock::now();
    auto detected = grag::community::detect_communities(big, grag::community::DetectOptions{});
    require(seconds_since(started) < 1.0, "planted-partition detection exceeded 1s");
    const auto& top = detected.membership[detected.levels() - 1];
    const double agreement = grag::test::adjusted_rand_index(top, labels);
    require(agreement >= 0.9,
            "planted-partition agreement " + std::to_string(agreement) + " below 0.9");
}

// ---------------------------------------------------------------------------

void graph_build_contract() {
    grag::kgraph::RawElements raw;
    raw.entities.push_back({"Kept", "t", "stays", 0.9, {"d0c0"}});
    raw.entities.push_back({"Dropped", "t", "goes", 0.6, {"d0c0"}});
    raw.relationships.push_back({"Kept", "Dropped", "kept-dropped", 1.0, {"d0c0"}});
    auto graph = grag::kgraph::build_graph(raw, 0.7);
    require(graph.entities.count("kept") == 1, "0.9-confidence entity missing");
    require(graph.entities.count("dropped") == 0, "0.6-confidence entity survived threshold 0.7");
    require(graph.relationships.empty(), "relationship to a dropped entity survived");

    std::mt19937_64 rng(555);
    const char* names[] = {"A", "b", "C", "d", "E", "a ", " B", "c"};
    for (int trial = 0; trial < 100; ++trial) {
        grag::kgraph::RawElements random_raw;
        const std::size_t entities = 6 + rng() % 8;
        for (std::size_t i = 0; i < entities; ++i) {
            random_raw.entities.push_back({names[rng() % 8], "t", "d",
                                           static_cast<double>(rng() % 101) / 100.0,
                                           {"d0c" + std::to_string(rng() % 3)}});
        }
        for (int i = 0; i < 5; ++i) {
            random_raw.relationships.push_back({names[rng() % 8], names[rng() % 8], "r", 1.0, {}});
        }
        for (int i = 0; i < 3; ++i) {
            random_raw.claims.push_back({names[rng() % 8], "s", {}});
        }
        const double low = 0.3, high = 0.8;
        auto graph_low = grag::kgraph::build_graph(random_raw, low);
        auto graph_high = grag::kgraph::build_graph(random_raw, high);
        for (const auto& [id, entity] : graph_high.entities) {
            require(graph_low.entities.count(id) == 1, "monotonicity violated for entity " + id);
        }
        require(graph_high.relationships.size() <= graph_low.relationships.size(),
                "relationships grew with the threshold");
        require(graph_high.claims.size() <= graph_low.claims.size(),
                "claims grew with the threshold");
        grag::kgraph::validate_graph(graph_low);
        grag::kgraph::validate_graph(graph_high);
    }
}

// ---------------------------------------------------------------------------

void end_to_end_determinism() {
    grag::test::TempDir dir("accept-e2e");
    auto cases = grag::test::make_testset(grag::corpus::TaskKind::noise, 100);
    grag::corpus::save_testset(dir / "noise.jsonl", cases);

    const auto base_calls = grag::llm::HttpBackend::network_calls();

    auto run_once = [&](const std::string& tag) {
        grag::config::RunConfig config;
        config.task = grag::corpus::TaskKind::noise;
        config.testset = (dir / "noise.jsonl").string();
        config.configs = {grag::prompts::ConfigKind::rgb_baseline,
                          grag::prompts::ConfigKind::gr_ext};
        config.ratios = {0.0, 0.2, 0.4};
        config.cache_dir = (dir / ("cache-" + tag)).string();
        config.write_artifacts = false;
        config.parallelism = 2;
        grag::driver::run(config, dir / ("run-" + tag));
    };

    const auto started = std::chrono::steady_clock::now();
    run_once("a");
    const double first_run = seconds_since(started);
    require(first_run < 10.0,
            "100-case mock run took " + std::to_string(first_run) + "s (limit 10s)");
    run_once("b");

    require(grag::llm::HttpBackend::network_calls() == base_calls,
            "mock run performed network calls");

    const auto records_a = grag::util::read_file(dir / "run-a" / "records.jsonl");
    const auto records_b = grag::util::read_file(dir / "run-b" / "records.jsonl");
    require(!records_a.empty(), "run produced no records");
    require(records_a == records_b, "records differ between identical runs");
    const auto metrics_a = grag::util::read_file(dir / "run-a" / "metrics.txt");
    const auto metrics_b = grag::util::read_file(dir / "run-b" / "metrics.txt");
    require(metrics_a == metrics_b, "metric tables differ between identical runs");
    require(grag::util::read_file(dir / "run-a" / "metrics.jsonl") ==
                grag::util::read_file(dir / "run-b" / "metrics.jsonl"),
            "machine metrics differ between identical runs");

    // 600 records: 100 cases x 2 configs x 3 ratios
    std::istringstream stream(records_a);
    std::string line;
    std::size_t count = 0;
    while (std::getline(stream, line)) {
        if (!line.empty()) {
            ++count;
        }
    }
    require(count == 600, "expected 600 records, got " + std::to_string(count));
}

// ---------------------------------------------------------------------------

void prompt_fidelity() {
    // Frozen transcriptions of the two printed prompt figures.
    const std::string fig2 =
        "You are an accurate and reliable AI assistant that can answer questions with the help of "
        "external documents. Please note that external documents may contain noisy or factually "
        "incorrect information. If the information in the document contains the correct answer, "
        "you will give an accurate answer. If the information in the document does not contain the "
        "answer, you will generate 'I cannot answer the question because of the insufficient "
        "information in documents.'. If there are inconsistencies with the facts in some of the "
        "documents, please generate the response 'There are factual errors in the provided "
        "documents.' and provide the correct answer.";
    const std::string fig3_lines[] = {
        "You are a helpful assistant tasked with answering questions based on the provided "
        "external documents. The documents may contain noisy or irrelevant information. Your goal "
        "is to extract the necessary information to answer the question accurately, ignoring any "
        "irrelevant or noisy content.",
        "Instructions:",
        "1. **Focus on Relevant Information**: Carefully analyze the documents and extract only "
        "the information that directly answers the question.",
        "2. **Ignore Noise**: If a document contains irrelevant or noisy information, ignore it "
        "and focus on the parts that are relevant to the question.",
        "3. **Provide a Clear Answer**: If the answer is found in the documents, provide it "
        "clearly and concisely.",
        "4. **Reject if Necessary**: If the documents do not contain sufficient information to "
        "answer the question, respond with:",
        "*\"I cannot answer the question due to insufficient information in the documents.",
    };

    const auto gr_rgb = grag::prompts::render_answer_prompt(
        {grag::prompts::ConfigKind::gr_rgb, grag::corpus::TaskKind::noise}, "CTX", "Q?");
    require(gr_rgb.system_text.find(fig2) != std::string::npos,
            "gr_rgb template does not contain the printed instruction block verbatim");
    require(gr_rgb.user_text.find("STRUCTURED CONTEXT: CTX") != std::string::npos,
            "gr_rgb user text misses the structured-context slot");

    const auto gr_ext = grag::prompts::render_answer_prompt(
        {grag::prompts::ConfigKind::gr_ext, grag::corpus::TaskKind::noise}, "CTX", "Q?");
    for (const auto& line : fig3_lines) {
        require(gr_ext.system_text.find(line) != std::string::npos,
                "gr_ext template misses the printed line: " + line);
    }
}

// ---------------------------------------------------------------------------

void cache_contract() {
    grag::test::TempDir dir("accept-cache");
    auto backend = std::make_shared<grag::llm::MockBackend>();
    grag::llm::GatewayOptions options;
    options.cache_dir = dir / "cache";

    grag::llm::ChatRequest request;
    request.model = "mock-model";
    request.system_text = "system";
    request.user_text = "QUESTION: cache?\n\nOUTPUT:";

    std::string first;
    {
        grag::llm::Gateway gateway(backend, options);
        first = gateway.cached_complete(request);
        for (int i = 0; i < 24; ++i) {
            require(gateway.cached_complete(request) == first, "cached response changed");
        }
        require(backend->calls() == 1,
                "backend hit " + std::to_string(backend->calls()) + " times, expected once");
    }
    {
        // survives restart: a fresh gateway over the same directory serves
        // from disk without touching the backend
        grag::llm::Gateway gateway(backend, options);
        require(gateway.cached_complete(request) == first, "cache lost across restart");
        require(backend->calls() == 1, "restart re-fetched a cached entry");

        // corruption degrades to a miss and a refetch
        const auto entry =
            (dir / "cache") / (grag::llm::request_digest(request) + ".json");
        grag::util::write_file(entry, "garbage{{{");
        require(gateway.cached_complete(request) == first, "refetch after corruption failed");
        require(backend->calls() == 2, "corrupted entry was not refetched");
        require(gateway.cached_complete(request) == first, "rewritten entry not served");
        require(backend->calls() == 2, "rewritten entry not cached");
    }
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion("noise-mixing exactness", noise_mixing_exactness);
    criterion("metric oracle equivalence", metric_oracle_equivalence);
    criterion("rejection/error-phrase detectors", phrase_detectors);
    criterion("leiden correctness", leiden_correctness);
    criterion("graph build threshold and monotonicity", graph_build_contract);
    criterion("end-to-end determinism", end_to_end_determinism);
    criterion("prompt fidelity", prompt_fidelity);
    criterion("cache contract", cache_contract);
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criteria FAILED\n", g_failures);
    }
    return g_failures;
}
