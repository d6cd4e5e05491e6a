#include "grag/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "grag/text.hpp"
#include "grag/util.hpp"

namespace grag::corpus {

using nlohmann::ordered_json;

std::string to_string(TaskKind task) {
    switch (task) {
        case TaskKind::noise: return "noise";
        case TaskKind::integration: return "integration";
        case TaskKind::rejection: return "rejection";
        case TaskKind::counterfactual: return "counterfactual";
    }
    return "noise";
}

TaskKind task_from_string(const std::string& name) {
    if (name == "noise") return TaskKind::noise;
    if (name == "integration") return TaskKind::integration;
    if (name == "rejection") return TaskKind::rejection;
    if (name == "counterfactual") return TaskKind::counterfactual;
    throw Error(Error::Kind::invalid_argument, "unknown task kind: " + name);
}

std::string to_string(DocLabel label) {
    switch (label) {
        case DocLabel::positive: return "positive";
        case DocLabel::negative: return "negative";
        case DocLabel::counterfactual: return "counterfactual";
    }
    return "positive";
}

std::size_t DocumentSet::count_label(DocLabel label) const {
    return static_cast<std::size_t>(
        std::count_if(docs.begin(), docs.end(), [&](const LabeledDoc& d) { return d.label == label; }));
}

std::string DocumentSet::fingerprint() const {
    std::ostringstream buf;
    buf << "ratio=" << noise_ratio << ";seed=" << seed << ";";
    for (const auto& doc : docs) {
        buf << to_string(doc.label) << ':' << doc.text.size() << ':' << doc.text << '\n';
    }
    return util::sha256_hex(buf.str());
}

std::size_t negative_doc_count(double ratio, std::size_t n) {
    // round-half-up; the paper's ratios with n=5 are all integral products.
    return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 0.5));
}

namespace {

std::string validate_case(const TestCase& test_case) {
    if (test_case.id.empty()) {
        return "missing or empty `id`";
    }
    if (test_case.question.empty()) {
        return "missing or empty `question`";
    }
    if (test_case.gold_answers.empty()) {
        return "empty `answers`";
    }
    for (const auto& group : test_case.gold_answers) {
        if (group.empty()) {
            return "empty answer group";
        }
        for (const auto& variant : group) {
            if (text::normalize_whitespace(variant).empty()) {
                return "empty answer variant";
            }
        }
    }
    if (test_case.task == TaskKind::integration && test_case.gold_answers.size() < 2) {
        return "integration case needs >= 2 answer groups";
    }
    if (test_case.task != TaskKind::integration && test_case.gold_answers.size() != 1) {
        return "non-integration case must have exactly 1 answer group";
    }
    if (test_case.task == TaskKind::counterfactual && test_case.counterfactual_docs.empty()) {
        return "counterfactual case has no counterfactual documents";
    }
    if (test_case.task == TaskKind::rejection && test_case.negative_docs.empty()) {
        return "rejection case has no negative documents";
    }
    return "";
}

std::vector<std::string> string_list(const ordered_json& value) {
    std::vector<std::string> out;
    if (value.is_null()) {
        return out;
    }
    if (!value.is_array()) {
        throw Error(Error::Kind::parse, "expected an array of strings");
    }
    for (const auto& item : value) {
        if (item.is_string()) {
            out.push_back(item.get<std::string>());
        } else if (item.is_array()) {
            for (const auto& nested : item) {
                if (!nested.is_string()) {
                    throw Error(Error::Kind::parse, "expected string in nested list");
                }
                out.push_back(nested.get<std::string>());
            }
        } else {
            throw Error(Error::Kind::parse, "expected string or list of strings");
        }
    }
    return out;
}

std::vector<std::vector<std::string>> answer_groups(const ordered_json& value) {
    std::vector<std::vector<std::string>> groups;
    if (!value.is_array()) {
        throw Error(Error::Kind::parse, "`answers` must be a list of answer groups");
    }
    for (const auto& group : value) {
        if (!group.is_array()) {
            throw Error(Error::Kind::parse, "answer group must be a list of variants");
        }
        std::vector<std::string> variants;
        for (const auto& variant : group) {
            if (!variant.is_string()) {
                throw Error(Error::Kind::parse, "answer variant must be a string");
            }
            variants.push_back(variant.get<std::string>());
        }
        groups.push_back(std::move(variants));
    }
    return groups;
}

TestCase parse_canonical_record(const ordered_json& record, TaskKind expected_task) {
    for (const char* field : {"id", "task", "question", "answers"}) {
        if (!record.contains(field)) {
            throw Error(Error::Kind::parse, std::string("missing field `") + field + "`");
        }
    }
    TestCase test_case;
    if (record.at("id").is_string()) {
        test_case.id = record.at("id").get<std::string>();
    } else if (record.at("id").is_number_integer()) {
        test_case.id = std::to_string(record.at("id").get<long long>());
    } else {
        throw Error(Error::Kind::parse, "`id` must be a string or integer");
    }
    if (!record.at("task").is_string()) {
        throw Error(Error::Kind::parse, "`task` must be a string");
    }
    test_case.task = task_from_string(record.at("task").get<std::string>());
    if (test_case.task != expected_task) {
        throw Error(Error::Kind::parse, "task mismatch: record is `" + to_string(test_case.task) +
                                            "`, expected `" + to_string(expected_task) + "`");
    }
    if (!record.at("question").is_string()) {
        throw Error(Error::Kind::parse, "`question` must be a string");
    }
    test_case.question = record.at("question").get<std::string>();
    test_case.gold_answers = answer_groups(record.at("answers"));
    test_case.positive_docs = string_list(record.value("positive", ordered_json::array()));
    test_case.negative_docs = string_list(record.value("negative", ordered_json::array()));
    test_case.counterfactual_docs = string_list(record.value("counterfactual", ordered_json::array()));
    return test_case;
}

}  // namespace

std::vector<TestCase> load_testset(const std::filesystem::path& path, TaskKind task) {
    auto lines = util::read_lines(path);
    std::vector<TestCase> cases;
    std::vector<std::string> problems;
    std::unordered_set<std::string> seen_ids;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (text::normalize_whitespace(line).empty()) {
            continue;
        }
        const std::size_t line_no = i + 1;
        try {
            auto record = ordered_json::parse(line);
            auto test_case = parse_canonical_record(record, task);
            if (auto message = validate_case(test_case); !message.empty()) {
                throw Error(Error::Kind::validation, message);
            }
            if (!seen_ids.insert(test_case.id).second) {
                throw Error(Error::Kind::validation, "duplicate id `" + test_case.id + "`");
            }
            cases.push_back(std::move(test_case));
        } catch (const nlohmann::json::exception& e) {
            problems.push_back("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        } catch (const Error& e) {
            problems.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (problems.size() >= 20) {
            problems.push_back("(stopping after 20 problems)");
            break;
        }
    }
    if (!problems.empty()) {
        std::string message = "test set " + path.string() + " failed validation:";
        for (const auto& p : problems) {
            message += "\n  " + p;
        }
        throw Error(Error::Kind::validation, message);
    }
    return cases;
}

void save_testset(const std::filesystem::path& path, const std::vector<TestCase>& cases) {
    std::string out;
    for (const auto& test_case : cases) {
        ordered_json record;
        record["id"] = test_case.id;
        record["task"] = to_string(test_case.task);
        record["question"] = test_case.question;
        record["answers"] = test_case.gold_answers;
        record["positive"] = test_case.positive_docs;
        record["negative"] = test_case.negative_docs;
        record["counterfactual"] = test_case.counterfactual_docs;
        out += record.dump();
        out += '\n';
    }
    util::write_file(path, out);
}

DocumentSet mix_documents(const TestCase& test_case, double noise_ratio, std::size_t n,
                          std::uint64_t seed, const MixOptions& options) {
    if (n < 1) {
        throw Error(Error::Kind::invalid_argument, "document count must be >= 1");
    }
    if (noise_ratio < 0.0 || noise_ratio > 1.0) {
        throw Error(Error::Kind::invalid_argument, "noise ratio must be in [0, 1]");
    }
    std::size_t negatives = negative_doc_count(noise_ratio, n);
    std::size_t positives = n - negatives;

    bool negative_filled = false;
    if (test_case.positive_docs.size() < positives) {
        if (!options.allow_negative_fill) {
            throw Error(Error::Kind::invalid_argument,
                        "case `" + test_case.id + "`: needs " + std::to_string(positives) +
                            " positive docs, has " + std::to_string(test_case.positive_docs.size()));
        }
        negatives += positives - test_case.positive_docs.size();
        positives = test_case.positive_docs.size();
        negative_filled = true;
    }
    if (test_case.negative_docs.size() < negatives) {
        throw Error(Error::Kind::invalid_argument,
                    "case `" + test_case.id + "`: needs " + std::to_string(negatives) +
                        " negative docs, has " + std::to_string(test_case.negative_docs.size()));
    }

    // Pool orders depend only on (case, seed): positives stay fixed per case
    // while the ratio only changes how many negatives join them.
    util::Rng selection(util::derive_seed(seed, {test_case.id, "selection"}));
    std::vector<std::size_t> pos_order(test_case.positive_docs.size());
    std::iota(pos_order.begin(), pos_order.end(), 0);
    selection.shuffle(pos_order);
    std::vector<std::size_t> neg_order(test_case.negative_docs.size());
    std::iota(neg_order.begin(), neg_order.end(), 0);
    selection.shuffle(neg_order);

    DocumentSet set;
    set.noise_ratio = noise_ratio;
    set.seed = seed;
    set.negative_filled = negative_filled;
    set.docs.reserve(positives + negatives);
    for (std::size_t i = 0; i < positives; ++i) {
        set.docs.push_back({test_case.positive_docs[pos_order[i]], DocLabel::positive});
    }
    for (std::size_t i = 0; i < negatives; ++i) {
        set.docs.push_back({test_case.negative_docs[neg_order[i]], DocLabel::negative});
    }

    if (options.shuffle) {
        util::Rng placement(util::derive_seed(
            seed, {test_case.id, "placement", std::to_string(noise_ratio), std::to_string(n)}));
        placement.shuffle(set.docs);
    }
    return set;
}

DocumentSet counterfactual_docset(const TestCase& test_case, std::size_t n) {
    if (test_case.counterfactual_docs.empty()) {
        throw Error(Error::Kind::invalid_argument,
                    "case `" + test_case.id + "` has no counterfactual documents");
    }
    DocumentSet set;
    set.noise_ratio = 0.0;
    set.seed = 0;
    std::size_t take = std::min(n, test_case.counterfactual_docs.size());
    for (std::size_t i = 0; i < take; ++i) {
        set.docs.push_back({test_case.counterfactual_docs[i], DocLabel::counterfactual});
    }
    for (std::size_t i = 0; set.docs.size() < n && i < test_case.positive_docs.size(); ++i) {
        set.docs.push_back({test_case.positive_docs[i], DocLabel::positive});
        set.padded = true;
    }
    return set;
}

IngestResult ingest_upstream(const std::filesystem::path& path, TaskKind task) {
    auto lines = util::read_lines(path);
    IngestResult result;
    std::unordered_set<std::string> seen_ids;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (text::normalize_whitespace(line).empty()) {
            continue;
        }
        const std::size_t line_no = i + 1;
        try {
            auto record = ordered_json::parse(line);
            TestCase test_case;
            test_case.task = task;
            if (record.contains("id")) {
                test_case.id = record.at("id").is_string()
                                   ? record.at("id").get<std::string>()
                                   : std::to_string(record.at("id").get<long long>());
            } else {
                test_case.id = to_string(task) + "-" + std::to_string(line_no);
            }
            if (record.contains("query")) {
                test_case.question = record.at("query").get<std::string>();
            } else if (record.contains("question")) {
                test_case.question = record.at("question").get<std::string>();
            }

            const auto& answer = record.contains("answer") ? record.at("answer")
                                                           : record.value("answers", ordered_json());
            if (answer.is_string()) {
                test_case.gold_answers = {{answer.get<std::string>()}};
            } else if (answer.is_array()) {
                bool nested = std::any_of(answer.begin(), answer.end(),
                                          [](const ordered_json& a) { return a.is_array(); });
                if (nested) {
                    for (const auto& group : answer) {
                        if (group.is_array()) {
                            std::vector<std::string> variants;
                            for (const auto& v : group) {
                                variants.push_back(v.get<std::string>());
                            }
                            test_case.gold_answers.push_back(std::move(variants));
                        } else {
                            test_case.gold_answers.push_back({group.get<std::string>()});
                        }
                    }
                } else if (task == TaskKind::integration) {
                    // Integration answers list one part per sub-question.
                    for (const auto& part : answer) {
                        test_case.gold_answers.push_back({part.get<std::string>()});
                    }
                } else {
                    std::vector<std::string> variants;
                    for (const auto& v : answer) {
                        variants.push_back(v.get<std::string>());
                    }
                    test_case.gold_answers.push_back(std::move(variants));
                }
            }

            test_case.positive_docs = string_list(record.value("positive", ordered_json::array()));
            test_case.negative_docs = string_list(record.value("negative", ordered_json::array()));
            if (record.contains("positive_wrong")) {
                test_case.counterfactual_docs = string_list(record.at("positive_wrong"));
            } else {
                test_case.counterfactual_docs =
                    string_list(record.value("counterfactual", ordered_json::array()));
            }

            if (auto message = validate_case(test_case); !message.empty()) {
                result.diagnostics.push_back({line_no, message});
                continue;
            }
            if (!seen_ids.insert(test_case.id).second) {
                result.diagnostics.push_back({line_no, "duplicate id `" + test_case.id + "`"});
                continue;
            }
            result.cases.push_back(std::move(test_case));
        } catch (const nlohmann::json::exception& e) {
            result.diagnostics.push_back({line_no, std::string("invalid JSON: ") + e.what()});
        } catch (const Error& e) {
            result.diagnostics.push_back({line_no, e.what()});
        }
    }
    return result;
}

}  // namespace grag::corpus
