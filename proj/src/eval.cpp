#include "grag/eval.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "grag/text.hpp"
#include "grag/util.hpp"

namespace grag::eval {

using nlohmann::ordered_json;

namespace {

double pct(std::size_t part, std::size_t whole) {
    return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

bool matches(const pipeline::AnswerRecord& record, const EvalOptions& options) {
    if (!options.exact_match) {
        return match_answer(record.response, record.gold_answers);
    }
    const std::string normalized = text::normalize_for_match(record.response);
    for (const auto& group : record.gold_answers) {
        bool hit = false;
        for (const auto& variant : group) {
            if (normalized == text::normalize_for_match(variant)) {
                hit = true;
                break;
            }
        }
        if (!hit) {
            return false;
        }
    }
    return true;
}

}  // namespace

EvalMetrics compute_group_metrics(const std::vector<pipeline::AnswerRecord>& records,
                                  corpus::TaskKind task, const EvalOptions& options) {
    if (records.empty()) {
        throw Error(Error::Kind::invalid_argument, "cannot score an empty record set");
    }
    EvalMetrics metrics;
    metrics.task = task;
    metrics.config = records.front().config;
    metrics.noise_ratio = records.front().noise_ratio;

    for (const auto& record : records) {
        if (record.config != metrics.config || record.noise_ratio != metrics.noise_ratio ||
            record.task != task) {
            throw Error(Error::Kind::invalid_argument,
                        "record group is not homogeneous in (task, config, ratio)");
        }
        if (record.classification == pipeline::Classification::backend_failed) {
            ++metrics.failures;
            continue;
        }
        if (record.mode == pipeline::TrialMode::no_doc_probe) {
            ++metrics.probe_n;
            if (matches(record, options)) {
                ++metrics.probe_matched;
            }
            continue;
        }
        ++metrics.n;
        const bool matched = matches(record, options);
        const bool rejected = is_rejection(record.response, options.extra_rejection_markers);
        const bool detected = detects_error(record.response);
        if (matched) {
            ++metrics.matched;
        }
        if (rejected) {
            ++metrics.rejected;
        }
        if (detected) {
            ++metrics.detected;
            if (matched) {
                ++metrics.corrected;
            }
        }
    }
    // A group where every trial failed still yields a row: n = 0 with the
    // failure count, and no percentages.
    switch (task) {
        case corpus::TaskKind::noise:
        case corpus::TaskKind::integration:
            if (metrics.n > 0) {
                metrics.acc = pct(metrics.matched, metrics.n);
            }
            break;
        case corpus::TaskKind::rejection:
            if (metrics.n > 0) {
                metrics.rejection_rate = pct(metrics.rejected, metrics.n);
            }
            break;
        case corpus::TaskKind::counterfactual:
            if (metrics.probe_n > 0) {
                metrics.acc = pct(metrics.probe_matched, metrics.probe_n);
            }
            if (metrics.n > 0) {
                metrics.acc_doc = pct(metrics.matched, metrics.n);
                metrics.ed = pct(metrics.detected, metrics.n);
                if (metrics.detected > 0) {
                    metrics.cr = pct(metrics.corrected, metrics.detected);
                }
            }
            break;
    }
    return metrics;
}

std::vector<EvalMetrics> compute_metrics(const std::vector<pipeline::AnswerRecord>& records,
                                         corpus::TaskKind task, const EvalOptions& options) {
    std::map<std::pair<int, double>, std::vector<pipeline::AnswerRecord>> groups;
    for (const auto& record : records) {
        groups[{static_cast<int>(record.config), record.noise_ratio}].push_back(record);
    }
    std::vector<EvalMetrics> out;
    out.reserve(groups.size());
    for (const auto& [key, group] : groups) {
        out.push_back(compute_group_metrics(group, task, options));
    }
    return out;
}

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "table") return ReportFormat::table;
    if (name == "machine") return ReportFormat::machine;
    if (name == "plotdata") return ReportFormat::plotdata;
    throw Error(Error::Kind::invalid_argument, "unknown report format: " + name);
}

namespace {

std::string cell(const std::optional<double>& value) {
    return value ? util::format_fixed2(*value) : "N/A";
}

void pad(std::string& line, const std::string& value, std::size_t width) {
    if (value.size() < width) {
        line.append(width - value.size(), ' ');
    }
    line += value;
}

}  // namespace

std::string emit_table(const std::vector<EvalMetrics>& metrics, corpus::TaskKind task) {
    std::ostringstream out;
    out << "task: " << corpus::to_string(task) << "\n";
    if (task == corpus::TaskKind::noise || task == corpus::TaskKind::integration) {
        std::set<double> ratio_set;
        std::vector<prompts::ConfigKind> configs;
        for (const auto& m : metrics) {
            ratio_set.insert(m.noise_ratio);
            if (std::find(configs.begin(), configs.end(), m.config) == configs.end()) {
                configs.push_back(m.config);
            }
        }
        std::string header = "config    ";
        for (double ratio : ratio_set) {
            pad(header, util::format_fixed2(ratio), 9);
        }
        out << header << "\n";
        for (const auto config : configs) {
            std::string line = prompts::to_string(config);
            line.resize(10, ' ');
            for (double ratio : ratio_set) {
                std::string value = "N/A";
                for (const auto& m : metrics) {
                    if (m.config == config && m.noise_ratio == ratio) {
                        value = cell(m.acc);
                    }
                }
                pad(line, value, 9);
            }
            out << line << "\n";
        }
    } else if (task == corpus::TaskKind::rejection) {
        out << "config    rejection rate        n\n";
        for (const auto& m : metrics) {
            std::string line = prompts::to_string(m.config);
            line.resize(10, ' ');
            pad(line, cell(m.rejection_rate), 14);
            pad(line, std::to_string(m.n), 9);
            out << line << "\n";
        }
    } else {
        out << "config          ACC    ACC_doc        ED*         CR\n";
        for (const auto& m : metrics) {
            std::string line = prompts::to_string(m.config);
            line.resize(10, ' ');
            pad(line, cell(m.acc), 9);
            pad(line, cell(m.acc_doc), 11);
            pad(line, cell(m.ed), 11);
            pad(line, cell(m.cr), 11);
            out << line << "\n";
        }
    }
    std::size_t scored = 0;
    std::size_t failures = 0;
    for (const auto& m : metrics) {
        scored += m.n + m.probe_n;
        failures += m.failures;
    }
    out << "records: " << scored << " scored, " << failures << " failed\n";
    return out.str();
}

std::string emit_machine(const std::vector<EvalMetrics>& metrics) {
    std::string out;
    for (const auto& m : metrics) {
        ordered_json record;
        record["task"] = corpus::to_string(m.task);
        record["config"] = prompts::to_string(m.config);
        record["noise_ratio"] = m.noise_ratio;
        record["n"] = m.n;
        record["failures"] = m.failures;
        record["matched"] = m.matched;
        record["rejected"] = m.rejected;
        record["detected"] = m.detected;
        record["corrected"] = m.corrected;
        record["probe_n"] = m.probe_n;
        record["probe_matched"] = m.probe_matched;
        auto opt = [](const std::optional<double>& v) {
            return v ? ordered_json(*v) : ordered_json(nullptr);
        };
        record["acc"] = opt(m.acc);
        record["acc_doc"] = opt(m.acc_doc);
        record["rejection_rate"] = opt(m.rejection_rate);
        record["ed"] = opt(m.ed);
        record["cr"] = opt(m.cr);
        out += record.dump();
        out += '\n';
    }
    return out;
}

std::vector<EvalMetrics> load_machine(const std::string& text) {
    std::vector<EvalMetrics> out;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        if (text::normalize_whitespace(line).empty()) {
            continue;
        }
        auto record = ordered_json::parse(line);
        EvalMetrics m;
        m.task = corpus::task_from_string(record.at("task").get<std::string>());
        m.config = prompts::config_from_string(record.at("config").get<std::string>());
        m.noise_ratio = record.at("noise_ratio").get<double>();
        m.n = record.at("n").get<std::size_t>();
        m.failures = record.at("failures").get<std::size_t>();
        m.matched = record.at("matched").get<std::size_t>();
        m.rejected = record.at("rejected").get<std::size_t>();
        m.detected = record.at("detected").get<std::size_t>();
        m.corrected = record.at("corrected").get<std::size_t>();
        m.probe_n = record.at("probe_n").get<std::size_t>();
        m.probe_matched = record.at("probe_matched").get<std::size_t>();
        auto opt = [&](const char* key) -> std::optional<double> {
            if (!record.contains(key) || record.at(key).is_null()) {
                return std::nullopt;
            }
            return record.at(key).get<double>();
        };
        m.acc = opt("acc");
        m.acc_doc = opt("acc_doc");
        m.rejection_rate = opt("rejection_rate");
        m.ed = opt("ed");
        m.cr = opt("cr");
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> emit_plotdata(
    const std::vector<EvalMetrics>& metrics) {
    std::map<std::string, std::string> series;
    for (const auto& m : metrics) {
        std::optional<double> value;
        switch (m.task) {
            case corpus::TaskKind::noise:
            case corpus::TaskKind::integration:
                value = m.acc;
                break;
            case corpus::TaskKind::rejection:
                value = m.rejection_rate;
                break;
            case corpus::TaskKind::counterfactual:
                value = m.acc_doc;
                break;
        }
        if (!value) {
            continue;
        }
        series[prompts::to_string(m.config)] +=
            util::format_fixed2(m.noise_ratio) + "\t" + util::format_fixed2(*value) + "\n";
    }
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(series.size());
    for (auto& [config, content] : series) {
        out.emplace_back(config + ".dat", std::move(content));
    }
    return out;
}

}  // namespace grag::eval
