#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grag/detectors.hpp"
#include "grag/pipeline.hpp"

namespace grag::eval {

/// Aggregate scores for one (task, config, noise ratio) group. Percentages
/// are in [0, 100]; cr is defined only when at least one error was detected,
/// acc for the counterfactual task only when no-document probes ran.
struct EvalMetrics {
    corpus::TaskKind task = corpus::TaskKind::noise;
    prompts::ConfigKind config = prompts::ConfigKind::rgb_baseline;
    double noise_ratio = 0.0;

    std::size_t n = 0;         // scored document-trial records
    std::size_t failures = 0;  // backend_failed records, excluded from scores
    std::size_t matched = 0;
    std::size_t rejected = 0;
    std::size_t detected = 0;
    std::size_t corrected = 0;  // detected records whose answer also matched
    std::size_t probe_n = 0;
    std::size_t probe_matched = 0;

    std::optional<double> acc;             // noise/integration; counterfactual probe
    std::optional<double> acc_doc;         // counterfactual docs
    std::optional<double> rejection_rate;  // rejection task
    std::optional<double> ed;              // counterfactual error detection
    std::optional<double> cr;              // correction rate among detections
};

struct EvalOptions {
    std::vector<std::string> extra_rejection_markers;
    bool exact_match = false;  // escape hatch: whole-response equality instead
                               // of substring matching
};

/// Scores one homogeneous group of records (same task, config, ratio).
/// backend_failed records are excluded from every denominator.
EvalMetrics compute_group_metrics(const std::vector<pipeline::AnswerRecord>& records,
                                  corpus::TaskKind task, const EvalOptions& options = {});

/// Groups records by (config, ratio) — by config alone for the rejection and
/// counterfactual tasks — and scores each group. Output is sorted by config
/// then ratio.
std::vector<EvalMetrics> compute_metrics(const std::vector<pipeline::AnswerRecord>& records,
                                         corpus::TaskKind task, const EvalOptions& options = {});

enum class ReportFormat {
    table,     // monospace table mirroring the benchmark layouts
    machine,   // line-delimited metric records
    plotdata,  // (ratio, accuracy) series per configuration
};

ReportFormat report_format_from_string(const std::string& name);

std::string emit_table(const std::vector<EvalMetrics>& metrics, corpus::TaskKind task);
std::string emit_machine(const std::vector<EvalMetrics>& metrics);
std::vector<EvalMetrics> load_machine(const std::string& text);

/// One (filename, two-column content) series per configuration.
std::vector<std::pair<std::string, std::string>> emit_plotdata(
    const std::vector<EvalMetrics>& metrics);

}  // namespace grag::eval
