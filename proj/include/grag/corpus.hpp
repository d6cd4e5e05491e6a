#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace grag::corpus {

enum class TaskKind {
    noise,
    integration,
    rejection,
    counterfactual,
};

std::string to_string(TaskKind task);
TaskKind task_from_string(const std::string& name);

/// One benchmark question with its gold answers and document pools.
/// gold_answers is a list of answer groups; each group lists acceptable
/// string variants. Integration cases have >= 2 groups, others exactly 1.
struct TestCase {
    std::string id;
    TaskKind task = TaskKind::noise;
    std::string question;
    std::vector<std::vector<std::string>> gold_answers;
    std::vector<std::string> positive_docs;
    std::vector<std::string> negative_docs;
    std::vector<std::string> counterfactual_docs;
};

enum class DocLabel {
    positive,
    negative,
    counterfactual,
};

std::string to_string(DocLabel label);

struct LabeledDoc {
    std::string text;
    DocLabel label = DocLabel::positive;
};

/// Noise-controlled document set for one trial. count(negative) is always
/// round-half-up(noise_ratio * docs.size()).
struct DocumentSet {
    std::vector<LabeledDoc> docs;
    double noise_ratio = 0.0;
    std::uint64_t seed = 0;
    bool negative_filled = false;  // positives were short; filled with negatives
    bool padded = false;           // counterfactual pool short; padded with positives

    std::size_t count_label(DocLabel label) const;
    /// Stable content digest; identical sets hash identically.
    std::string fingerprint() const;
};

/// round-half-up(ratio * n): the negative-slot count rule.
std::size_t negative_doc_count(double ratio, std::size_t n);

/// Loads the canonical line-delimited test-set file, validating every record.
/// Malformed lines raise Error::Kind::validation naming the line number.
std::vector<TestCase> load_testset(const std::filesystem::path& path, TaskKind task);

/// Canonical serialization; load_testset(save_testset(x)) == x.
void save_testset(const std::filesystem::path& path, const std::vector<TestCase>& cases);

struct MixOptions {
    bool shuffle = true;               // seeded placement shuffle; false = positives first
    bool allow_negative_fill = false;  // fill missing positive slots with negatives
};

/// Draws n documents: round-half-up(ratio*n) negatives, remainder positives.
/// Positive/negative selection order depends only on (case, seed), so raising
/// the ratio keeps earlier positives and adds negatives. Placement is a
/// seeded shuffle keyed by (case, ratio, n, seed).
DocumentSet mix_documents(const TestCase& test_case, double noise_ratio, std::size_t n,
                          std::uint64_t seed, const MixOptions& options = {});

/// Document set for the counterfactual task: counterfactual docs first (at
/// most n, stored order), padded with positive docs if the pool is short.
DocumentSet counterfactual_docset(const TestCase& test_case, std::size_t n);

struct IngestDiagnostic {
    std::size_t line = 0;
    std::string message;
};

struct IngestResult {
    std::vector<TestCase> cases;
    std::vector<IngestDiagnostic> diagnostics;
};

/// Converts an upstream RGB-release file (JSONL with query/answer/positive/
/// negative/positive_wrong fields) into canonical TestCases. Malformed lines
/// become diagnostics; valid lines are kept.
IngestResult ingest_upstream(const std::filesystem::path& path, TaskKind task);

}  // namespace grag::corpus
