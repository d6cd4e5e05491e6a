#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace grag::text {

/// (start, end) character offsets of each whitespace-separated word.
struct WordSpan {
    std::size_t start;
    std::size_t end;
};

std::vector<WordSpan> word_spans(std::string_view s);

std::size_t word_count(std::string_view s);

/// Token-budget heuristic: round(words * 1.3). The pipeline only needs
/// budgets, not exact tokenizer counts.
std::size_t token_estimate(std::string_view s);

/// Longest word-boundary prefix whose token estimate fits `budget`.
std::string truncate_to_tokens(std::string_view s, std::size_t budget);

std::string to_lower_ascii(std::string_view s);

/// Trims and collapses interior whitespace runs to single spaces.
std::string normalize_whitespace(std::string_view s);

/// Lowercased, whitespace-normalized form used for matching and entity keys.
std::string normalize_for_match(std::string_view s);

/// True iff normalize_for_match(needle) occurs in normalize_for_match(haystack).
bool contains_normalized(std::string_view haystack, std::string_view needle);

}  // namespace grag::text
