#include "grag/text.hpp"

#include <cctype>
#include <cmath>

namespace grag::text {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::vector<WordSpan> word_spans(std::string_view s) {
    std::vector<WordSpan> spans;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) {
            ++i;
        }
        if (i >= s.size()) {
            break;
        }
        std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) {
            ++i;
        }
        spans.push_back({start, i});
    }
    return spans;
}

std::size_t word_count(std::string_view s) {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : s) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

std::size_t token_estimate(std::string_view s) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(word_count(s)) * 1.3));
}

std::string truncate_to_tokens(std::string_view s, std::size_t budget) {
    if (token_estimate(s) <= budget) {
        return std::string(s);
    }
    // Largest w with round(1.3*w) <= budget.
    auto max_words = static_cast<std::size_t>((static_cast<double>(budget) + 0.499) / 1.3);
    auto spans = word_spans(s);
    if (max_words == 0 || spans.empty()) {
        return "";
    }
    if (max_words > spans.size()) {
        max_words = spans.size();
    }
    return std::string(s.substr(spans.front().start, spans[max_words - 1].end - spans.front().start));
}

std::string to_lower_ascii(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    bool seen_word = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = seen_word;
        } else {
            if (pending_space) {
                out.push_back(' ');
                pending_space = false;
            }
            out.push_back(c);
            seen_word = true;
        }
    }
    return out;
}

std::string normalize_for_match(std::string_view s) {
    return to_lower_ascii(normalize_whitespace(s));
}

bool contains_normalized(std::string_view haystack, std::string_view needle) {
    return normalize_for_match(haystack).find(normalize_for_match(needle)) != std::string::npos;
}

}  // namespace grag::text
