#include "grag/detectors.hpp"

#include "grag/prompts.hpp"
#include "grag/text.hpp"

namespace grag::eval {

bool match_answer(const std::string& response,
                  const std::vector<std::vector<std::string>>& gold_answers) {
    const std::string normalized = text::normalize_for_match(response);
    for (const auto& group : gold_answers) {
        bool group_hit = false;
        for (const auto& variant : group) {
            if (normalized.find(text::normalize_for_match(variant)) != std::string::npos) {
                group_hit = true;
                break;
            }
        }
        if (!group_hit) {
            return false;
        }
    }
    return true;
}

bool is_rejection(const std::string& response, const std::vector<std::string>& extra_markers) {
    const std::string normalized = text::normalize_for_match(response);
    for (const auto& marker : prompts::rejection_markers()) {
        if (normalized.find(text::normalize_for_match(marker)) != std::string::npos) {
            return true;
        }
    }
    for (const auto& marker : extra_markers) {
        if (!marker.empty() &&
            normalized.find(text::normalize_for_match(marker)) != std::string::npos) {
            return true;
        }
    }
    return false;
}

bool detects_error(const std::string& response) {
    return text::contains_normalized(response, prompts::error_marker());
}

}  // namespace grag::eval
