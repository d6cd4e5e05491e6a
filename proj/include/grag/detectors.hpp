#pragma once

#include <string>
#include <vector>

namespace grag::eval {

/// True iff every answer group has at least one variant occurring in the
/// response under case-insensitive, whitespace-normalized substring match.
bool match_answer(const std::string& response,
                  const std::vector<std::vector<std::string>>& gold_answers);

/// True iff the normalized response contains a canonical refusal phrase or
/// one of the extra configured markers.
bool is_rejection(const std::string& response,
                  const std::vector<std::string>& extra_markers = {});

/// True iff the normalized response contains the factual-error marker phrase.
bool detects_error(const std::string& response);

}  // namespace grag::eval
