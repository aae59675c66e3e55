#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaprag/gap_schema.hpp"

namespace gaprag {

enum class PhraseOrigin { target_slot, description, none };

struct SourcePhrase {
    std::size_t gap_index = 0;
    std::string phrase;
    PhraseOrigin origin = PhraseOrigin::none;
};

struct QueryString {
    std::string text;
    std::vector<SourcePhrase> source_phrases;
};

/// "target slot" with slot underscores mapped to spaces when both fields are
/// present; otherwise the trimmed description; absent when neither works.
std::optional<std::string> phrase_of(const GapItem& gap);

/// Appends up to the first `max_phrases` valid phrases, in judge order, to the
/// original question with single spaces. With zero valid phrases the query is
/// the question unchanged.
QueryString build_query(const std::string& question, const std::vector<GapItem>& gaps,
                        int max_phrases);

}  // namespace gaprag
