#include "gaprag/query_builder.hpp"

#include <stdexcept>

namespace gaprag {

std::optional<std::string> phrase_of(const GapItem& gap) {
    std::string target = trim(gap.target);
    std::string slot = trim(gap.slot);
    if (!target.empty() && !slot.empty()) {
        for (auto& c : slot)
            if (c == '_') c = ' ';
        return target + " " + slot;
    }
    std::string desc = trim(gap.description);
    if (!desc.empty()) return desc;
    return std::nullopt;
}

QueryString build_query(const std::string& question, const std::vector<GapItem>& gaps,
                        int max_phrases) {
    if (max_phrases < 1) throw std::invalid_argument("max_phrases must be >= 1");
    QueryString out;
    out.text = question;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (out.source_phrases.size() == static_cast<std::size_t>(max_phrases)) break;
        auto phrase = phrase_of(gaps[i]);
        if (!phrase) continue;
        PhraseOrigin origin = (!trim(gaps[i].target).empty() && !trim(gaps[i].slot).empty())
                                  ? PhraseOrigin::target_slot
                                  : PhraseOrigin::description;
        out.text += " " + *phrase;
        out.source_phrases.push_back({i, *phrase, origin});
    }
    return out;
}

}  // namespace gaprag
