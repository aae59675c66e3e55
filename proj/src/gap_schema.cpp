#include "gaprag/gap_schema.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"

namespace gaprag {

const char* category_surface(GapCategory c) {
    switch (c) {
        case GapCategory::bridge_entity: return "bridge entity";
        case GapCategory::attribute: return "attribute";
        case GapCategory::relation: return "relation";
        case GapCategory::evidence_span: return "evidence span";
        case GapCategory::other: return "other";
    }
    return "other";
}

GapCategory normalize_category(const std::string& raw, bool* known) {
    std::string folded;
    for (unsigned char c : raw) {
        if (c == '_' || std::isspace(c)) {
            if (!folded.empty() && folded.back() != ' ') folded.push_back(' ');
        } else {
            folded.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    while (!folded.empty() && folded.back() == ' ') folded.pop_back();

    if (known) *known = true;
    if (folded == "bridge entity") return GapCategory::bridge_entity;
    if (folded == "attribute") return GapCategory::attribute;
    if (folded == "relation") return GapCategory::relation;
    if (folded == "evidence span") return GapCategory::evidence_span;
    if (folded == "other") return GapCategory::other;
    if (known) *known = false;
    return GapCategory::other;
}

std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

bool GapItem::usable() const {
    bool pair_ok = !trim(target).empty() && !trim(slot).empty();
    return pair_ok || !trim(description).empty();
}

GapItemValidation validate_gap_item(const std::string& category, const std::string& target,
                                    const std::string& slot,
                                    const std::string& description) {
    GapItemValidation v;
    bool known = false;
    v.item.category = normalize_category(category, &known);
    if (!known)
        v.violations.push_back("unknown category '" + category + "' mapped to other");
    v.item.target = target;
    v.item.slot = slot;
    v.item.description = description;
    if (!v.item.usable()) {
        v.unusable = true;
        v.violations.push_back("gap item has neither a target+slot pair nor a description");
    }
    return v;
}

std::optional<std::string> extract_first_json_object(const std::string& raw) {
    for (std::size_t start = 0; start < raw.size(); ++start) {
        if (raw[start] != '{') continue;
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < raw.size(); ++i) {
            char c = raw[i];
            if (in_string) {
                if (escaped)
                    escaped = false;
                else if (c == '\\')
                    escaped = true;
                else if (c == '"')
                    in_string = false;
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) return raw.substr(start, i + 1 - start);
            }
        }
        // Unbalanced from this brace; a later top-level '{' cannot close either.
        break;
    }
    return std::nullopt;
}

VerdictResult parse_verdict(const std::string& raw) {
    std::size_t search_from = 0;
    nlohmann::json obj;
    bool found = false;
    while (search_from < raw.size()) {
        auto brace = raw.find('{', search_from);
        if (brace == std::string::npos) break;
        auto candidate = extract_first_json_object(raw.substr(brace));
        if (!candidate) break;
        obj = nlohmann::json::parse(*candidate, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
            search_from = brace + 1;
            continue;
        }
        found = true;
        break;
    }
    if (!found) return ParseError{ParseErrorCode::NoObject, "no JSON object found"};

    if (!obj.contains("sufficient"))
        return ParseError{ParseErrorCode::MissingKey, "missing key: sufficient"};
    if (!obj["sufficient"].is_boolean())
        return ParseError{ParseErrorCode::BadType, "sufficient is not a boolean"};
    bool sufficient = obj["sufficient"].get<bool>();

    const nlohmann::json* gaps_node = nullptr;
    if (obj.contains("gap items"))
        gaps_node = &obj["gap items"];
    else if (obj.contains("gap_items"))
        gaps_node = &obj["gap_items"];
    if (!gaps_node)
        return ParseError{ParseErrorCode::MissingKey, "missing key: gap items"};
    if (!gaps_node->is_array())
        return ParseError{ParseErrorCode::BadType, "gap items is not a list"};

    std::vector<std::string> warnings;
    std::vector<GapItem> items;
    for (const auto& node : *gaps_node) {
        if (!node.is_object()) {
            warnings.push_back("non-object gap item dropped");
            continue;
        }
        auto str_field = [&node](const char* key) -> std::string {
            if (node.contains(key) && node[key].is_string())
                return node[key].get<std::string>();
            return "";
        };
        auto v = validate_gap_item(str_field("category"), str_field("target"),
                                   str_field("slot"), str_field("description"));
        for (auto& w : v.violations) warnings.push_back(w);
        items.push_back(std::move(v.item));
    }

    if (sufficient && !gaps_node->empty())
        return ParseError{ParseErrorCode::ConstraintViolation,
                          "sufficient=true with non-empty gap items"};

    ParsedVerdict out{sufficient ? JudgeVerdict::sufficient_verdict()
                                 : JudgeVerdict::insufficient(std::move(items)),
                      std::move(warnings)};
    return out;
}

std::string serialize_verdict(const JudgeVerdict& verdict) {
    nlohmann::json j;
    j["sufficient"] = verdict.sufficient();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& item : verdict.gap_items()) {
        arr.push_back({{"category", category_surface(item.category)},
                       {"target", item.target},
                       {"slot", item.slot},
                       {"description", item.description}});
    }
    j["gap items"] = std::move(arr);
    return j.dump();
}

}  // namespace gaprag
