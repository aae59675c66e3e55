#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gaprag {

enum class GapCategory { bridge_entity, attribute, relation, evidence_span, other };

/// Surface form used in prompts and serialized output ("bridge entity", "evidence span").
const char* category_surface(GapCategory c);

/// Folds case and space/underscore variants into the enum. Unknown strings map
/// to GapCategory::other; `known` (when given) reports whether the input was
/// recognized.
GapCategory normalize_category(const std::string& raw, bool* known = nullptr);

struct GapItem {
    GapCategory category = GapCategory::other;
    std::string target;
    std::string slot;
    std::string description;

    /// A gap item is usable for query construction when either the
    /// target+slot pair or the description is non-empty after trimming.
    bool usable() const;

    bool operator==(const GapItem&) const = default;
};

/// y_t = (s_t, G_t). Constructible only through the factories, so a sufficient
/// verdict can never carry gap items.
class JudgeVerdict {
public:
    static JudgeVerdict sufficient_verdict() { return JudgeVerdict(true, {}); }
    static JudgeVerdict insufficient(std::vector<GapItem> gaps) {
        return JudgeVerdict(false, std::move(gaps));
    }

    bool sufficient() const { return sufficient_; }
    const std::vector<GapItem>& gap_items() const { return gap_items_; }

    bool operator==(const JudgeVerdict&) const = default;

private:
    JudgeVerdict(bool sufficient, std::vector<GapItem> gaps)
        : sufficient_(sufficient), gap_items_(std::move(gaps)) {}

    bool sufficient_ = false;
    std::vector<GapItem> gap_items_;
};

enum class ParseErrorCode { NoObject, MissingKey, BadType, ConstraintViolation };

struct ParseError {
    ParseErrorCode code;
    std::string message;
};

struct ParsedVerdict {
    JudgeVerdict verdict;
    std::vector<std::string> warnings;  // category folds, dropped items
};

using VerdictResult = std::variant<ParsedVerdict, ParseError>;

/// Extracts the first complete JSON object from `raw` (surrounding prose is
/// tolerated) and validates it against the strict two-key schema.
VerdictResult parse_verdict(const std::string& raw);

/// Emits the prompt-facing shape: key "gap items", space-form category values.
std::string serialize_verdict(const JudgeVerdict& verdict);

struct GapItemValidation {
    GapItem item;
    std::vector<std::string> violations;
    bool unusable = false;
};

/// Tolerant field-level validation: absent string fields default to "",
/// categories are normalized, problems are reported rather than thrown.
GapItemValidation validate_gap_item(const std::string& category, const std::string& target,
                                    const std::string& slot, const std::string& description);

/// Returns the first balanced JSON object substring, honoring string literals
/// and escapes; nullopt when none exists.
std::optional<std::string> extract_first_json_object(const std::string& raw);

std::string trim(const std::string& s);

}  // namespace gaprag
