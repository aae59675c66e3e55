#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaprag/controller.hpp"

#include "json.hpp"

namespace gaprag {

/// SQuAD-style normalization: lowercase, punctuation to space, drop the
/// articles {a, an, the} as whole tokens, collapse whitespace.
std::string normalize_answer(const std::string& s);

/// 1 iff the normalized prediction equals some normalized gold.
int exact_match(const std::string& pred, const std::vector<std::string>& golds);

/// Token-multiset overlap F1, maximum over golds; 0 when either side is empty.
double f1_score(const std::string& pred, const std::vector<std::string>& golds);

struct QAMetrics {
    double em = 0.0;
    double f1 = 0.0;
    std::size_t n = 0;
};

struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::size_t total() const { return tp + fp + fn + tn; }
    double rate(std::size_t cell) const {
        return total() == 0 ? 0.0 : static_cast<double>(cell) / static_cast<double>(total());
    }
};

/// Prediction = final recorded verdict's sufficiency; truth = gold titles
/// covered by the cumulative retrieved titles. Trajectories without gold
/// titles are skipped (counted in `skipped`).
struct ConfusionResult {
    ConfusionMatrix matrix;
    std::size_t skipped = 0;
};

ConfusionResult confusion_matrix(const std::vector<Trajectory>& trajectories);

struct CompressionGroup {
    int final_turn = 0;
    std::size_t n = 0;
    double mean_evidence_words = 0.0;
    double mean_concat_words = 0.0;
    std::optional<double> ratio;          // concatenated / evidence
    std::optional<double> inverse_ratio;  // evidence / concatenated
};

struct CompressionReport {
    std::vector<CompressionGroup> groups;  // ascending final_turn
};

/// Word counts come from the final row per question; groups by final turn.
CompressionReport compression_stats(const std::vector<Trajectory>& trajectories);

struct RunReport {
    QAMetrics metrics;
    std::optional<ConfusionResult> confusion;
    CompressionReport compression;
    double mean_latency_s = 0.0;  // mean per-trajectory wall-clock, seconds
    std::vector<std::string> unmatched_ids;
};

/// Joins traces with gold records by question_id and aggregates all reports.
RunReport aggregate_run(const std::vector<Trajectory>& trajectories,
                        const std::vector<QuestionRecord>& gold);

nlohmann::json report_to_json(const RunReport& report);
std::string report_to_text(const RunReport& report);

}  // namespace gaprag
