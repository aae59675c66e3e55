#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gaprag/controller.hpp"
#include "gaprag/gap_schema.hpp"

namespace gaprag {

enum class FilterStatus { kept, dropped_format, dropped_conflict, unlabeled };

struct SupervisionSnapshot {
    std::string question_id;
    std::string question;
    std::string context_text;  // rendered C_t, exactly as the judge sees it
    int turn = 0;              // 1..T
    bool retrieval_sufficient_tag = false;
    std::optional<JudgeVerdict> teacher_verdict;
    FilterStatus filter_status = FilterStatus::unlabeled;
};

/// true iff every gold supporting title was retrieved (exact match).
bool tag_retrieval_sufficiency(const std::set<std::string>& retrieved_titles,
                               const std::set<std::string>& gold_titles);

/// Rolls out every question to the full budget (trace_collection mode) and
/// emits one snapshot per turn 1..T with the coverage tag computed.
std::vector<SupervisionSnapshot> collect_snapshots(
    const std::vector<QuestionRecord>& records, const PipelineConfig& config,
    const Components& components, int workers = 1);

/// Derives snapshots from already-recorded trajectories (resume path).
std::vector<SupervisionSnapshot> snapshots_from_trajectory(const Trajectory& traj,
                                                           int max_turns);

/// Teacher labeling with one retry; parse failure marks dropped_format.
void teacher_label(SupervisionSnapshot& snapshot, ChatBackend& backend);

struct FilterOutcome {
    std::vector<SupervisionSnapshot> kept;
    std::vector<SupervisionSnapshot> dropped;
};

/// Drops format failures and context-only violations (teacher sufficient while
/// the retrieval tag is insufficient). Teacher under-claiming is kept.
FilterOutcome filter_supervision(std::vector<SupervisionSnapshot> labeled);

struct SplitResult {
    std::vector<SupervisionSnapshot> train;
    std::vector<SupervisionSnapshot> val;
};

/// Deterministic Fisher-Yates shuffle driven by std::mt19937_64 seeded with
/// `seed` (j = rng() % (i+1), i descending); train takes the first
/// floor(N * train_fraction) of the shuffled order.
SplitResult split_dataset(std::vector<SupervisionSnapshot> snapshots,
                          double train_fraction, std::uint64_t seed);

/// Chat-format SFT export: system = judge prompt, user = rendered (q, C_t),
/// assistant = serialized teacher verdict. Kept snapshots only.
void export_sft(const std::vector<SupervisionSnapshot>& snapshots,
                const std::string& path);

struct SupervisionStats {
    std::vector<std::size_t> per_turn_counts;  // index 0 = turn 1
    std::size_t sufficient = 0;
    std::size_t insufficient = 0;
    std::size_t total = 0;
};

SupervisionStats supervision_stats(const std::vector<SupervisionSnapshot>& snapshots);

void save_snapshots(const std::vector<SupervisionSnapshot>& snapshots,
                    const std::string& path);
std::vector<SupervisionSnapshot> load_snapshots(const std::string& path);

}  // namespace gaprag
