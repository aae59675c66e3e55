#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gaprag/bm25.hpp"
#include "gaprag/corpus.hpp"
#include "gaprag/evidence.hpp"
#include "gaprag/gap_schema.hpp"
#include "gaprag/llm_backend.hpp"

#include "json.hpp"

namespace gaprag {

enum class PipelineMode { inference, trace_collection };

struct PipelineConfig {
    int max_turns = 4;       // T: retrieval turns
    int top_k = 6;           // k: per-turn retrieval breadth
    int query_gap_limit = 1; // K: gap phrases per query
    int evidence_cap = 6;    // K_e: extractor sentence cap
    PipelineMode mode = PipelineMode::inference;
    /// Records wall_ms as 0 so scripted replays serialize byte-identically.
    bool deterministic_timing = false;
};

struct QuestionRecord {
    std::string question_id;
    std::string question;
    std::vector<std::string> gold_answers;
    std::set<std::string> gold_supporting_titles;
};

struct TurnTrace {
    int turn = 0;  // 1-based
    JudgeVerdict verdict = JudgeVerdict::insufficient({});
    std::optional<QueryString> query;
    std::vector<std::string> retrieved_titles;
    std::optional<EvidenceBlock> evidence_block;
    std::size_t context_words_after = 0;
    std::size_t concat_words_after = 0;
    double wall_ms = 0.0;
};

enum class StopReason { sufficient, budget_exhausted };

struct Trajectory {
    std::string question_id;
    std::string question;
    std::vector<std::string> gold_answers;
    std::set<std::string> gold_supporting_titles;
    std::vector<TurnTrace> turns;
    std::string final_answer;
    int final_turn = 0;
    StopReason stop_reason = StopReason::budget_exhausted;
    bool failed = false;
    std::string failure_reason;
};

struct Components {
    const CorpusHandle* corpus = nullptr;
    const Bm25Index* index = nullptr;
    ChatBackend* judge = nullptr;
    ChatBackend* extractor = nullptr;
    ChatBackend* reasoner = nullptr;  // optional in trace_collection mode
};

std::size_t word_count(const std::string& text);

std::set<std::string> cumulative_excluded_titles(const std::vector<TurnTrace>& turns);

/// One reasoner call on (q, rendered context); the answer is the trimmed
/// completion. Gold data never reaches the prompt.
std::string answer(const std::string& question, const EvidenceContext& context,
                   ChatBackend& backend);

/// Runs the judge-first loop for one question. Backend failures mark the
/// trajectory failed instead of throwing.
Trajectory run_question(const QuestionRecord& record, const PipelineConfig& config,
                        const Components& components);

/// Runs questions with `workers` threads; results come back in input order.
std::vector<Trajectory> run_questions(const std::vector<QuestionRecord>& records,
                                      const PipelineConfig& config,
                                      const Components& components, int workers = 1);

nlohmann::json trajectory_to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);

std::vector<Trajectory> load_trace_file(const std::string& path);
std::vector<QuestionRecord> load_question_file(const std::string& path);

}  // namespace gaprag
