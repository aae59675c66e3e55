#include "gaprag/supervision.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"

#include "gaprag/prompts.hpp"

namespace gaprag {

bool tag_retrieval_sufficiency(const std::set<std::string>& retrieved_titles,
                               const std::set<std::string>& gold_titles) {
    if (gold_titles.empty())
        throw std::invalid_argument("retrieval sufficiency is undefined without gold titles");
    return std::includes(retrieved_titles.begin(), retrieved_titles.end(),
                         gold_titles.begin(), gold_titles.end());
}

std::vector<SupervisionSnapshot> snapshots_from_trajectory(const Trajectory& traj,
                                                           int max_turns) {
    std::vector<SupervisionSnapshot> out;
    EvidenceContext context;
    std::set<std::string> retrieved;
    for (const auto& turn : traj.turns) {
        if (!turn.evidence_block) continue;  // final trace carries no block
        if (turn.turn > max_turns) break;
        context.append(*turn.evidence_block);
        retrieved.insert(turn.retrieved_titles.begin(), turn.retrieved_titles.end());
        SupervisionSnapshot snap;
        snap.question_id = traj.question_id;
        snap.question = traj.question;
        snap.context_text = context.render();
        snap.turn = turn.turn;
        snap.retrieval_sufficient_tag =
            tag_retrieval_sufficiency(retrieved, traj.gold_supporting_titles);
        out.push_back(std::move(snap));
    }
    return out;
}

std::vector<SupervisionSnapshot> collect_snapshots(
    const std::vector<QuestionRecord>& records, const PipelineConfig& config,
    const Components& components, int workers) {
    if (config.mode != PipelineMode::trace_collection)
        throw std::invalid_argument("collect_snapshots requires trace_collection mode");
    for (const auto& rec : records)
        if (rec.gold_supporting_titles.empty())
            throw std::invalid_argument("question without gold supporting titles: " +
                                        rec.question_id);

    auto trajectories = run_questions(records, config, components, workers);
    std::vector<SupervisionSnapshot> snapshots;
    for (const auto& traj : trajectories) {
        auto snaps = snapshots_from_trajectory(traj, config.max_turns);
        snapshots.insert(snapshots.end(), std::make_move_iterator(snaps.begin()),
                         std::make_move_iterator(snaps.end()));
    }
    return snapshots;
}

void teacher_label(SupervisionSnapshot& snapshot, ChatBackend& backend) {
    auto messages = render_teacher_prompt(snapshot.question, snapshot.context_text);
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string raw = backend.complete(PromptKind::teacher, messages);
        auto result = parse_verdict(raw);
        if (auto* parsed = std::get_if<ParsedVerdict>(&result)) {
            snapshot.teacher_verdict = parsed->verdict;
            snapshot.filter_status = FilterStatus::kept;  // provisional; filter may drop
            return;
        }
    }
    snapshot.filter_status = FilterStatus::dropped_format;
}

FilterOutcome filter_supervision(std::vector<SupervisionSnapshot> labeled) {
    FilterOutcome outcome;
    for (auto& snap : labeled) {
        if (!snap.teacher_verdict || snap.filter_status == FilterStatus::dropped_format) {
            snap.filter_status = FilterStatus::dropped_format;
            outcome.dropped.push_back(std::move(snap));
            continue;
        }
        // A sufficient teacher label over a context whose retrieval never
        // covered the gold titles cannot rest on the context alone.
        if (snap.teacher_verdict->sufficient() && !snap.retrieval_sufficient_tag) {
            snap.filter_status = FilterStatus::dropped_conflict;
            outcome.dropped.push_back(std::move(snap));
            continue;
        }
        snap.filter_status = FilterStatus::kept;
        outcome.kept.push_back(std::move(snap));
    }
    return outcome;
}

SplitResult split_dataset(std::vector<SupervisionSnapshot> snapshots,
                          double train_fraction, std::uint64_t seed) {
    if (snapshots.empty()) throw std::invalid_argument("cannot split an empty dataset");
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw std::invalid_argument("train_fraction must be in (0, 1)");

    std::mt19937_64 rng(seed);
    for (std::size_t i = snapshots.size() - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(snapshots[i], snapshots[j]);
    }

    std::size_t train_size = static_cast<std::size_t>(
        std::floor(static_cast<double>(snapshots.size()) * train_fraction));
    SplitResult result;
    result.train.assign(std::make_move_iterator(snapshots.begin()),
                        std::make_move_iterator(snapshots.begin() + train_size));
    result.val.assign(std::make_move_iterator(snapshots.begin() + train_size),
                      std::make_move_iterator(snapshots.end()));
    return result;
}

void export_sft(const std::vector<SupervisionSnapshot>& snapshots,
                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write SFT file: " + path);
    for (const auto& snap : snapshots) {
        if (snap.filter_status != FilterStatus::kept || !snap.teacher_verdict)
            throw std::invalid_argument("export_sft expects kept snapshots only");
        auto judge_messages = render_judge_prompt(snap.question, snap.context_text);
        nlohmann::json messages = nlohmann::json::array();
        messages.push_back({{"role", "system"}, {"content", judge_messages[0].content}});
        messages.push_back({{"role", "user"}, {"content", judge_messages[1].content}});
        messages.push_back(
            {{"role", "assistant"}, {"content", serialize_verdict(*snap.teacher_verdict)}});
        out << nlohmann::json{{"messages", std::move(messages)}}.dump() << "\n";
    }
}

SupervisionStats supervision_stats(const std::vector<SupervisionSnapshot>& snapshots) {
    SupervisionStats stats;
    for (const auto& snap : snapshots) {
        if (snap.turn >= 1) {
            if (stats.per_turn_counts.size() < static_cast<std::size_t>(snap.turn))
                stats.per_turn_counts.resize(snap.turn, 0);
            ++stats.per_turn_counts[snap.turn - 1];
        }
        if (snap.teacher_verdict) {
            if (snap.teacher_verdict->sufficient())
                ++stats.sufficient;
            else
                ++stats.insufficient;
        }
        ++stats.total;
    }
    return stats;
}

namespace {

const char* filter_status_name(FilterStatus s) {
    switch (s) {
        case FilterStatus::kept: return "kept";
        case FilterStatus::dropped_format: return "dropped_format";
        case FilterStatus::dropped_conflict: return "dropped_conflict";
        case FilterStatus::unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

FilterStatus filter_status_from_name(const std::string& name) {
    if (name == "kept") return FilterStatus::kept;
    if (name == "dropped_format") return FilterStatus::dropped_format;
    if (name == "dropped_conflict") return FilterStatus::dropped_conflict;
    return FilterStatus::unlabeled;
}

}  // namespace

void save_snapshots(const std::vector<SupervisionSnapshot>& snapshots,
                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write snapshot file: " + path);
    for (const auto& snap : snapshots) {
        nlohmann::json j;
        j["question_id"] = snap.question_id;
        j["question"] = snap.question;
        j["context_text"] = snap.context_text;
        j["turn"] = snap.turn;
        j["retrieval_sufficient_tag"] = snap.retrieval_sufficient_tag;
        if (snap.teacher_verdict)
            j["teacher_verdict"] =
                nlohmann::json::parse(serialize_verdict(*snap.teacher_verdict));
        j["filter_status"] = filter_status_name(snap.filter_status);
        out << j.dump() << "\n";
    }
}

std::vector<SupervisionSnapshot> load_snapshots(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open snapshot file: " + path);
    std::vector<SupervisionSnapshot> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        SupervisionSnapshot snap;
        snap.question_id = j.at("question_id").get<std::string>();
        snap.question = j.at("question").get<std::string>();
        snap.context_text = j.at("context_text").get<std::string>();
        snap.turn = j.at("turn").get<int>();
        snap.retrieval_sufficient_tag = j.at("retrieval_sufficient_tag").get<bool>();
        if (j.contains("teacher_verdict")) {
            auto result = parse_verdict(j["teacher_verdict"].dump());
            if (auto* parsed = std::get_if<ParsedVerdict>(&result))
                snap.teacher_verdict = parsed->verdict;
        }
        snap.filter_status =
            filter_status_from_name(j.value("filter_status", "unlabeled"));
        out.push_back(std::move(snap));
    }
    return out;
}

}  // namespace gaprag
