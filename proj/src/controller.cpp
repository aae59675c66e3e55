#include "gaprag/controller.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>
#include <thread>

#include "gaprag/prompts.hpp"
#include "gaprag/query_builder.hpp"

namespace gaprag {

std::size_t word_count(const std::string& text) {
    std::size_t count = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

std::set<std::string> cumulative_excluded_titles(const std::vector<TurnTrace>& turns) {
    std::set<std::string> titles;
    for (const auto& turn : turns)
        titles.insert(turn.retrieved_titles.begin(), turn.retrieved_titles.end());
    return titles;
}

std::string answer(const std::string& question, const EvidenceContext& context,
                   ChatBackend& backend) {
    auto messages = render_reasoner_prompt(question, context.render());
    return trim(backend.complete(PromptKind::reasoner, messages));
}

namespace {

// One retry on parse failure, then fail-safe insufficient/empty so a malformed
// control signal is never conflated with a sufficiency decision.
JudgeVerdict judge_with_retry(ChatBackend& backend, const std::string& question,
                              const std::string& context_text) {
    auto messages = render_judge_prompt(question, context_text);
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string raw = backend.complete(PromptKind::judge, messages);
        auto result = parse_verdict(raw);
        if (auto* parsed = std::get_if<ParsedVerdict>(&result)) return parsed->verdict;
    }
    return JudgeVerdict::insufficient({});
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
}

}  // namespace

Trajectory run_question(const QuestionRecord& record, const PipelineConfig& config,
                        const Components& components) {
    Trajectory traj;
    traj.question_id = record.question_id;
    traj.question = record.question;
    traj.gold_answers = record.gold_answers;
    traj.gold_supporting_titles = record.gold_supporting_titles;

    EvidenceContext context;
    std::size_t concat_words = 0;

    try {
        for (int t = 0; t <= config.max_turns; ++t) {
            auto turn_start = std::chrono::steady_clock::now();
            JudgeVerdict verdict =
                judge_with_retry(*components.judge, record.question, context.render());

            bool budget_hit = t == config.max_turns;
            bool sufficiency_stop =
                verdict.sufficient() && config.mode == PipelineMode::inference;
            if (sufficiency_stop || budget_hit) {
                if (components.reasoner)
                    traj.final_answer = answer(record.question, context, *components.reasoner);
                TurnTrace final_trace;
                final_trace.turn = t + 1;
                final_trace.verdict = verdict;
                final_trace.context_words_after = word_count(context.render());
                final_trace.concat_words_after = concat_words;
                final_trace.wall_ms =
                    config.deterministic_timing ? 0.0 : elapsed_ms(turn_start);
                traj.turns.push_back(std::move(final_trace));
                traj.stop_reason = verdict.sufficient() ? StopReason::sufficient
                                                        : StopReason::budget_exhausted;
                break;
            }

            QueryString query = build_query(record.question, verdict.gap_items(),
                                            config.query_gap_limit);
            auto excluded = cumulative_excluded_titles(traj.turns);
            auto scored = components.index->search(query.text, config.top_k, excluded);

            std::vector<Document> docs;
            std::vector<std::string> titles;
            for (const auto& sd : scored) {
                if (const Document* doc = components.corpus->by_title(sd.title)) {
                    docs.push_back(*doc);
                    titles.push_back(sd.title);
                    concat_words += word_count(doc->text);
                }
            }

            EvidenceBlock block;
            if (docs.empty()) {
                block.turn = t + 1;
            } else {
                block = extract(record.question, verdict.gap_items(), docs,
                                *components.extractor, config.evidence_cap, t + 1);
            }
            block.query_used = query;
            block.retrieved_titles = titles;
            context.append(block);

            TurnTrace trace;
            trace.turn = t + 1;
            trace.verdict = verdict;
            trace.query = query;
            trace.retrieved_titles = titles;
            trace.evidence_block = std::move(block);
            trace.context_words_after = word_count(context.render());
            trace.concat_words_after = concat_words;
            trace.wall_ms = config.deterministic_timing ? 0.0 : elapsed_ms(turn_start);
            traj.turns.push_back(std::move(trace));
        }
    } catch (const std::exception& e) {
        traj.failed = true;
        traj.failure_reason = e.what();
    }

    if (!traj.turns.empty()) traj.final_turn = traj.turns.back().turn;
    return traj;
}

std::vector<Trajectory> run_questions(const std::vector<QuestionRecord>& records,
                                      const PipelineConfig& config,
                                      const Components& components, int workers) {
    std::vector<Trajectory> results(records.size());
    if (workers < 1) workers = 1;
    workers = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(workers), records.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < records.size(); ++i)
            results[i] = run_question(records[i], config, components);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= records.size()) return;
                results[i] = run_question(records[i], config, components);
            }
        });
    }
    for (auto& th : pool) th.join();
    return results;
}

namespace {

nlohmann::json verdict_to_json(const JudgeVerdict& verdict) {
    return nlohmann::json::parse(serialize_verdict(verdict));
}

JudgeVerdict verdict_from_json(const nlohmann::json& j) {
    auto result = parse_verdict(j.dump());
    if (auto* parsed = std::get_if<ParsedVerdict>(&result)) return parsed->verdict;
    throw std::runtime_error("invalid verdict in trace file");
}

nlohmann::json query_to_json(const QueryString& q) {
    nlohmann::json phrases = nlohmann::json::array();
    for (const auto& sp : q.source_phrases) {
        const char* origin = sp.origin == PhraseOrigin::target_slot ? "target_slot"
                             : sp.origin == PhraseOrigin::description ? "description"
                                                                      : "none";
        phrases.push_back(
            {{"gap_index", sp.gap_index}, {"phrase", sp.phrase}, {"origin", origin}});
    }
    return {{"text", q.text}, {"source_phrases", std::move(phrases)}};
}

QueryString query_from_json(const nlohmann::json& j) {
    QueryString q;
    q.text = j.at("text").get<std::string>();
    for (const auto& node : j.at("source_phrases")) {
        SourcePhrase sp;
        sp.gap_index = node.at("gap_index").get<std::size_t>();
        sp.phrase = node.at("phrase").get<std::string>();
        std::string origin = node.at("origin").get<std::string>();
        sp.origin = origin == "target_slot"    ? PhraseOrigin::target_slot
                    : origin == "description" ? PhraseOrigin::description
                                              : PhraseOrigin::none;
        q.source_phrases.push_back(std::move(sp));
    }
    return q;
}

nlohmann::json block_to_json(const EvidenceBlock& block) {
    nlohmann::json selected = nlohmann::json::array();
    for (const auto& cand : block.selected)
        selected.push_back({{"global_id", cand.global_id},
                            {"doc_title", cand.doc_title},
                            {"text", cand.text}});
    return {{"turn", block.turn}, {"selected", std::move(selected)}};
}

EvidenceBlock block_from_json(const nlohmann::json& j) {
    EvidenceBlock block;
    block.turn = j.at("turn").get<int>();
    for (const auto& node : j.at("selected"))
        block.selected.push_back({node.at("global_id").get<int>(),
                                  node.at("doc_title").get<std::string>(),
                                  node.at("text").get<std::string>()});
    return block;
}

}  // namespace

nlohmann::json trajectory_to_json(const Trajectory& traj) {
    nlohmann::json turns = nlohmann::json::array();
    for (const auto& t : traj.turns) {
        nlohmann::json jt;
        jt["turn"] = t.turn;
        jt["verdict"] = verdict_to_json(t.verdict);
        if (t.query) jt["query"] = query_to_json(*t.query);
        jt["retrieved_titles"] = t.retrieved_titles;
        if (t.evidence_block) jt["evidence"] = block_to_json(*t.evidence_block);
        jt["context_words_after"] = t.context_words_after;
        jt["concat_words_after"] = t.concat_words_after;
        jt["wall_ms"] = t.wall_ms;
        turns.push_back(std::move(jt));
    }
    nlohmann::json j;
    j["schema_version"] = 1;
    j["question_id"] = traj.question_id;
    j["question"] = traj.question;
    j["turns"] = std::move(turns);
    j["final_answer"] = traj.final_answer;
    j["final_turn"] = traj.final_turn;
    j["stop_reason"] =
        traj.stop_reason == StopReason::sufficient ? "sufficient" : "budget_exhausted";
    j["failed"] = traj.failed;
    if (traj.failed) j["failure_reason"] = traj.failure_reason;
    return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
    Trajectory traj;
    traj.question_id = j.at("question_id").get<std::string>();
    traj.question = j.at("question").get<std::string>();
    traj.final_answer = j.at("final_answer").get<std::string>();
    traj.final_turn = j.at("final_turn").get<int>();
    traj.stop_reason = j.at("stop_reason").get<std::string>() == "sufficient"
                           ? StopReason::sufficient
                           : StopReason::budget_exhausted;
    traj.failed = j.value("failed", false);
    traj.failure_reason = j.value("failure_reason", "");
    for (const auto& node : j.at("turns")) {
        TurnTrace t;
        t.turn = node.at("turn").get<int>();
        t.verdict = verdict_from_json(node.at("verdict"));
        if (node.contains("query")) t.query = query_from_json(node.at("query"));
        t.retrieved_titles = node.at("retrieved_titles").get<std::vector<std::string>>();
        if (node.contains("evidence")) t.evidence_block = block_from_json(node.at("evidence"));
        t.context_words_after = node.at("context_words_after").get<std::size_t>();
        t.concat_words_after = node.at("concat_words_after").get<std::size_t>();
        t.wall_ms = node.at("wall_ms").get<double>();
        traj.turns.push_back(std::move(t));
    }
    return traj;
}

std::vector<Trajectory> load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    std::vector<Trajectory> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(trajectory_from_json(nlohmann::json::parse(line)));
    }
    return out;
}

std::vector<QuestionRecord> load_question_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open question file: " + path);
    std::vector<QuestionRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        QuestionRecord rec;
        rec.question_id = j.at("question_id").get<std::string>();
        rec.question = j.at("question").get<std::string>();
        if (j.contains("answers"))
            rec.gold_answers = j["answers"].get<std::vector<std::string>>();
        if (j.contains("supporting_titles"))
            for (const auto& t : j["supporting_titles"])
                rec.gold_supporting_titles.insert(t.get<std::string>());
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace gaprag
