#include "gaprag/evaluation.hpp"

#include "gaprag/supervision.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace gaprag {

std::string normalize_answer(const std::string& s) {
    std::string mapped;
    mapped.reserve(s.size());
    for (unsigned char c : s) {
        if (std::ispunct(c))
            mapped.push_back(' ');
        else
            mapped.push_back(static_cast<char>(std::tolower(c)));
    }
    std::istringstream in(mapped);
    std::string token, out;
    while (in >> token) {
        if (token == "a" || token == "an" || token == "the") continue;
        if (!out.empty()) out.push_back(' ');
        out += token;
    }
    return out;
}

namespace {

std::vector<std::string> answer_tokens(const std::string& s) {
    std::istringstream in(normalize_answer(s));
    std::vector<std::string> tokens;
    std::string token;
    while (in >> token) tokens.push_back(token);
    return tokens;
}

double pair_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
    if (pred.empty() || gold.empty()) return 0.0;
    std::unordered_map<std::string, int> gold_counts;
    for (const auto& t : gold) ++gold_counts[t];
    std::size_t overlap = 0;
    for (const auto& t : pred) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    double p = static_cast<double>(overlap) / static_cast<double>(pred.size());
    double r = static_cast<double>(overlap) / static_cast<double>(gold.size());
    return 2.0 * p * r / (p + r);
}

}  // namespace

int exact_match(const std::string& pred, const std::vector<std::string>& golds) {
    if (golds.empty()) throw std::invalid_argument("exact_match requires gold answers");
    std::string norm_pred = normalize_answer(pred);
    for (const auto& gold : golds)
        if (norm_pred == normalize_answer(gold)) return 1;
    return 0;
}

double f1_score(const std::string& pred, const std::vector<std::string>& golds) {
    if (golds.empty()) throw std::invalid_argument("f1_score requires gold answers");
    auto pred_tokens = answer_tokens(pred);
    double best = 0.0;
    for (const auto& gold : golds)
        best = std::max(best, pair_f1(pred_tokens, answer_tokens(gold)));
    return best;
}

ConfusionResult confusion_matrix(const std::vector<Trajectory>& trajectories) {
    ConfusionResult result;
    for (const auto& traj : trajectories) {
        if (traj.gold_supporting_titles.empty() || traj.turns.empty()) {
            ++result.skipped;
            continue;
        }
        bool predicted = traj.turns.back().verdict.sufficient();
        bool truth = tag_retrieval_sufficiency(cumulative_excluded_titles(traj.turns),
                                               traj.gold_supporting_titles);
        if (predicted && truth)
            ++result.matrix.tp;
        else if (predicted && !truth)
            ++result.matrix.fp;
        else if (!predicted && truth)
            ++result.matrix.fn;
        else
            ++result.matrix.tn;
    }
    return result;
}

CompressionReport compression_stats(const std::vector<Trajectory>& trajectories) {
    struct Accum {
        std::size_t n = 0;
        double evidence = 0.0;
        double concat = 0.0;
    };
    std::map<int, Accum> groups;
    for (const auto& traj : trajectories) {
        if (traj.turns.empty()) continue;
        const TurnTrace& last = traj.turns.back();
        auto& acc = groups[traj.final_turn];
        ++acc.n;
        acc.evidence += static_cast<double>(last.context_words_after);
        acc.concat += static_cast<double>(last.concat_words_after);
    }
    CompressionReport report;
    for (const auto& [turn, acc] : groups) {
        CompressionGroup g;
        g.final_turn = turn;
        g.n = acc.n;
        g.mean_evidence_words = acc.evidence / static_cast<double>(acc.n);
        g.mean_concat_words = acc.concat / static_cast<double>(acc.n);
        if (g.mean_evidence_words > 0.0) g.ratio = g.mean_concat_words / g.mean_evidence_words;
        if (g.mean_concat_words > 0.0)
            g.inverse_ratio = g.mean_evidence_words / g.mean_concat_words;
        report.groups.push_back(g);
    }
    return report;
}

RunReport aggregate_run(const std::vector<Trajectory>& trajectories,
                        const std::vector<QuestionRecord>& gold) {
    std::unordered_map<std::string, const QuestionRecord*> gold_by_id;
    for (const auto& rec : gold) gold_by_id[rec.question_id] = &rec;

    RunReport report;
    std::vector<Trajectory> matched;
    double em_sum = 0.0, f1_sum = 0.0, latency_sum = 0.0;
    for (const auto& traj : trajectories) {
        auto it = gold_by_id.find(traj.question_id);
        if (it == gold_by_id.end()) {
            report.unmatched_ids.push_back(traj.question_id);
            continue;
        }
        const QuestionRecord& rec = *it->second;
        Trajectory enriched = traj;
        enriched.gold_answers = rec.gold_answers;
        enriched.gold_supporting_titles = rec.gold_supporting_titles;
        if (!rec.gold_answers.empty()) {
            em_sum += exact_match(traj.final_answer, rec.gold_answers);
            f1_sum += f1_score(traj.final_answer, rec.gold_answers);
            ++report.metrics.n;
        }
        double traj_ms = 0.0;
        for (const auto& t : enriched.turns) traj_ms += t.wall_ms;
        latency_sum += traj_ms;
        matched.push_back(std::move(enriched));
    }
    if (report.metrics.n > 0) {
        report.metrics.em = em_sum / static_cast<double>(report.metrics.n);
        report.metrics.f1 = f1_sum / static_cast<double>(report.metrics.n);
    }
    if (!matched.empty()) {
        report.mean_latency_s = latency_sum / static_cast<double>(matched.size()) / 1000.0;
        auto conf = confusion_matrix(matched);
        if (conf.matrix.total() > 0) report.confusion = conf;
        report.compression = compression_stats(matched);
    }
    return report;
}

nlohmann::json report_to_json(const RunReport& report) {
    nlohmann::json j;
    j["metrics"] = {{"em", report.metrics.em},
                    {"f1", report.metrics.f1},
                    {"n", report.metrics.n}};
    if (report.confusion) {
        const auto& m = report.confusion->matrix;
        j["confusion"] = {{"tp", m.tp},
                          {"fp", m.fp},
                          {"fn", m.fn},
                          {"tn", m.tn},
                          {"rates",
                           {{"tp", m.rate(m.tp)},
                            {"fp", m.rate(m.fp)},
                            {"fn", m.rate(m.fn)},
                            {"tn", m.rate(m.tn)}}},
                          {"skipped", report.confusion->skipped}};
    }
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : report.compression.groups) {
        nlohmann::json jg = {{"final_turn", g.final_turn},
                             {"n", g.n},
                             {"mean_evidence_words", g.mean_evidence_words},
                             {"mean_concat_words", g.mean_concat_words}};
        if (g.ratio) jg["ratio"] = *g.ratio;
        if (g.inverse_ratio) jg["inverse_ratio"] = *g.inverse_ratio;
        groups.push_back(std::move(jg));
    }
    j["compression"] = {{"groups", std::move(groups)}};
    j["mean_latency_s"] = report.mean_latency_s;
    j["unmatched_ids"] = report.unmatched_ids;
    return j;
}

std::string report_to_text(const RunReport& report) {
    std::ostringstream out;
    out << "n=" << report.metrics.n << "  EM=" << report.metrics.em
        << "  F1=" << report.metrics.f1 << "  latency_s=" << report.mean_latency_s << "\n";
    if (report.confusion) {
        const auto& m = report.confusion->matrix;
        out << "confusion: tp=" << m.tp << " fp=" << m.fp << " fn=" << m.fn
            << " tn=" << m.tn << "\n";
    }
    for (const auto& g : report.compression.groups) {
        out << "final_turn=" << g.final_turn << " n=" << g.n
            << " evidence_words=" << g.mean_evidence_words
            << " concat_words=" << g.mean_concat_words;
        if (g.ratio) out << " ratio=" << *g.ratio;
        out << "\n";
    }
    if (!report.unmatched_ids.empty()) {
        out << "unmatched:";
        for (const auto& id : report.unmatched_ids) out << " " << id;
        out << "\n";
    }
    return out.str();
}

}  // namespace gaprag
