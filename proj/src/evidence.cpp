#include "gaprag/evidence.hpp"

#include <unordered_set>

#include "json.hpp"

#include "gaprag/prompts.hpp"

namespace gaprag {

std::string EvidenceContext::render() const {
    std::string out;
    for (const auto& block : blocks_) {
        if (!out.empty()) out += "\n\n";
        out += "Turn " + std::to_string(block.turn) + " evidence:";
        for (const auto& cand : block.selected)
            out += "\n[" + cand.doc_title + "] " + cand.text;
    }
    return out;
}

std::vector<SentenceCandidate> build_candidate_pool(const std::vector<Document>& docs) {
    std::vector<SentenceCandidate> pool;
    int next_id = 1;
    for (const auto& doc : docs) {
        for (auto& sentence : segment_sentences(doc.text))
            pool.push_back({next_id++, doc.title, std::move(sentence)});
    }
    return pool;
}

SelectionOutcome parse_selection(const std::string& raw, int pool_size, int cap) {
    auto candidate = extract_first_json_object(raw);
    if (!candidate)
        return ParseError{ParseErrorCode::NoObject, "no JSON object in selector output"};
    nlohmann::json obj = nlohmann::json::parse(*candidate, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
        return ParseError{ParseErrorCode::NoObject, "selector output is not valid JSON"};

    const nlohmann::json* ids_node = nullptr;
    if (obj.contains("evidence global ids"))
        ids_node = &obj["evidence global ids"];
    else if (obj.contains("evidence_global_ids"))
        ids_node = &obj["evidence_global_ids"];
    if (!ids_node)
        return ParseError{ParseErrorCode::MissingKey, "missing key: evidence global ids"};
    if (!ids_node->is_array())
        return ParseError{ParseErrorCode::BadType, "evidence global ids is not a list"};

    SelectionResult result;
    std::unordered_set<int> seen;
    for (const auto& node : *ids_node) {
        if (result.ids.size() == static_cast<std::size_t>(cap)) {
            result.warnings.push_back("selection truncated at cap " + std::to_string(cap));
            break;
        }
        if (!node.is_number_integer()) {
            result.warnings.push_back("non-integer id dropped");
            continue;
        }
        int id = node.get<int>();
        if (id < 1 || id > pool_size) {
            result.warnings.push_back("out-of-range id dropped: " + std::to_string(id));
            continue;
        }
        if (!seen.insert(id).second) {
            result.warnings.push_back("duplicate id dropped: " + std::to_string(id));
            continue;
        }
        result.ids.push_back(id);
    }
    return result;
}

namespace {

// First sentence of each retrieved document, in document order, up to cap.
EvidenceBlock fallback_block(const std::vector<SentenceCandidate>& pool, int cap,
                             int turn) {
    EvidenceBlock block;
    block.turn = turn;
    std::unordered_set<std::string> seen_titles;
    for (const auto& cand : pool) {
        if (block.selected.size() == static_cast<std::size_t>(cap)) break;
        if (seen_titles.insert(cand.doc_title).second) block.selected.push_back(cand);
    }
    return block;
}

}  // namespace

EvidenceBlock extract(const std::string& question, const std::vector<GapItem>& gaps,
                      const std::vector<Document>& docs, ChatBackend& backend, int cap,
                      int turn) {
    if (cap < 1) throw ExtractError("evidence cap must be >= 1");

    auto pool = build_candidate_pool(docs);
    if (pool.empty()) {
        EvidenceBlock block;
        block.turn = turn;
        return block;
    }

    auto messages = render_extractor_prompt(question, gaps, pool, cap);
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string raw;
        try {
            raw = backend.complete(PromptKind::extractor, messages);
        } catch (const BackendError& e) {
            throw ExtractError(std::string("extractor backend failed at turn ") +
                               std::to_string(turn) + ": " + e.what());
        }
        auto outcome = parse_selection(raw, static_cast<int>(pool.size()), cap);
        if (auto* result = std::get_if<SelectionResult>(&outcome)) {
            EvidenceBlock block;
            block.turn = turn;
            for (int id : result->ids) block.selected.push_back(pool[id - 1]);
            return block;
        }
    }
    return fallback_block(pool, cap, turn);
}

}  // namespace gaprag
