#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gaprag/corpus.hpp"
#include "gaprag/gap_schema.hpp"
#include "gaprag/llm_backend.hpp"
#include "gaprag/query_builder.hpp"

namespace gaprag {

struct SentenceCandidate {
    int global_id = 0;  // 1-based, contiguous within one turn's pool
    std::string doc_title;
    std::string text;  // verbatim corpus sentence

    bool operator==(const SentenceCandidate&) const = default;
};

struct EvidenceBlock {
    int turn = 0;  // 1-based
    std::vector<SentenceCandidate> selected;
    QueryString query_used;
    std::vector<std::string> retrieved_titles;
};

/// Append-only evidence memory C_t.
class EvidenceContext {
public:
    void append(EvidenceBlock block) { blocks_.push_back(std::move(block)); }
    const std::vector<EvidenceBlock>& blocks() const { return blocks_; }
    bool empty() const { return blocks_.empty(); }

    /// Deterministic text form: per block "Turn t evidence:" then one
    /// "[title] sentence" line per selection, blocks separated by blank lines.
    std::string render() const;

private:
    std::vector<EvidenceBlock> blocks_;
};

/// Sentences of the retrieved documents in (document order, sentence order),
/// global ids assigned 1..N.
std::vector<SentenceCandidate> build_candidate_pool(const std::vector<Document>& docs);

struct SelectionResult {
    std::vector<int> ids;  // validated, de-duplicated, capped
    std::vector<std::string> warnings;
};

using SelectionOutcome = std::variant<SelectionResult, ParseError>;

/// Parses the selector JSON, keeping in-range integer ids, dropping duplicates
/// and out-of-range ids with warnings, and truncating to the first `cap` survivors.
SelectionOutcome parse_selection(const std::string& raw, int pool_size, int cap);

class ExtractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs the selector over the candidate pool and materializes the verbatim
/// evidence block. One retry on parse failure; after a second failure the
/// fallback is the first sentence of each retrieved document, up to `cap`.
EvidenceBlock extract(const std::string& question, const std::vector<GapItem>& gaps,
                      const std::vector<Document>& docs, ChatBackend& backend, int cap,
                      int turn);

}  // namespace gaprag
