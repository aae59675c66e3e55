#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gaprag {

struct Document {
    std::string doc_id;
    std::string title;
    std::string text;
};

/// One per-record problem encountered during ingestion; `line` is 1-based.
struct IngestIssue {
    std::size_t line;
    std::string message;
};

/// Immutable after ingestion; iteration order is ingestion order.
class CorpusHandle {
public:
    void add(Document doc);

    const std::vector<Document>& documents() const { return docs_; }
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }

    const Document& at(std::size_t ordinal) const { return docs_.at(ordinal); }

    /// Case-sensitive exact title lookup.
    const Document* by_title(const std::string& title) const;
    bool has_doc_id(const std::string& doc_id) const;

private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> title_index_;
    std::unordered_map<std::string, std::size_t> id_index_;
};

struct IngestResult {
    CorpusHandle corpus;
    std::vector<IngestIssue> issues;
};

/// Reads a JSONL corpus with keys {doc_id, title, text}. Malformed records and
/// duplicate doc_ids are reported in `issues` and skipped; valid records are kept.
IngestResult ingest_corpus(const std::string& path);

/// Rule-based splitter: terminal {., !, ?} followed by whitespace and an
/// uppercase letter, digit, or opening quote starts a new sentence, except
/// after a fixed abbreviation list (Dr., Mr., Mrs., St., U.S., e.g., i.e., etc.).
/// Input whitespace is normalized to single spaces first.
std::vector<std::string> segment_sentences(const std::string& text);

/// Collapses whitespace runs to single spaces and trims the ends.
std::string normalize_whitespace(const std::string& text);

}  // namespace gaprag
