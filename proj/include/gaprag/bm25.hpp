#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gaprag/corpus.hpp"

namespace gaprag {

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

struct ScoredDoc {
    std::string doc_id;
    std::string title;
    double score = 0.0;
    int rank = 0;  // 1-based within one result list
};

/// Lowercase, split on any non-alphanumeric byte, no empty terms, no stopwords.
std::vector<std::string> tokenize(const std::string& text);

/// Okapi BM25 inverted index. Immutable after build; concurrent searches are safe.
class Bm25Index {
public:
    static Bm25Index build(const CorpusHandle& corpus, Bm25Params params = {});

    /// Top-k by BM25 among documents whose title is not excluded. Zero-score
    /// documents are never returned; ties break by ascending corpus ordinal.
    /// Candidate consideration is capped at min(doc_count, 5k) before the
    /// exclusion filter so de-duplication does not shrink breadth.
    std::vector<ScoredDoc> search(const std::string& query, int k,
                                  const std::set<std::string>& exclude_titles = {}) const;

    /// Sum over query terms of idf * tf*(k1+1) / (tf + k1*(1 - b + b*len/avglen))
    /// with idf = ln(1 + (N - n + 0.5)/(n + 0.5)).
    double score(const std::vector<std::string>& query_terms, std::size_t ordinal) const;

    std::size_t doc_count() const { return doc_lengths_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    std::size_t doc_length(std::size_t ordinal) const { return doc_lengths_.at(ordinal); }
    const Bm25Params& params() const { return params_; }

    void save(const std::string& path) const;
    static Bm25Index load(const std::string& path, const CorpusHandle& corpus);

private:
    struct Posting {
        std::uint32_t ordinal;
        std::uint32_t tf;
    };

    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::vector<std::size_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<std::string> titles_;
};

}  // namespace gaprag
