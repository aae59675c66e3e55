#include "gaprag/bm25.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace gaprag {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> terms;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            terms.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) terms.push_back(std::move(current));
    return terms;
}

Bm25Index Bm25Index::build(const CorpusHandle& corpus, Bm25Params params) {
    if (corpus.empty()) throw std::invalid_argument("cannot index an empty corpus");
    if (params.k1 < 0 || params.b < 0 || params.b > 1)
        throw std::invalid_argument("BM25 params out of range");

    Bm25Index index;
    index.params_ = params;
    std::size_t total_len = 0;
    for (std::size_t ord = 0; ord < corpus.size(); ++ord) {
        const Document& doc = corpus.at(ord);
        auto terms = tokenize(doc.text);
        std::unordered_map<std::string, std::uint32_t> tf;
        for (auto& t : terms) ++tf[t];
        for (auto& [term, count] : tf)
            index.postings_[term].push_back({static_cast<std::uint32_t>(ord), count});
        index.doc_lengths_.push_back(terms.size());
        total_len += terms.size();
        index.doc_ids_.push_back(doc.doc_id);
        index.titles_.push_back(doc.title);
    }
    for (auto& [term, plist] : index.postings_)
        std::sort(plist.begin(), plist.end(),
                  [](const Posting& a, const Posting& b) { return a.ordinal < b.ordinal; });
    index.avg_doc_length_ =
        static_cast<double>(total_len) / static_cast<double>(corpus.size());
    return index;
}

namespace {

double idf(std::size_t doc_count, std::size_t df) {
    double n = static_cast<double>(df);
    double big_n = static_cast<double>(doc_count);
    return std::log(1.0 + (big_n - n + 0.5) / (n + 0.5));
}

}  // namespace

double Bm25Index::score(const std::vector<std::string>& query_terms,
                        std::size_t ordinal) const {
    if (ordinal >= doc_count()) throw std::out_of_range("doc ordinal out of range");
    double len = static_cast<double>(doc_lengths_[ordinal]);
    double norm = params_.k1 * (1.0 - params_.b + params_.b * len / avg_doc_length_);
    double total = 0.0;
    for (const auto& term : query_terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& plist = it->second;
        auto pit = std::lower_bound(
            plist.begin(), plist.end(), ordinal,
            [](const Posting& p, std::size_t ord) { return p.ordinal < ord; });
        if (pit == plist.end() || pit->ordinal != ordinal) continue;
        double tf = static_cast<double>(pit->tf);
        total += idf(doc_count(), plist.size()) * tf * (params_.k1 + 1.0) / (tf + norm);
    }
    return total;
}

std::vector<ScoredDoc> Bm25Index::search(const std::string& query, int k,
                                         const std::set<std::string>& exclude_titles) const {
    std::vector<ScoredDoc> results;
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    auto terms = tokenize(query);
    if (terms.empty()) return results;

    std::unordered_map<std::uint32_t, double> scores;
    for (const auto& term : terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& plist = it->second;
        double w_idf = idf(doc_count(), plist.size());
        for (const Posting& p : plist) {
            double len = static_cast<double>(doc_lengths_[p.ordinal]);
            double norm =
                params_.k1 * (1.0 - params_.b + params_.b * len / avg_doc_length_);
            double tf = static_cast<double>(p.tf);
            scores[p.ordinal] += w_idf * tf * (params_.k1 + 1.0) / (tf + norm);
        }
    }

    std::vector<std::pair<std::uint32_t, double>> candidates;
    candidates.reserve(scores.size());
    for (auto& [ord, s] : scores)
        if (s > 0.0) candidates.emplace_back(ord, s);
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::size_t fetch = std::min(doc_count(), static_cast<std::size_t>(5) * k);
    if (candidates.size() > fetch) candidates.resize(fetch);

    for (const auto& [ord, s] : candidates) {
        if (exclude_titles.count(titles_[ord])) continue;
        results.push_back({doc_ids_[ord], titles_[ord], s,
                           static_cast<int>(results.size()) + 1});
        if (results.size() == static_cast<std::size_t>(k)) break;
    }
    return results;
}

void Bm25Index::save(const std::string& path) const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["k1"] = params_.k1;
    j["b"] = params_.b;
    j["doc_lengths"] = doc_lengths_;
    j["doc_ids"] = doc_ids_;
    j["titles"] = titles_;
    nlohmann::json post = nlohmann::json::object();
    for (const auto& [term, plist] : postings_) {
        nlohmann::json arr = nlohmann::json::array();
        for (const Posting& p : plist) arr.push_back({p.ordinal, p.tf});
        post[term] = std::move(arr);
    }
    j["postings"] = std::move(post);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write index file: " + path);
    out << j.dump();
}

Bm25Index Bm25Index::load(const std::string& path, const CorpusHandle& corpus) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open index file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
        throw std::runtime_error("unsupported index format version");
    Bm25Index index;
    index.params_ = {j["k1"].get<double>(), j["b"].get<double>()};
    index.doc_lengths_ = j["doc_lengths"].get<std::vector<std::size_t>>();
    index.doc_ids_ = j["doc_ids"].get<std::vector<std::string>>();
    index.titles_ = j["titles"].get<std::vector<std::string>>();
    if (index.doc_ids_.size() != corpus.size())
        throw std::runtime_error("index does not match corpus; rebuild required");
    std::size_t total = 0;
    for (auto len : index.doc_lengths_) total += len;
    index.avg_doc_length_ =
        static_cast<double>(total) / static_cast<double>(index.doc_lengths_.size());
    for (auto& [term, arr] : j["postings"].items()) {
        auto& plist = index.postings_[term];
        for (auto& pair : arr)
            plist.push_back({pair[0].get<std::uint32_t>(), pair[1].get<std::uint32_t>()});
    }
    return index;
}

}  // namespace gaprag
