#include "gaprag/corpus.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <stdexcept>
#include <string_view>

#include "json.hpp"

namespace gaprag {

void CorpusHandle::add(Document doc) {
    if (id_index_.count(doc.doc_id))
        throw std::invalid_argument("duplicate doc_id: " + doc.doc_id);
    std::size_t ordinal = docs_.size();
    id_index_.emplace(doc.doc_id, ordinal);
    title_index_.emplace(doc.title, ordinal);
    docs_.push_back(std::move(doc));
}

const Document* CorpusHandle::by_title(const std::string& title) const {
    auto it = title_index_.find(title);
    return it == title_index_.end() ? nullptr : &docs_[it->second];
}

bool CorpusHandle::has_doc_id(const std::string& doc_id) const {
    return id_index_.count(doc_id) != 0;
}

IngestResult ingest_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);

    IngestResult result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            result.issues.push_back({lineno, "malformed JSON record"});
            continue;
        }
        bool ok = true;
        for (const char* key : {"doc_id", "title", "text"}) {
            if (!rec.contains(key) || !rec[key].is_string()) {
                result.issues.push_back({lineno, std::string("missing or non-string field: ") + key});
                ok = false;
            }
        }
        if (!ok) continue;
        Document doc{rec["doc_id"].get<std::string>(), rec["title"].get<std::string>(),
                     rec["text"].get<std::string>()};
        if (doc.title.empty() || doc.text.empty()) {
            result.issues.push_back({lineno, "empty title or text"});
            continue;
        }
        if (result.corpus.has_doc_id(doc.doc_id)) {
            result.issues.push_back({lineno, "duplicate doc_id rejected: " + doc.doc_id});
            continue;
        }
        result.corpus.add(std::move(doc));
    }
    return result;
}

std::string normalize_whitespace(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool in_space = true;  // leading whitespace dropped
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            in_space = true;
        } else {
            if (in_space && !out.empty()) out.push_back(' ');
            in_space = false;
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

namespace {

constexpr std::array<std::string_view, 8> kAbbreviations = {
    "Dr.", "Mr.", "Mrs.", "St.", "U.S.", "e.g.", "i.e.", "etc.",
};

bool ends_with_abbreviation(std::string_view prefix) {
    // prefix ends at (and includes) a '.'; the word is everything after the
    // last space before it.
    auto space = prefix.find_last_of(' ');
    std::string_view word =
        space == std::string_view::npos ? prefix : prefix.substr(space + 1);
    while (!word.empty() && (word.front() == '"' || word.front() == '\'' ||
                             word.front() == '('))
        word.remove_prefix(1);
    for (auto abbr : kAbbreviations)
        if (word == abbr) return true;
    return false;
}

bool opens_sentence(char c) {
    return std::isupper(static_cast<unsigned char>(c)) ||
           std::isdigit(static_cast<unsigned char>(c)) || c == '"' || c == '\'' ||
           c == '(';
}

}  // namespace

std::vector<std::string> segment_sentences(const std::string& text) {
    std::string norm = normalize_whitespace(text);
    std::vector<std::string> sentences;
    if (norm.empty()) return sentences;

    std::size_t start = 0;
    for (std::size_t i = 0; i < norm.size(); ++i) {
        char c = norm[i];
        if (c != '.' && c != '!' && c != '?') continue;
        // Allow a closing quote/paren to ride along with the terminator.
        std::size_t end = i + 1;
        while (end < norm.size() &&
               (norm[end] == '"' || norm[end] == '\'' || norm[end] == ')'))
            ++end;
        if (end >= norm.size()) continue;  // end of text; flushed below
        if (norm[end] != ' ') continue;
        std::size_t next = end + 1;
        if (next >= norm.size() || !opens_sentence(norm[next])) continue;
        if (c == '.' &&
            ends_with_abbreviation(std::string_view(norm).substr(start, i + 1 - start)))
            continue;
        sentences.push_back(norm.substr(start, end - start));
        start = next;
        i = end;
    }
    if (start < norm.size()) sentences.push_back(norm.substr(start));
    return sentences;
}

}  // namespace gaprag
