#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "gaprag/gap_schema.hpp"

using namespace gaprag;

namespace {

const ParsedVerdict& ok(const VerdictResult& r) {
    REQUIRE(std::holds_alternative<ParsedVerdict>(r));
    return std::get<ParsedVerdict>(r);
}

const ParseError& err(const VerdictResult& r) {
    REQUIRE(std::holds_alternative<ParseError>(r));
    return std::get<ParseError>(r);
}

}  // namespace

TEST_CASE("sufficient verdict with empty gap list") {
    auto r = parse_verdict(R"({"sufficient": true, "gap items": []})");
    const auto& p = ok(r);
    CHECK(p.verdict.sufficient());
    CHECK(p.verdict.gap_items().empty());
    CHECK(p.warnings.empty());
}

TEST_CASE("insufficient verdict with one relation gap, underscore key spelling") {
    auto r = parse_verdict(
        R"({"sufficient": false, "gap_items": [{"category":"relation",)"
        R"("target":"Fredric Rieders","slot":"testified_against",)"
        R"("description":"The person Fredric Rieders testified against."}]})");
    const auto& p = ok(r);
    CHECK_FALSE(p.verdict.sufficient());
    REQUIRE(p.verdict.gap_items().size() == 1);
    const auto& g = p.verdict.gap_items()[0];
    CHECK(g.category == GapCategory::relation);
    CHECK(g.target == "Fredric Rieders");
    CHECK(g.slot == "testified_against");
    CHECK(g.description == "The person Fredric Rieders testified against.");
}

TEST_CASE("sufficient=true with a non-empty gap list is a constraint violation") {
    auto r = parse_verdict(
        R"({"sufficient": true, "gap items": [{"category":"other","target":"x","slot":"y","description":"z"}]})");
    CHECK(err(r).code == ParseErrorCode::ConstraintViolation);
}

TEST_CASE("surrounding prose is tolerated") {
    auto r = parse_verdict(
        "Sure, here is my verdict:\n"
        R"({"sufficient": true, "gap items": []})"
        "\nHope that helps!");
    CHECK(ok(r).verdict.sufficient());
}

TEST_CASE("typed errors for malformed outputs") {
    CHECK(err(parse_verdict("no json here")).code == ParseErrorCode::NoObject);
    CHECK(err(parse_verdict("")).code == ParseErrorCode::NoObject);
    CHECK(err(parse_verdict(R"({"sufficient": true})")).code == ParseErrorCode::MissingKey);
    CHECK(err(parse_verdict(R"({"gap items": []})")).code == ParseErrorCode::MissingKey);
    CHECK(err(parse_verdict(R"({"sufficient": "yes", "gap items": []})")).code ==
          ParseErrorCode::BadType);
    CHECK(err(parse_verdict(R"({"sufficient": false, "gap items": {}})")).code ==
          ParseErrorCode::BadType);
}

TEST_CASE("category surface forms with spaces normalize into the enum") {
    bool known = false;
    CHECK(normalize_category("evidence span", &known) == GapCategory::evidence_span);
    CHECK(known);
    CHECK(normalize_category("bridge entity", &known) == GapCategory::bridge_entity);
    CHECK(known);
    CHECK(normalize_category("Bridge_Entity", &known) == GapCategory::bridge_entity);
    CHECK(known);
    CHECK(normalize_category("timeline", &known) == GapCategory::other);
    CHECK_FALSE(known);
}

TEST_CASE("unknown categories fold to other with a warning") {
    auto r = parse_verdict(
        R"({"sufficient": false, "gap items": [{"category":"timeline","target":"t","slot":"s","description":"d"}]})");
    const auto& p = ok(r);
    REQUIRE(p.verdict.gap_items().size() == 1);
    CHECK(p.verdict.gap_items()[0].category == GapCategory::other);
    CHECK_FALSE(p.warnings.empty());
}

TEST_CASE("non-object gap entries are dropped with a warning") {
    auto r = parse_verdict(
        R"({"sufficient": false, "gap items": ["not an object", {"category":"attribute","target":"t","slot":"s","description":""}]})");
    const auto& p = ok(r);
    REQUIRE(p.verdict.gap_items().size() == 1);
    CHECK(p.verdict.gap_items()[0].category == GapCategory::attribute);
    CHECK_FALSE(p.warnings.empty());
}

TEST_CASE("validate_gap_item fills defaults, normalizes, and flags unusable items") {
    auto v = validate_gap_item("evidence span", "Michael Swango", "sentence_length", "");
    CHECK(v.item.category == GapCategory::evidence_span);
    CHECK_FALSE(v.unusable);
    CHECK(v.violations.empty());

    auto folded = validate_gap_item("timeline", "t", "s", "d");
    CHECK(folded.item.category == GapCategory::other);
    CHECK_FALSE(folded.violations.empty());

    auto empty = validate_gap_item("", "", "", "");
    CHECK(empty.unusable);
    CHECK(empty.item.category == GapCategory::other);
}

TEST_CASE("usable requires the target+slot pair or a description") {
    CHECK(GapItem{GapCategory::relation, "a", "b", ""}.usable());
    CHECK(GapItem{GapCategory::relation, "", "", "desc"}.usable());
    CHECK_FALSE(GapItem{GapCategory::relation, "", "x", ""}.usable());
    CHECK_FALSE(GapItem{GapCategory::relation, "  ", "x", " \t"}.usable());
}

TEST_CASE("serialize emits the prompt-facing shape") {
    auto verdict = JudgeVerdict::insufficient(
        {{GapCategory::bridge_entity, "t", "s", "d"}, {GapCategory::evidence_span, "u", "v", "w"}});
    auto text = serialize_verdict(verdict);
    CHECK(text.find("\"gap items\"") != std::string::npos);
    CHECK(text.find("bridge entity") != std::string::npos);
    CHECK(text.find("evidence span") != std::string::npos);
    CHECK(text.find("bridge_entity") == std::string::npos);
}

TEST_CASE("serialize then parse round-trips the verdict") {
    std::vector<JudgeVerdict> verdicts = {
        JudgeVerdict::sufficient_verdict(),
        JudgeVerdict::insufficient({}),
        JudgeVerdict::insufficient({{GapCategory::relation, "Fredric Rieders",
                                     "testified_against", "who was accused"}}),
        JudgeVerdict::insufficient({{GapCategory::bridge_entity, "a", "b", "c"},
                                    {GapCategory::attribute, "", "", "only description"},
                                    {GapCategory::other, "x", "", ""}}),
    };
    for (const auto& v : verdicts) {
        auto r = parse_verdict(serialize_verdict(v));
        const auto& p = ok(r);
        CHECK(p.verdict == v);
    }
}

TEST_CASE("extract_first_json_object honors strings and escapes") {
    CHECK(extract_first_json_object(R"(x {"a": "b } c"} y)") == R"({"a": "b } c"})");
    CHECK(extract_first_json_object(R"({"a": "\"}"})") == R"({"a": "\"}"})");
    CHECK(extract_first_json_object("nested {\"a\": {\"b\": 1}} tail") ==
          "{\"a\": {\"b\": 1}}");
    CHECK_FALSE(extract_first_json_object("no braces").has_value());
    CHECK_FALSE(extract_first_json_object("{unclosed").has_value());
}

TEST_CASE("fuzzing never crashes and always yields a verdict or a typed error") {
    std::mt19937_64 rng(1234);
    const std::string seed_doc =
        R"({"sufficient": false, "gap items": [{"category":"relation","target":"a","slot":"b","description":"c"}]})";
    for (int i = 0; i < 10000; ++i) {
        std::string input;
        if (i % 2 == 0) {
            std::size_t len = rng() % 200;
            for (std::size_t c = 0; c < len; ++c)
                input += static_cast<char>(rng() % 256);
        } else {
            input = seed_doc;
            std::size_t mutations = 1 + rng() % 8;
            for (std::size_t m = 0; m < mutations; ++m) {
                std::size_t pos = rng() % input.size();
                switch (rng() % 3) {
                    case 0: input[pos] = static_cast<char>(rng() % 256); break;
                    case 1: input.erase(pos, 1); break;
                    default: input.insert(pos, 1, static_cast<char>(rng() % 128)); break;
                }
                if (input.empty()) input = "{";
            }
        }
        auto r = parse_verdict(input);
        CHECK((std::holds_alternative<ParsedVerdict>(r) ||
               std::holds_alternative<ParseError>(r)));
    }
}
