#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gaprag/query_builder.hpp"

using namespace gaprag;

TEST_CASE("phrase prefers target+slot with underscores mapped to spaces") {
    GapItem gap{GapCategory::relation, "Fredric Rieders", "testified_against", "ignored"};
    CHECK(phrase_of(gap) == "Fredric Rieders testified against");
}

TEST_CASE("phrase falls back to the description when the pair is incomplete") {
    GapItem gap{GapCategory::bridge_entity, "", "",
                "The name of the village in Philipstown, New York."};
    CHECK(phrase_of(gap) == "The name of the village in Philipstown, New York.");
}

TEST_CASE("phrase is absent when both paths are empty or incomplete") {
    CHECK_FALSE(phrase_of({GapCategory::other, "", "x", ""}).has_value());
    CHECK_FALSE(phrase_of({GapCategory::other, "x", "", ""}).has_value());
    CHECK_FALSE(phrase_of({GapCategory::other, "  ", " ", " \t"}).has_value());
}

TEST_CASE("no gaps leaves the question unchanged") {
    auto q = build_query("Q?", {}, 1);
    CHECK(q.text == "Q?");
    CHECK(q.source_phrases.empty());
}

TEST_CASE("single relation gap appends its phrase with one space") {
    const std::string question =
        "Who did Fredric Rieders tesify agains that was later sentenced to three "
        "consecutive life terms?";
    GapItem gap{GapCategory::relation, "Fredric Rieders", "testified_against",
                "The person Fredric Rieders testified against."};
    auto q = build_query(question, {gap}, 1);
    CHECK(q.text == question + " Fredric Rieders testified against");
    REQUIRE(q.source_phrases.size() == 1);
    CHECK(q.source_phrases[0].gap_index == 0);
    CHECK(q.source_phrases[0].origin == PhraseOrigin::target_slot);
}

TEST_CASE("K limits how many phrases are appended, in judge order") {
    std::vector<GapItem> gaps = {
        {GapCategory::attribute, "A", "slot_one", ""},
        {GapCategory::attribute, "B", "slot_two", ""},
    };
    auto two = build_query("Q?", gaps, 2);
    CHECK(two.text == "Q? A slot one B slot two");
    REQUIRE(two.source_phrases.size() == 2);
    CHECK(two.source_phrases[0].gap_index == 0);
    CHECK(two.source_phrases[1].gap_index == 1);

    auto one = build_query("Q?", gaps, 1);
    CHECK(one.text == "Q? A slot one");
    CHECK(one.source_phrases.size() == 1);
}

TEST_CASE("invalid gaps are skipped when counting the first K phrases") {
    std::vector<GapItem> gaps = {
        {GapCategory::other, "", "", ""},  // unusable
        {GapCategory::relation, "C", "slot_three", ""},
    };
    auto q = build_query("Q?", gaps, 1);
    CHECK(q.text == "Q? C slot three");
    REQUIRE(q.source_phrases.size() == 1);
    CHECK(q.source_phrases[0].gap_index == 1);
}

TEST_CASE("all-invalid gaps fall back to the bare question") {
    std::vector<GapItem> gaps = {{GapCategory::other, "", "", ""},
                                 {GapCategory::other, " ", "x", ""}};
    auto q = build_query("Q?", gaps, 3);
    CHECK(q.text == "Q?");
    CHECK(q.source_phrases.empty());
}

TEST_CASE("output always keeps the question as a prefix and is deterministic") {
    std::vector<GapItem> gaps = {{GapCategory::relation, "T", "s", ""},
                                 {GapCategory::attribute, "", "", "a description"}};
    for (int k = 1; k <= 4; ++k) {
        auto a = build_query("Some question?", gaps, k);
        auto b = build_query("Some question?", gaps, k);
        CHECK(a.text == b.text);
        CHECK(a.text.rfind("Some question?", 0) == 0);
        CHECK(a.source_phrases.size() ==
              std::min<std::size_t>(static_cast<std::size_t>(k), 2));
    }
}
