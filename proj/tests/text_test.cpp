#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "grag/text.hpp"

using namespace grag;

TEST_CASE("word spans cover words with exact offsets") {
    auto spans = text::word_spans("  alpha beta\tgamma ");
    REQUIRE(spans.size() == 3);
    CHECK(spans[0].start == 2);
    CHECK(spans[0].end == 7);
    CHECK(spans[2].start == 13);
    CHECK(spans[2].end == 18);
}

TEST_CASE("token estimate rounds words times 1.3") {
    CHECK(text::token_estimate("") == 0);
    CHECK(text::token_estimate("one") == 1);
    CHECK(text::token_estimate("one two three") == 4);      // 3.9 -> 4
    CHECK(text::token_estimate("a b c d e f g h i j") == 13);
}

TEST_CASE("truncate_to_tokens keeps word boundaries within budget") {
    const std::string body = "alpha beta gamma delta epsilon zeta";
    auto cut = text::truncate_to_tokens(body, 4);  // 3 words -> 3.9 tokens
    CHECK(cut == "alpha beta gamma");
    CHECK(text::token_estimate(cut) <= 4);
    CHECK(text::truncate_to_tokens(body, 100) == body);
    CHECK(text::truncate_to_tokens(body, 0) == "");
}

TEST_CASE("normalization collapses case and whitespace") {
    CHECK(text::normalize_whitespace("  a \t b\n c  ") == "a b c");
    CHECK(text::normalize_for_match("  Foo   BAR ") == "foo bar");
    CHECK(text::contains_normalized("The answer is  PARIS, clearly.", "paris"));
    CHECK(text::contains_normalized("I  Cannot   Answer the question", "i cannot answer"));
    CHECK_FALSE(text::contains_normalized("nothing here", "paris"));
}
