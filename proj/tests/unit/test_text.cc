#include <doctest.h>

#include <random>

#include "oracles.h"
#include "pivotqg/common/error.h"
#include "pivotqg/common/utf8.h"
#include "pivotqg/text/review.h"
#include "pivotqg/text/squad.h"

using namespace pivotqg;

namespace {

std::vector<std::string> tokens_of(const std::string& text) { return tokenize(text).tokens; }

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::BadData;
}

}  // namespace

TEST_CASE("review: clean ascii text has no flags") {
  CHECK(review_paragraph("Gandhi was born in 1869.").empty());
}

TEST_CASE("review: non-ascii and url flags") {
  const auto flags = review_paragraph("café at http://x.io today");
  REQUIRE(flags.size() == 2);
  CHECK(flags[0].kind == FlagKind::NonAscii);
  CHECK(flags[0].range == CharRange{3, 4});
  CHECK(flags[0].excerpt == "é");
  CHECK(flags[1].kind == FlagKind::Url);
  CHECK(flags[1].excerpt == "http://x.io");
}

TEST_CASE("review: offsets are code points") {
  const auto flags = review_paragraph("naïve résumé");
  REQUIRE(flags.size() == 3);
  CHECK(flags[0].range == CharRange{2, 3});
  CHECK(flags[1].range == CharRange{7, 8});
  CHECK(flags[2].range == CharRange{11, 12});
}

TEST_CASE("review: url trailing punctuation and www prefix") {
  auto flags = review_paragraph("See www.example.org/a, then stop.");
  REQUIRE(flags.size() == 1);
  CHECK(flags[0].excerpt == "www.example.org/a");
  flags = review_paragraph("(https://a.b/c).");
  REQUIRE(flags.size() == 1);
  CHECK(flags[0].excerpt == "https://a.b/c");
  CHECK(review_paragraph("http:// alone").empty());
}

TEST_CASE("review: a url swallows its non-ascii characters") {
  const auto flags = review_paragraph("go to http://x.io/café now");
  REQUIRE(flags.size() == 1);
  CHECK(flags[0].kind == FlagKind::Url);
}

TEST_CASE("review: empty input") {
  CHECK(error_of([] { review_paragraph(""); }) == Errc::EmptyInput);
  CHECK(error_of([] { review_paragraph(" \n\t"); }) == Errc::EmptyInput);
  CHECK(error_of([] { review_paragraph(std::string("\xff\xfe")); }) == Errc::InvalidUtf8);
}

TEST_CASE("review: fixture corpus flags match exactly") {
  for (const auto& c : oracle::load_review_corpus()) {
    CAPTURE(c.text);
    const auto flags = review_paragraph(c.text);
    REQUIRE(flags.size() == c.flags.size());
    for (std::size_t i = 0; i < flags.size(); ++i) {
      CHECK(std::string(flag_kind_name(flags[i].kind)) == c.flags[i].kind);
      CHECK(flags[i].range == CharRange{c.flags[i].start, c.flags[i].end});
    }
  }
}

TEST_CASE("review: flags are sorted, disjoint and match their excerpts") {
  for (const auto& c : oracle::load_review_corpus()) {
    const auto text = utf8::decode(c.text);
    const auto flags = review_paragraph(c.text);
    for (std::size_t i = 0; i < flags.size(); ++i) {
      CHECK(utf8::encode(std::u32string_view(text).substr(flags[i].range.start,
                                                          flags[i].range.length())) ==
            flags[i].excerpt);
      if (flags[i].kind == FlagKind::NonAscii) {
        for (char32_t cp : utf8::decode(flags[i].excerpt)) CHECK(cp > 127);
      }
      if (i > 0) CHECK(flags[i - 1].range.end <= flags[i].range.start);
    }
  }
}

TEST_CASE("review: deleting every flag leaves no non-ascii flags") {
  for (const auto& c : oracle::load_review_corpus()) {
    std::vector<TextEdit> edits;
    for (const auto& f : review_paragraph(c.text)) edits.push_back({f.range, ""});
    const std::string cleaned = apply_edits(c.text, edits);
    bool blank = true;
    for (char ch : cleaned) blank = blank && std::isspace(static_cast<unsigned char>(ch));
    if (blank) continue;
    for (const auto& f : review_paragraph(cleaned)) CHECK(f.kind != FlagKind::NonAscii);
  }
}

TEST_CASE("apply_edits examples") {
  CHECK(apply_edits("café", {{{3, 4}, "e"}}) == "cafe");
  CHECK(apply_edits("some text", {}) == "some text");
  CHECK(apply_edits("a http://x b", {{{2, 10}, ""}}) == "a  b");
  CHECK(apply_edits("abcdef", {{{4, 5}, "E"}, {{0, 1}, "A"}}) == "AbcdEf");
}

TEST_CASE("apply_edits errors") {
  CHECK(error_of([] { apply_edits("abc", {{{0, 2}, ""}, {{1, 3}, ""}}); }) ==
        Errc::OverlappingEdits);
  CHECK(error_of([] { apply_edits("abc", {{{2, 9}, ""}}); }) == Errc::RangeOutOfBounds);
}

TEST_CASE("tokenize examples") {
  CHECK(tokens_of("Gandhi was born.") == std::vector<std::string>{"Gandhi", "was", "born", "."});
  CHECK(tokens_of("1909, India") == std::vector<std::string>{"1909", ",", "India"});
}

TEST_CASE("tokenize: offsets reconstruct the input") {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abcXYZ019 .,;:!?()'\"-\t\n";
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const int n = std::uniform_int_distribution<int>(1, 60)(rng);
    for (int k = 0; k < n; ++k) {
      s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    }
    if (s.find_first_not_of(" \t\n") == std::string::npos) continue;
    const Paragraph p = tokenize(s);
    std::size_t prev_end = 0;
    std::string rebuilt;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto r = p.token_offsets[i];
      CHECK(r.start >= prev_end);
      CHECK(r.end > r.start);
      CHECK(p.slice(r) == p.tokens[i]);
      rebuilt += s.substr(prev_end, r.start - prev_end) + p.tokens[i];
      prev_end = r.end;
    }
    rebuilt += s.substr(prev_end);
    CHECK(rebuilt == s);
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (char ch : p.tokens[i]) CHECK(!std::isspace(static_cast<unsigned char>(ch)));
    }
  }
}

TEST_CASE("squad: code-point offsets and impossible questions") {
  const std::string json = R"({"data": [{"title": "t", "paragraphs": [{
    "context": "Café Gandhi was born in 1869.",
    "qas": [
      {"id": "q1", "question": "When was he born?", "answers": [{"text": "1869", "answer_start": 24}]},
      {"id": "q2", "question": "Where is Mars?", "answers": [], "is_impossible": true}
    ]}]}]})";
  const auto data = parse_squad(json);
  REQUIRE(data.paragraphs.size() == 1);
  REQUIRE(data.records.size() == 2);
  REQUIRE(data.records[0].answer.has_value());
  CHECK(*data.records[0].answer == CharRange{24, 28});
  CHECK_FALSE(data.records[1].answer.has_value());
}

TEST_CASE("squad: mismatched answer text is rejected") {
  const std::string json = R"({"data": [{"paragraphs": [{"context": "abc def",
    "qas": [{"id": "q", "question": "x?", "answers": [{"text": "xyz", "answer_start": 0}]}]}]}]})";
  CHECK(error_of([&] { parse_squad(json); }) == Errc::BadData);
  CHECK(error_of([] { parse_squad("{not json"); }) == Errc::BadData);
}
