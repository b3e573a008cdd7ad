#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "oracles.h"
#include "pivotqg/answers/annotator.h"
#include "pivotqg/answers/span.h"
#include "pivotqg/common/error.h"
#include "pivotqg/text/review.h"

using namespace pivotqg;

namespace {

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::BadData;
}

std::string tags_of(const BioTaggedInput& in) {
  std::string s;
  for (auto t : in.tags) s += bio_tag_char(t);
  return s;
}

BioTaggedInput tagged(const std::string& tags) {
  BioTaggedInput in;
  for (char c : tags) {
    in.tokens.push_back("w");
    in.tags.push_back(c == 'B' ? BioTag::B : c == 'I' ? BioTag::I : BioTag::O);
  }
  return in;
}

const Paragraph kGandhi = tokenize("Gandhi was born in 1869.");

}  // namespace

TEST_CASE("candidates: golden annotator output") {
  std::ifstream in(oracle::data_path("annotator_golden.json"));
  REQUIRE(in);
  const auto golden = nlohmann::json::parse(in);
  HeuristicAnnotator annotator;
  for (const auto& entry : golden) {
    const Paragraph p = tokenize(entry.at("text").get<std::string>());
    CAPTURE(entry.at("text").get<std::string>());
    for (auto kind : {CandidateKind::NamedEntity, CandidateKind::NounPhrase}) {
      const auto spans = extract_candidates(p, kind, annotator);
      const auto& expected = entry.at(std::string(candidate_kind_name(kind)));
      REQUIRE(spans.size() == expected.size());
      for (std::size_t i = 0; i < spans.size(); ++i) {
        CHECK(spans[i].surface == expected[i].at("surface").get<std::string>());
        CHECK(spans[i].chars.start == expected[i].at("start").get<std::size_t>());
        CHECK(spans[i].chars.end == expected[i].at("end").get<std::size_t>());
      }
    }
  }
}

TEST_CASE("candidates: the Gandhi sentence yields its three entities") {
  HeuristicAnnotator annotator;
  const auto spans = extract_candidates(tokenize("Gandhi was born in India in 1869."),
                                        CandidateKind::NamedEntity, annotator);
  std::vector<std::string> surfaces;
  for (const auto& s : spans) surfaces.push_back(s.surface);
  CHECK(surfaces == std::vector<std::string>{"Gandhi", "India", "1869"});
  for (const auto& s : spans) CHECK(s.source == SpanSource::NamedEntity);
}

TEST_CASE("candidates: no entities and empty input") {
  HeuristicAnnotator annotator;
  CHECK(extract_candidates(tokenize("it rains"), CandidateKind::NamedEntity, annotator).empty());
  CHECK(error_of([&] {
          extract_candidates(tokenize(""), CandidateKind::NamedEntity, annotator);
        }) == Errc::EmptyInput);
}

TEST_CASE("candidates: every candidate is already token aligned") {
  HeuristicAnnotator annotator;
  const Paragraph p = tokenize(
      "The salt march began in 1930 and the long campaign spread across the country. "
      "Mohandas Gandhi wrote a short book about self-rule in 1909.");
  for (auto kind : {CandidateKind::NamedEntity, CandidateKind::NounPhrase}) {
    for (const auto& span : extract_candidates(p, kind, annotator)) {
      AnswerSpan again = validate_custom_span(p, span.chars);
      again.source = span.source;
      CHECK(again == span);
    }
  }
}

TEST_CASE("candidate kind names") {
  CHECK(parse_candidate_kind("named_entity") == CandidateKind::NamedEntity);
  CHECK(parse_candidate_kind("noun_phrase") == CandidateKind::NounPhrase);
  CHECK_THROWS(parse_candidate_kind("verbs"));
}

TEST_CASE("custom spans snap outward to token boundaries") {
  const Paragraph p = tokenize("Gandhi was born in India in 1869.");
  auto span = validate_custom_span(p, {28, 32});
  CHECK(span.surface == "1869");
  CHECK(span.source == SpanSource::Custom);
  span = validate_custom_span(p, {29, 31});
  CHECK(span.surface == "1869");
  span = validate_custom_span(p, {16, 22});  // "in Ind"
  CHECK(span.surface == "in India");
  CHECK(span.tokens == TokenRange{3, 4});
}

TEST_CASE("custom span errors") {
  const Paragraph p = tokenize("Gandhi was born.");
  CHECK(error_of([&] { validate_custom_span(p, {3, 3}); }) == Errc::EmptySpan);
  CHECK(error_of([&] { validate_custom_span(p, {3, 99}); }) == Errc::RangeOutOfBounds);
  CHECK(error_of([&] { validate_custom_span(p, {6, 7}); }) == Errc::EmptySpan);  // whitespace only
}

TEST_CASE("BIO encoding examples") {
  CHECK(tags_of(encode_bio(kGandhi, validate_custom_span(kGandhi, {19, 23}))) == "OOOOBO");
  CHECK(tags_of(encode_bio(kGandhi, validate_custom_span(kGandhi, {0, 6}))) == "BOOOOO");
  CHECK(tags_of(encode_bio(kGandhi, validate_custom_span(kGandhi, {11, 23}))) == "OOBIIO");
  CHECK(encode_bio(kGandhi, validate_custom_span(kGandhi, {0, 6})).tokens == kGandhi.tokens);
}

TEST_CASE("BIO decoding examples") {
  CHECK(decode_bio(tagged("OOBIO")) == TokenRange{2, 3});
  CHECK(decode_bio(tagged("BOO")) == TokenRange{0, 0});
  CHECK(error_of([] { decode_bio(tagged("OIO")); }) == Errc::MalformedTags);
  CHECK(error_of([] { decode_bio(tagged("OOO")); }) == Errc::MalformedTags);
  CHECK(error_of([] { decode_bio(tagged("BOB")); }) == Errc::MalformedTags);
  CHECK(error_of([] { decode_bio(tagged("BIOI")); }) == Errc::MalformedTags);
}

TEST_CASE("BIO round trip over every span of a 20-token paragraph") {
  const Paragraph p = tokenize(
      "one two three four five six seven eight nine ten eleven twelve thirteen fourteen "
      "fifteen sixteen seventeen eighteen nineteen twenty");
  REQUIRE(p.size() == 20);
  std::size_t checked = 0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    for (std::size_t b = a; b < p.size(); ++b) {
      const auto span = span_from_tokens(p, {a, b}, SpanSource::Custom);
      CHECK(decode_bio(encode_bio(p, span)) == TokenRange{a, b});
      ++checked;
    }
  }
  CHECK(checked == 210);
}
