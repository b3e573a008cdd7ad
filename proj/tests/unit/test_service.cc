#include <doctest.h>

#include <filesystem>
#include <map>

#include "api_contract.h"
#include "pivotqg/common/error.h"
#include "pivotqg/service/config.h"
#include "pivotqg/service/service.h"
#include "pivotqg/service/session.h"
#include "pivotqg/service/store.h"
#include "pivotqg/text/review.h"

using namespace pivotqg;
using namespace pivotqg::service;

namespace {

EnvLookup env_from(std::map<std::string, std::string> vars) {
  return [vars](const std::string& name) -> std::optional<std::string> {
    auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

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

TEST_CASE("default config file matches the built-in defaults") {
  const auto loaded = load_app_config(std::string(PIVOTQG_SOURCE_DIR) + "/configs/default.json",
                                      env_from({}));
  CHECK(nlohmann::json(loaded) == nlohmann::json(AppConfig{}));
  CHECK(loaded.qg.encoder_layers == 2);
  CHECK(loaded.qg.decoder_layers == 1);
  CHECK(loaded.qg.hidden_size == 600);
  CHECK(loaded.qg.embedding_dim == 300);
  CHECK(loaded.qg.dropout == 0.3);
  CHECK(loaded.qg.learning_rate == 0.1);
  CHECK(loaded.qg.epochs == 20);
  CHECK(loaded.qg.batch_size == 64);
  CHECK(loaded.filter.epochs == 3);
  CHECK(loaded.filter.learning_rate == 3e-5);
  CHECK(loaded.filter.batch_size == 12);
}

TEST_CASE("environment overrides") {
  const auto c = load_app_config("", env_from({{"PIVOTQG_PORT", "9001"},
                                               {"PIVOTQG_BEAM_WIDTH", "7"},
                                               {"PIVOTQG_ANSWERABILITY_THRESHOLD", "-1.5"},
                                               {"PIVOTQG_QG_CHECKPOINT", "/m.ckpt"},
                                               {"PIVOTQG_INTRA_THRESHOLD", "0.25"}}));
  CHECK(c.service.port == 9001);
  CHECK(c.service.beam_width == 7);
  CHECK(c.service.answerability_threshold == -1.5);
  CHECK(c.service.qg_checkpoint == "/m.ckpt");
  CHECK(c.service.intra_threshold == 0.25);
  CHECK(error_of([] { load_app_config("", env_from({{"PIVOTQG_PORT", "80a"}})); }) ==
        Errc::InvalidConfig);
  CHECK(error_of([] { load_app_config("", env_from({{"PIVOTQG_INTER_THRESHOLD", "2"}})); }) ==
        Errc::InvalidConfig);
  CHECK(error_of([] { load_app_config("/no/such/file.json", env_from({})); }) ==
        Errc::InvalidConfig);
}

TEST_CASE("config json rejects unknown keys and sections") {
  CHECK_THROWS_AS((nlohmann::json{{"service", {{"prot", 1}}}}.get<AppConfig>()), Error);
  CHECK_THROWS_AS((nlohmann::json{{"ui", nlohmann::json::object()}}.get<AppConfig>()), Error);
  const auto partial = nlohmann::json{{"service", {{"port", 1234}}}}.get<AppConfig>();
  CHECK(partial.service.port == 1234);
  CHECK(partial.qg.hidden_size == 600);
}

TEST_CASE("error codes map to http statuses") {
  CHECK(http_status(Errc::EmptyInput) == 400);
  CHECK(http_status(Errc::NotFound) == 404);
  CHECK(http_status(Errc::OverlappingEdits) == 409);
  CHECK(http_status(Errc::UnresolvedFlags) == 409);
  CHECK(http_status(Errc::InvalidSpan) == 422);
  CHECK(http_status(Errc::UnknownFormat) == 422);
  CHECK(http_status(Errc::AnnotatorUnavailable) == 502);
  CHECK(http_status(Errc::ModelUnavailable) == 503);
  CHECK(http_status(Errc::DivergedLoss) == 500);
}

TEST_CASE("session json round trip and store persistence") {
  const std::string db = "test_service_store.db";
  std::filesystem::remove(db);
  Session s;
  s.id = "abc";
  s.paragraph = tokenize("Gandhi was born in 1869.", s.id);
  s.flags = review_paragraph("café");
  s.knobs = {0.25, 0.5};
  s.created_at = now_iso8601();
  GeneratedQuestion q;
  q.id = "q1";
  q.tokens = {"when", "?"};
  q.beam_score = -0.7;
  q.intra_confidence = 0.33;
  q.attention = Eigen::MatrixXd::Constant(2, 6, 1.0 / 6);
  q.answer = span_from_tokens(s.paragraph, {4, 4}, SpanSource::NamedEntity);
  s.results = group_by_stem({{"a1", q.answer, {q}}});
  s.question_history["q1"] = {{"when ?", s.created_at, ""}};
  s.filtered_out.push_back({q, "a1", filter::verdict({5.0, 1.0, 4, 4}, 0.0)});
  const nlohmann::json j = s;
  CHECK(nlohmann::json(j.get<Session>()) == j);
  {
    SessionStore store(db);
    store.put(s);
    CHECK(store.size() == 1);
  }
  {
    SessionStore store(db);
    const auto back = store.get("abc");
    REQUIRE(back.has_value());
    CHECK(nlohmann::json(*back) == j);
    CHECK(back->paragraph.tokens == s.paragraph.tokens);
    CHECK_FALSE(store.get("missing").has_value());
    CHECK(store.erase("abc"));
    CHECK_FALSE(store.get("abc").has_value());
  }
  std::filesystem::remove(db);
}

TEST_CASE("timestamps are ISO 8601 UTC") {
  const auto t = now_iso8601();
  CHECK(t.size() == 24);
  CHECK(t[10] == 'T');
  CHECK(t.back() == 'Z');
}

TEST_CASE("API contract over HTTP") {
  const auto checks = contract::run_api_contract("test_service_work");
  CHECK(checks.size() > 30);
  for (const auto& c : checks) {
    CAPTURE(c.name);
    CAPTURE(c.detail);
    CHECK(c.ok);
  }
}
