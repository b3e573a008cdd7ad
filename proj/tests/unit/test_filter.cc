#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "oracles.h"
#include "pivotqg/common/error.h"
#include "pivotqg/filter/filter.h"
#include "pivotqg/text/review.h"
#include "toy_data.h"

using namespace pivotqg;
using namespace pivotqg::filter;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
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

SpanScoringModel toy_model(const std::vector<FilterExample>& data, FilterConfig cfg) {
  return SpanScoringModel(cfg, std::make_unique<ToyContextEncoder>(cfg, filter_vocabulary(data, 1000)));
}

}  // namespace

TEST_CASE("packing layout") {
  const auto p = pack({"who", "?"}, {"Gandhi", "."}, 384);
  CHECK(p.tokens == std::vector<std::string>{"[CLS]", "who", "?", "[SEP]", "Gandhi", ".", "[SEP]"});
  CHECK(p.segment_ids == std::vector<int>{0, 0, 0, 0, 1, 1, 1});
  CHECK(p.paragraph_begin == 4);
  CHECK(p.paragraph_end == 6);
  CHECK(p.paragraph_token_index == std::vector<long>{-1, -1, -1, -1, 0, 1, -1});
}

TEST_CASE("packing truncates the paragraph tail") {
  const auto p = pack({"who", "?"}, {"a", "b", "c", "d", "e"}, 8);
  CHECK(p.size() == 8);
  CHECK(p.tokens == std::vector<std::string>{"[CLS]", "who", "?", "[SEP]", "a", "b", "c", "[SEP]"});
  CHECK(error_of([] { pack({}, {"a"}, 10); }) == Errc::EmptyInput);
  CHECK(error_of([] { pack({"a", "b", "c", "d", "e", "f", "g", "h"}, {"a"}, 10); }) ==
        Errc::QuestionTooLong);
}

TEST_CASE("span scores: worked example") {
  Eigen::MatrixXd states(2, 3);
  states << 1, 2, 0,
            1, 0, 2;
  const auto s = score_spans(vec({1, 0}), vec({0, 1}), states, 1, 3, 30);
  CHECK(s.s_null == 2.0);
  CHECK(s.s_best == 4.0);
  CHECK(s.best_start == 1);
  CHECK(s.best_end == 2);
  const auto v = verdict(s, 0.0);
  CHECK(v.diff() == -2.0);
  CHECK(v.answerable);
}

TEST_CASE("span scores: zero vectors and empty paragraph") {
  const Eigen::MatrixXd states = Eigen::MatrixXd::Random(3, 5);
  const auto s = score_spans(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3), states, 1, 5, 30);
  CHECK(s.s_null == 0.0);
  CHECK(s.s_best == 0.0);
  const auto empty = score_spans(vec({1, 1, 1}), vec({1, 1, 1}), states, 2, 2, 30);
  CHECK(std::isinf(empty.s_best));
  CHECK(empty.s_best < 0);
  CHECK_FALSE(verdict(empty, 1e9).answerable);
}

TEST_CASE("span scores equal brute-force enumeration exactly") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto h = std::uniform_int_distribution<Eigen::Index>(1, 4)(rng);
    const auto n = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    const auto begin = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
    const auto stop = std::uniform_int_distribution<std::size_t>(begin, n)(rng);
    const auto cap = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    Eigen::MatrixXd states(h, static_cast<Eigen::Index>(n));
    Eigen::VectorXd s(h), e(h);
    for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = d(rng);
    for (Eigen::Index i = 0; i < h; ++i) {
      s(i) = d(rng);
      e(i) = d(rng);
    }
    const auto got = score_spans(s, e, states, begin, stop, cap);
    const auto want = oracle::brute_force_spans(s, e, states, begin, stop, cap);
    CHECK(got.s_null == want.s_null);
    CHECK(got.s_best == want.s_best);
    if (begin < stop) {
      CHECK(got.best_start == want.best_start);
      CHECK(got.best_end == want.best_end);
      CHECK(got.best_end >= got.best_start);
      CHECK(got.best_end - got.best_start < cap);
    }
  }
}

TEST_CASE("verdict boundaries") {
  SpanScores s;
  s.s_null = 5;
  s.s_best = 1;
  CHECK_FALSE(verdict(s, 0.0).answerable);
  CHECK(verdict(s, 4.0).answerable);
  CHECK_FALSE(verdict(s, std::nextafter(4.0, 0.0)).answerable);
}

TEST_CASE("raising V never removes an answerable verdict") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> d(0.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    SpanScores s;
    s.s_null = d(rng);
    s.s_best = d(rng);
    const double v1 = d(rng);
    const double v2 = v1 + std::abs(d(rng));
    if (verdict(s, v1).answerable) CHECK(verdict(s, v2).answerable);
  }
}

TEST_CASE("calibration examples") {
  const auto c = calibrate_threshold({{-3, true}, {-1, true}, {2, false}});
  CHECK(c.threshold == 0.5);
  CHECK(c.accuracy == 1.0);
  CHECK_FALSE(c.degenerate);

  const auto all = calibrate_threshold({{-3, true}, {1, true}});
  CHECK(all.degenerate);
  CHECK(std::isinf(all.threshold));
  CHECK(error_of([] { calibrate_threshold({}); }) == Errc::EmptyDataset);
}

TEST_CASE("calibration is optimal against an exhaustive sweep") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<CalibrationPoint> pts(std::uniform_int_distribution<std::size_t>(1, 25)(rng));
    for (auto& p : pts) {
      p.diff = std::uniform_int_distribution<int>(-6, 6)(rng) * 0.5;
      p.answerable = std::bernoulli_distribution(0.5)(rng);
    }
    const auto c = calibrate_threshold(pts);
    if (c.degenerate) continue;
    const double best = oracle::best_sweep_accuracy(pts);
    CHECK(c.accuracy == best);
    CHECK(oracle::accuracy_at(pts, c.threshold) == best);
  }
}

TEST_CASE("config defaults and json") {
  const FilterConfig c;
  CHECK(c.epochs == 3);
  CHECK(c.learning_rate == 3e-5);
  CHECK(c.batch_size == 12);
  const nlohmann::json j = c;
  CHECK(nlohmann::json(j.get<FilterConfig>()) == j);
  CHECK_THROWS_AS((nlohmann::json{{"epoch", 3}}.get<FilterConfig>()), Error);
  CHECK_THROWS_AS((nlohmann::json{{"batch_size", 0}}.get<FilterConfig>()), Error);
}

TEST_CASE("fine-tuning on an empty set fails") {
  const auto data = toy::make_filter_task(1, 4);
  auto model = toy_model(data, toy::toy_filter_config());
  CHECK(error_of([&] { finetune_filter(model, {}); }) == Errc::EmptyDataset);
}

TEST_CASE("unanswerable examples are supervised at [CLS]") {
  auto data = toy::make_filter_task(5, 40);
  std::vector<FilterExample> negatives;
  for (const auto& ex : data) {
    if (!ex.answerable) negatives.push_back(ex);
  }
  REQUIRE(!negatives.empty());
  auto cfg = toy::toy_filter_config();
  cfg.epochs = 3;
  auto model = toy_model(data, cfg);
  auto mean_diff = [&] {
    double s = 0.0;
    for (const auto& p : calibration_points(model, negatives)) s += p.diff;
    return s / static_cast<double>(negatives.size());
  };
  const double before = mean_diff();
  const auto stats = finetune_filter(model, negatives);
  for (const auto& st : stats) CHECK(std::isfinite(st.mean_loss));
  CHECK(mean_diff() > before);
}

TEST_CASE("toy encoder learns keyword-determined answerability") {
  const auto train = toy::make_filter_task(11, 200);
  const auto calib = toy::make_filter_task(12, 100);
  const auto valid = toy::make_filter_task(13, 200);
  auto model = toy_model(train, toy::toy_filter_config());
  for (const auto& st : finetune_filter(model, train)) CHECK(std::isfinite(st.mean_loss));
  const auto cal = calibrate_threshold(calibration_points(model, calib));
  CHECK(oracle::accuracy_at(calibration_points(model, valid), cal.threshold) >= 0.9);

  const std::string path = "test_filter_model.ckpt";
  model.save(path);
  const auto loaded = SpanScoringModel::load(path);
  std::remove(path.c_str());
  const auto a = calibration_points(model, valid);
  const auto b = calibration_points(loaded, valid);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].diff == b[i].diff);

  const Paragraph p = tokenize("f3 f4 1907 f8 .");
  const auto v = is_answerable(model, "when did f3 happen ?", p, cal.threshold);
  CHECK(v.threshold == cal.threshold);
  CHECK(v.answerable == (v.diff() <= cal.threshold));
}

TEST_CASE("squad 2.0 records become filter examples") {
  const std::string json = R"({"data": [{"paragraphs": [{"context": "Gandhi was born in 1869.",
    "qas": [
      {"id": "a", "question": "When was Gandhi born?", "answers": [{"text": "1869", "answer_start": 19}]},
      {"id": "b", "question": "Who built Mars?", "answers": [], "is_impossible": true}]}]}]})";
  const auto ex = filter_examples_from_squad(parse_squad(json));
  REQUIRE(ex.size() == 2);
  CHECK(ex[0].answerable);
  CHECK(ex[0].answer_first == 4);
  CHECK(ex[0].answer_last == 4);
  CHECK_FALSE(ex[1].answerable);
  CHECK(ex[1].paragraph.size() == 6);
}
