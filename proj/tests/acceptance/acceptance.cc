// One line per acceptance criterion; exits non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "api_contract.h"
#include "oracles.h"
#include "pivotqg/answers/span.h"
#include "pivotqg/filter/filter.h"
#include "pivotqg/grouping/facets.h"
#include "pivotqg/grouping/porter_stemmer.h"
#include "pivotqg/nn/sparsemax.h"
#include "pivotqg/qg/beam_search.h"
#include "pivotqg/qg/model.h"
#include "pivotqg/qg/trainer.h"
#include "pivotqg/service/config.h"
#include "pivotqg/text/review.h"
#include "toy_data.h"

using namespace pivotqg;

namespace {

// Tolerances and budgets.
constexpr double kSparsemaxTol = 1e-6;
constexpr double kSparsemaxBudgetS = 10.0;
constexpr double kGradientRelTol = 1e-3;
constexpr double kGradientFloor = 1e-6;
constexpr double kGradientStep = 1e-6;
constexpr double kSupportMargin = 1e-3;
constexpr double kCopyAccuracy = 0.9;
constexpr double kCopyBudgetS = 300.0;
constexpr double kConfidenceTol = 1e-12;
constexpr double kFilterAccuracy = 0.9;
constexpr double kFilterBudgetS = 120.0;

struct Outcome {
  bool ok = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome sparsemax_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = std::uniform_int_distribution<Eigen::Index>(2, 10)(rng);
    const auto z = random_vector(rng, n, trial % 2 ? 1.0 : 3.0);
    worst = std::max(worst, (nn::sparsemax(z) - oracle::simplex_projection(z)).lpNorm<Eigen::Infinity>());
  }
  const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> worked = {
      {vec({0, 0}), vec({0.5, 0.5})}, {vec({3, 0, 0}), vec({1, 0, 0})}, {vec({0.5, 0.1}), vec({0.7, 0.3})}};
  for (const auto& [z, p] : worked) {
    worst = std::max(worst, (nn::sparsemax(z) - p).lpNorm<Eigen::Infinity>());
  }
  std::size_t qp = 0;
  for (const auto& c : oracle::load_sparsemax_cases()) {
    worst = std::max(worst, (nn::sparsemax(c.z) - c.p).lpNorm<Eigen::Infinity>());
    ++qp;
  }
  const double secs = seconds_since(t0);
  return {worst <= kSparsemaxTol && secs < kSparsemaxBudgetS && qp > 0,
          fmt("1000 random + 3 worked + %zu QP cases, max Linf %.2e (tol %.0e), %.2f s", qp, worst,
              kSparsemaxTol, secs)};
}

Outcome sparsemax_gradient() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(202);
  double worst = 0.0;
  int points = 0;
  while (points < 100) {
    const auto n = std::uniform_int_distribution<Eigen::Index>(2, 10)(rng);
    const auto z = random_vector(rng, n, 1.0);
    const double tau = nn::sparsemax_threshold(z);
    if (((z.array() - tau).abs() < kSupportMargin).any()) continue;
    const auto g = random_vector(rng, n, 1.0);
    const auto analytic = nn::sparsemax_backward(nn::sparsemax(z), g);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd up = z, down = z;
      up(i) += kGradientStep;
      down(i) -= kGradientStep;
      const double numeric =
          (g.dot(nn::sparsemax(up)) - g.dot(nn::sparsemax(down))) / (2 * kGradientStep);
      const double rel = std::abs(numeric - analytic(i)) /
                         std::max({std::abs(numeric), std::abs(analytic(i)), kGradientFloor});
      worst = std::max(worst, rel);
    }
    ++points;
  }
  const double secs = seconds_since(t0);
  return {worst <= kGradientRelTol && secs < kSparsemaxBudgetS,
          fmt("100 support-stable points, max relative error %.2e (tol %.0e), %.2f s", worst,
              kGradientRelTol, secs)};
}

Outcome copy_task() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto task = toy::make_copy_task(1, 500, 100);
  const auto config = toy::toy_config();
  qg::QGModel model(config, task.vocab);
  qg::train(model, task.train);
  const auto score = toy::evaluate_copy(model, task.heldout);
  const double secs = seconds_since(t0);
  return {config.hidden_size == 32 && task.vocab.size() <= 54 && score.token_accuracy >= kCopyAccuracy &&
              score.oov_positions > 0 && score.oov_accuracy >= kCopyAccuracy && secs < kCopyBudgetS,
          fmt("hidden %d, 500 train, held-out token accuracy %.3f, OOV copy %.3f over %zu positions, "
              "%.1f s",
              config.hidden_size, score.token_accuracy, score.oov_accuracy, score.oov_positions, secs)};
}

Outcome beam_oracle() {
  int agree = 0;
  for (unsigned seed = 1; seed <= 50; ++seed) {
    const long vocab = 2 + seed % 3;             // 2..4 including the end token
    const std::size_t max_len = 1 + seed % 4;    // 1..4
    oracle::TableStepModel table(1000 + seed, vocab, vocab - 1, seed % 2 ? 0.2 : 0.0);
    const auto exhaustive = oracle::enumerate_sequences(table, max_len);
    const auto width = static_cast<std::size_t>(std::pow(vocab, max_len));
    const auto beam = qg::beam_search(table, {width, max_len, false});
    agree += !beam.empty() && !exhaustive.empty() && beam[0].tokens == exhaustive[0].tokens &&
             beam[0].score == exhaustive[0].score;
  }
  return {agree == 50, fmt("%d/50 parameterizations equal the exhaustive argmax", agree)};
}

Outcome confidence_formulas() {
  const double c0 = intra_confidence(0.0);
  const double c3 = intra_confidence(std::log(3.0));
  const auto inter = inter_confidence({0.2, 0.9, 0.5, 0.2});
  const auto flat = inter_confidence({0.4, 0.4, 0.4});
  const bool ok = std::abs(c0 - 0.5) <= kConfidenceTol && std::abs(c3 - 0.75) <= kConfidenceTol &&
                  inter[0] == 0.0 && inter[3] == 0.0 && inter[1] == 1.0 &&
                  flat == std::vector<double>{1.0, 1.0, 1.0};
  return {ok, fmt("intra(0)=%.15f intra(ln 3)=%.15f, inter endpoints exact, degenerate all 1.0", c0, c3)};
}

Outcome filter_oracle() {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> d(0.0, 1.0);
  int exact = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const auto h = std::uniform_int_distribution<Eigen::Index>(1, 4)(rng);
    const auto n = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    const auto begin = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
    const auto stop = std::uniform_int_distribution<std::size_t>(begin + 1, n)(rng);
    Eigen::MatrixXd states(h, static_cast<Eigen::Index>(n));
    Eigen::VectorXd s(h), e(h);
    for (Eigen::Index i = 0; i < states.size(); ++i) states.data()[i] = d(rng);
    for (Eigen::Index i = 0; i < h; ++i) {
      s(i) = d(rng);
      e(i) = d(rng);
    }
    const auto got = filter::score_spans(s, e, states, begin, stop, n);
    const auto want = oracle::brute_force_spans(s, e, states, begin, stop, n);
    exact += got.s_null == want.s_null && got.s_best == want.s_best &&
             got.best_start == want.best_start && got.best_end == want.best_end;
  }
  Eigen::MatrixXd states(2, 3);
  states << 1, 2, 0,
            1, 0, 2;
  const auto w = filter::score_spans(vec({1, 0}), vec({0, 1}), states, 1, 3, 30);
  const bool worked = w.s_null == 2.0 && w.s_best == 4.0 && w.best_start == 1 && w.best_end == 2;
  return {exact == trials && worked,
          fmt("%d/%d random cases exact; worked example s_null=%g s_best=%g span=(%zu,%zu)", exact,
              trials, w.s_null, w.s_best, w.best_start, w.best_end)};
}

Outcome calibration() {
  std::mt19937_64 rng(404);
  int optimal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<filter::CalibrationPoint> pts(std::uniform_int_distribution<std::size_t>(2, 30)(rng));
    for (auto& p : pts) {
      p.diff = trial % 2 ? std::uniform_int_distribution<int>(-8, 8)(rng) * 0.5
                         : std::normal_distribution<double>(0.0, 2.0)(rng);
      p.answerable = std::bernoulli_distribution(0.5)(rng);
    }
    pts[0].answerable = true;
    pts[1].answerable = false;
    const auto c = filter::calibrate_threshold(pts);
    const double best = oracle::best_sweep_accuracy(pts);
    optimal += !c.degenerate && c.accuracy == best && oracle::accuracy_at(pts, c.threshold) == best;
  }
  return {optimal == 100, fmt("%d/100 labeled sets reach the exhaustive-sweep maximum", optimal)};
}

Outcome filter_learnability() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto train = toy::make_filter_task(11, 200);
  const auto calib = toy::make_filter_task(12, 100);
  const auto valid = toy::make_filter_task(13, 200);
  const auto cfg = toy::toy_filter_config();
  filter::SpanScoringModel model(
      cfg, std::make_unique<filter::ToyContextEncoder>(cfg, filter::filter_vocabulary(train, 1000)));
  filter::finetune_filter(model, train);
  const auto cal = filter::calibrate_threshold(filter::calibration_points(model, calib));
  const double acc = oracle::accuracy_at(filter::calibration_points(model, valid), cal.threshold);
  const double secs = seconds_since(t0);
  return {acc >= kFilterAccuracy && secs < kFilterBudgetS,
          fmt("validation accuracy %.3f at V=%.4f, %.1f s", acc, cal.threshold, secs)};
}

Outcome bio_round_trip() {
  const Paragraph p = tokenize(
      "one two three four five six seven eight nine ten eleven twelve thirteen fourteen "
      "fifteen sixteen seventeen eighteen nineteen twenty");
  std::size_t total = 0, same = 0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    for (std::size_t b = a; b < p.size(); ++b) {
      const auto span = span_from_tokens(p, {a, b}, SpanSource::Custom);
      same += decode_bio(encode_bio(p, span)) == TokenRange{a, b};
      ++total;
    }
  }
  return {p.size() == 20 && total == 210 && same == total, fmt("%zu/%zu spans", same, total)};
}

Outcome faceting_example() {
  const Paragraph p = tokenize("Packet switching differs from the switches used in circuits.");
  auto q = [](const std::string& id, double score) {
    GeneratedQuestion g;
    g.id = id;
    g.tokens = {id, "?"};
    g.beam_score = score;
    g.intra_confidence = intra_confidence(score);
    return g;
  };
  AnswerResult a1{"a1", span_from_tokens(p, {1, 1}, SpanSource::Custom), {q("q1", -1.0)}};
  AnswerResult a2{"a2", span_from_tokens(p, {5, 5}, SpanSource::Custom), {q("q2", -2.0)}};
  const auto facets = group_by_stem({a1, a2});
  const bool ok = facets.size() == 1 && facets[0].stem == "switch" && facets[0].members.size() == 2 &&
                  porter_stem("switching") == "switch" && porter_stem("switches") == "switch";
  return {ok, fmt("%zu facet(s), stem '%s'", facets.size(),
                  facets.empty() ? "" : facets[0].stem.c_str())};
}

Outcome review_recall() {
  std::size_t annotated = 0, found = 0, extra = 0, rows = 0;
  for (const auto& c : oracle::load_review_corpus()) {
    ++rows;
    const auto flags = review_paragraph(c.text);
    for (const auto& want : c.flags) {
      ++annotated;
      for (const auto& f : flags) {
        if (flag_kind_name(f.kind) == want.kind && f.range == CharRange{want.start, want.end}) {
          ++found;
          break;
        }
      }
    }
    extra += flags.size() > c.flags.size() ? flags.size() - c.flags.size() : 0;
  }
  return {rows == 50 && annotated > 0 && found == annotated,
          fmt("%zu/%zu annotated spans flagged with exact offsets over %zu strings (%zu extra)", found,
              annotated, rows, extra)};
}

Outcome config_defaults() {
  const auto c = service::load_app_config(std::string(PIVOTQG_SOURCE_DIR) + "/configs/default.json",
                                          [](const std::string&) { return std::nullopt; });
  const bool ok = c.qg.encoder_layers == 2 && c.qg.decoder_layers == 1 && c.qg.hidden_size == 600 &&
                  c.qg.embedding_dim == 300 && c.qg.dropout == 0.3 && c.qg.learning_rate == 0.1 &&
                  c.qg.epochs == 20 && c.qg.batch_size == 64 && c.filter.epochs == 3 &&
                  c.filter.learning_rate == 3e-5 && c.filter.batch_size == 12;
  return {ok, fmt("encoder %d, decoder %d, hidden %d, embedding %d, dropout %g, lr %g, epochs %d, "
                  "batch %d; filter epochs %d, lr %g, batch %d",
                  c.qg.encoder_layers, c.qg.decoder_layers, c.qg.hidden_size, c.qg.embedding_dim,
                  c.qg.dropout, c.qg.learning_rate, c.qg.epochs, c.qg.batch_size, c.filter.epochs,
                  c.filter.learning_rate, c.filter.batch_size)};
}

Outcome api_contract() {
  const auto checks = contract::run_api_contract("acceptance_work");
  std::size_t passed = 0;
  std::string failed;
  for (const auto& c : checks) {
    if (c.ok) {
      ++passed;
    } else {
      failed += "\n      failed: " + c.name + " " + c.detail.substr(0, 200);
    }
  }
  return {!checks.empty() && passed == checks.size(),
          fmt("%zu/%zu lifecycle checks over HTTP", passed, checks.size()) + failed};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"sparsemax oracle equivalence", sparsemax_oracle},
      {"sparsemax gradient check", sparsemax_gradient},
      {"copy-task training", copy_task},
      {"beam-search oracle", beam_oracle},
      {"confidence formulas", confidence_formulas},
      {"filter scoring oracle", filter_oracle},
      {"threshold calibration optimality", calibration},
      {"filter learnability", filter_learnability},
      {"BIO round trip", bio_round_trip},
      {"faceting switching/switches", faceting_example},
      {"review recall", review_recall},
      {"config defaults", config_defaults},
      {"API contract suite", api_contract},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    failures += !out.ok;
    std::printf("%s  %-34s %s\n", out.ok ? "PASS" : "FAIL", name.c_str(), out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
