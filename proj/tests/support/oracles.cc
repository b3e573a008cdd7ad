#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pivotqg::oracle {

std::string data_path(const std::string& name) {
  return std::string(PIVOTQG_TEST_DATA) + "/" + name;
}

Eigen::VectorXd simplex_projection(const Eigen::VectorXd& z) {
  const auto n = z.size();
  Eigen::VectorXd best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        sum += z(i);
        ++k;
      }
    }
    const double shift = (sum - 1.0) / k;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    bool feasible = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        p(i) = z(i) - shift;
        if (p(i) < 0.0) feasible = false;
      }
    }
    if (!feasible) continue;
    const double dist = (p - z).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = p;
    }
  }
  return best;
}

namespace {

Eigen::VectorXd parse_vector(const std::string& field) {
  std::istringstream in(field);
  std::vector<double> v;
  double x;
  while (in >> x) v.push_back(x);
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::vector<SparsemaxCase> load_sparsemax_cases() {
  std::ifstream in(data_path("sparsemax_qp.tsv"));
  if (!in) throw std::runtime_error("missing sparsemax_qp.tsv");
  std::vector<SparsemaxCase> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    out.push_back({parse_vector(line.substr(0, tab)), parse_vector(line.substr(tab + 1))});
  }
  return out;
}

TableStepModel::TableStepModel(unsigned long long seed, long vocab, qg::TokenId eos,
                               double zero_rate)
    : seed_(seed), vocab_(vocab), eos_(eos), zero_rate_(zero_rate) {}

std::size_t TableStepModel::root() {
  auto [it, inserted] = handles_.emplace(std::vector<qg::TokenId>{}, prefixes_.size());
  if (inserted) prefixes_.emplace_back();
  return it->second;
}

std::pair<std::size_t, qg::StepResult> TableStepModel::step(std::size_t state, qg::TokenId prev) {
  std::vector<qg::TokenId> prefix = prefixes_.at(state);
  prefix.push_back(prev);
  auto [it, inserted] = handles_.emplace(prefix, prefixes_.size());
  if (inserted) prefixes_.push_back(prefix);
  qg::StepResult r;
  r.probs = table(prefix);
  return {it->second, std::move(r)};
}

Eigen::VectorXd TableStepModel::table(const std::vector<qg::TokenId>& prefix) const {
  std::vector<unsigned> key{static_cast<unsigned>(seed_), static_cast<unsigned>(seed_ >> 32)};
  for (auto t : prefix) key.push_back(static_cast<unsigned>(t));
  std::seed_seq seq(key.begin(), key.end());
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd w(vocab_);
  for (long k = 0; k < vocab_; ++k) {
    w(k) = u(rng);
    if (k != eos_ && u(rng) < zero_rate_) w(k) = 0.0;
  }
  return w / w.sum();
}

std::vector<ScoredSequence> enumerate_sequences(qg::StepModel& model, std::size_t max_len) {
  std::vector<ScoredSequence> out;
  std::vector<qg::TokenId> prefix;
  std::function<void(std::size_t, qg::TokenId, double)> visit = [&](std::size_t state,
                                                                    qg::TokenId prev,
                                                                    double score) {
    auto [next, result] = model.step(state, prev);
    for (Eigen::Index tok = 0; tok < result.probs.size(); ++tok) {
      const double p = result.probs(tok);
      if (!(p > 0.0)) continue;
      const double s = score + std::log(p);
      if (tok == model.eos()) {
        out.push_back({prefix, s});
      } else if (prefix.size() < max_len) {
        prefix.push_back(tok);
        visit(next, tok, s);
        prefix.pop_back();
      }
    }
  };
  visit(model.root(), model.bos(), 0.0);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.score > b.score; });
  return out;
}

filter::SpanScores brute_force_spans(const Eigen::VectorXd& start, const Eigen::VectorXd& end,
                                     const Eigen::MatrixXd& states, std::size_t begin,
                                     std::size_t stop, std::size_t max_span_len) {
  auto dot = [&](const Eigen::VectorXd& w, std::size_t col) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < w.size(); ++k) s += w(k) * states(k, static_cast<Eigen::Index>(col));
    return s;
  };
  filter::SpanScores out;
  out.s_null = dot(start, 0) + dot(end, 0);
  out.s_best = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t i = begin; i < stop; ++i) {
    for (std::size_t j = i; j < stop; ++j) {
      if (j - i >= max_span_len) continue;
      const double s = dot(start, i) + dot(end, j);
      if (s > out.s_best) {
        out.s_best = s;
        best = {{i, j}};
      } else if (s == out.s_best) {
        best.push_back({i, j});
      }
    }
  }
  if (!best.empty()) {
    out.best_start = best.front().first;
    out.best_end = best.front().second;
  }
  return out;
}

double accuracy_at(const std::vector<filter::CalibrationPoint>& points, double threshold) {
  std::size_t correct = 0;
  for (const auto& p : points) correct += ((p.diff <= threshold) == p.answerable) ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(points.size());
}

double best_sweep_accuracy(const std::vector<filter::CalibrationPoint>& points) {
  std::vector<double> thresholds{-std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity()};
  for (const auto& a : points) {
    thresholds.push_back(a.diff);
    for (const auto& b : points) thresholds.push_back(0.5 * (a.diff + b.diff));
  }
  double best = 0.0;
  for (double v : thresholds) best = std::max(best, accuracy_at(points, v));
  return best;
}

std::vector<ReviewCase> load_review_corpus() {
  std::ifstream in(data_path("review_corpus.jsonl"));
  if (!in) throw std::runtime_error("missing review_corpus.jsonl");
  std::vector<ReviewCase> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    ReviewCase c;
    c.text = j.at("text").get<std::string>();
    for (const auto& f : j.at("flags")) {
      c.flags.push_back({f.at("kind").get<std::string>(), f.at("start").get<std::size_t>(),
                         f.at("end").get<std::size_t>()});
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace pivotqg::oracle
