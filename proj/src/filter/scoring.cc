#include <algorithm>
#include <cmath>
#include <limits>

#include "pivotqg/common/error.h"
#include "pivotqg/filter/filter.h"

namespace pivotqg::filter {

PackedSequence pack(const std::vector<std::string>& question,
                    const std::vector<std::string>& paragraph, std::size_t max_len) {
  if (question.empty() || paragraph.empty()) {
    throw Error(Errc::EmptyInput, "question and paragraph must both have tokens");
  }
  if (max_len < 3 || question.size() > max_len - 3) {
    throw Error(Errc::QuestionTooLong, "question of " + std::to_string(question.size()) +
                                           " tokens does not fit a packed length of " +
                                           std::to_string(max_len));
  }
  const std::size_t room = max_len - 3 - question.size();
  const std::size_t kept = std::min(room, paragraph.size());

  PackedSequence p;
  auto push = [&p](const std::string& tok, int segment, long index) {
    p.tokens.push_back(tok);
    p.segment_ids.push_back(segment);
    p.paragraph_token_index.push_back(index);
  };
  push(kCls, 0, -1);
  for (const auto& t : question) push(t, 0, -1);
  push(kSep, 0, -1);
  p.paragraph_begin = p.tokens.size();
  for (std::size_t i = 0; i < kept; ++i) push(paragraph[i], 1, static_cast<long>(i));
  p.paragraph_end = p.tokens.size();
  push(kSep, 1, -1);
  return p;
}

namespace {

double dot(const Eigen::VectorXd& a, const Eigen::MatrixXd& m, Eigen::Index col) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) s += a(k) * m(k, col);
  return s;
}

}  // namespace

SpanScores score_spans(const Eigen::VectorXd& start, const Eigen::VectorXd& end,
                       const Eigen::MatrixXd& states, std::size_t begin, std::size_t stop,
                       std::size_t max_span_len) {
  if (start.size() != states.rows() || end.size() != states.rows() || states.cols() == 0) {
    throw Error(Errc::ShapeMismatch, "S, E and the hidden states disagree on H");
  }
  if (begin == 0 || begin > stop || stop > static_cast<std::size_t>(states.cols())) {
    throw Error(Errc::ShapeMismatch, "paragraph positions outside the packed sequence");
  }
  SpanScores out;
  out.s_null = dot(start, states, 0) + dot(end, states, 0);
  out.s_best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = begin; i < stop; ++i) {
    const double si = dot(start, states, static_cast<Eigen::Index>(i));
    for (std::size_t j = i; j < stop && j - i < max_span_len; ++j) {
      const double s = si + dot(end, states, static_cast<Eigen::Index>(j));
      if (s > out.s_best) {
        out.s_best = s;
        out.best_start = i;
        out.best_end = j;
      }
    }
  }
  return out;
}

FilterVerdict verdict(const SpanScores& scores, double threshold) {
  FilterVerdict v;
  v.scores = scores;
  v.threshold = threshold;
  v.answerable = v.diff() <= threshold;
  return v;
}

Calibration calibrate_threshold(const std::vector<CalibrationPoint>& validation) {
  if (validation.empty()) throw Error(Errc::EmptyDataset, "no validation examples");
  const bool any_yes = std::any_of(validation.begin(), validation.end(),
                                   [](const auto& p) { return p.answerable; });
  const bool any_no = std::any_of(validation.begin(), validation.end(),
                                  [](const auto& p) { return !p.answerable; });
  if (!any_yes || !any_no) {
    Calibration c;
    c.threshold = std::numeric_limits<double>::infinity();
    c.degenerate = true;
    c.accuracy = any_yes ? 1.0 : 0.0;
    for (const auto& p : validation) {
      if (std::isnan(p.diff)) throw Error(Errc::NonFiniteInput, "validation diff is NaN");
    }
    return c;
  }

  std::vector<double> diffs;
  for (const auto& p : validation) {
    if (std::isnan(p.diff)) throw Error(Errc::NonFiniteInput, "validation diff is NaN");
    if (std::isfinite(p.diff)) diffs.push_back(p.diff);
  }
  std::sort(diffs.begin(), diffs.end());
  diffs.erase(std::unique(diffs.begin(), diffs.end()), diffs.end());

  std::vector<double> candidates;
  if (diffs.empty()) {
    candidates.push_back(0.0);
  } else {
    candidates.push_back(diffs.front() - 1.0);
    for (std::size_t k = 1; k < diffs.size(); ++k) {
      candidates.push_back(diffs[k - 1] + (diffs[k] - diffs[k - 1]) / 2.0);
    }
    candidates.push_back(diffs.back() + 1.0);
  }

  Calibration best;
  best.accuracy = -1.0;
  for (double v : candidates) {
    std::size_t correct = 0;
    for (const auto& p : validation) correct += (p.diff <= v) == p.answerable;
    const double acc = static_cast<double>(correct) / static_cast<double>(validation.size());
    if (acc > best.accuracy) {
      best.accuracy = acc;
      best.threshold = v;
    }
  }
  return best;
}

}  // namespace pivotqg::filter
