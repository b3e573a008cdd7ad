#include "pivotqg/grouping/facets.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "pivotqg/common/error.h"
#include "pivotqg/grouping/porter_stemmer.h"

namespace pivotqg {

std::string GeneratedQuestion::text() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

double intra_confidence(double beam_score) {
  if (!std::isfinite(beam_score)) {
    throw Error(Errc::NonFiniteInput, "beam score must be finite");
  }
  if (beam_score >= 0.0) return 1.0 / (1.0 + std::exp(-beam_score));
  const double e = std::exp(beam_score);
  return e / (1.0 + e);
}

std::vector<double> inter_confidence(const std::vector<double>& best_per_answer) {
  if (best_per_answer.empty()) {
    throw Error(Errc::EmptyInput, "inter confidence needs at least one answer");
  }
  const auto [lo, hi] = std::minmax_element(best_per_answer.begin(), best_per_answer.end());
  const double min = *lo;
  const double max = *hi;
  std::vector<double> out;
  out.reserve(best_per_answer.size());
  for (double p : best_per_answer) {
    out.push_back(max == min ? 1.0 : (p - min) / (max - min));
  }
  return out;
}

namespace {

void sort_questions(std::vector<GeneratedQuestion>& qs) {
  std::stable_sort(qs.begin(), qs.end(), [](const auto& a, const auto& b) {
    return a.intra_confidence > b.intra_confidence;
  });
}

}  // namespace

std::vector<QuestionFacet> group_by_stem(std::vector<AnswerResult> results) {
  std::vector<AnswerResult> kept;
  for (auto& r : results) {
    if (r.answer.surface.empty()) throw Error(Errc::EmptySpan, "answer surface is empty");
    if (!r.questions.empty()) kept.push_back(std::move(r));
  }
  if (kept.empty()) return {};

  std::vector<double> best;
  best.reserve(kept.size());
  for (const auto& r : kept) {
    double b = 0.0;
    for (const auto& q : r.questions) b = std::max(b, q.intra_confidence);
    best.push_back(b);
  }
  const auto inter = inter_confidence(best);

  std::vector<QuestionFacet> facets;
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    auto& r = kept[k];
    const std::string key = stem_key(r.answer.surface);
    auto [it, inserted] = index.emplace(key, facets.size());
    if (inserted) facets.push_back({key, 0.0, {}});
    FacetMember m{std::move(r.answer_id), std::move(r.answer), inter[k], std::move(r.questions)};
    sort_questions(m.questions);
    facets[it->second].members.push_back(std::move(m));
  }

  auto by_confidence_then_position = [](double ca, double cb, std::size_t pa, std::size_t pb) {
    if (ca != cb) return ca > cb;
    return pa < pb;
  };
  for (auto& f : facets) {
    std::stable_sort(f.members.begin(), f.members.end(), [&](const auto& a, const auto& b) {
      return by_confidence_then_position(a.inter_confidence, b.inter_confidence,
                                         a.answer.chars.start, b.answer.chars.start);
    });
    f.inter_confidence = f.members.front().inter_confidence;
  }
  auto first_position = [](const QuestionFacet& f) {
    std::size_t p = f.members.front().answer.chars.start;
    for (const auto& m : f.members) p = std::min(p, m.answer.chars.start);
    return p;
  };
  std::stable_sort(facets.begin(), facets.end(), [&](const auto& a, const auto& b) {
    return by_confidence_then_position(a.inter_confidence, b.inter_confidence,
                                       first_position(a), first_position(b));
  });
  return facets;
}

std::vector<QuestionFacet> apply_knobs(std::vector<QuestionFacet> facets,
                                       double intra_threshold, double inter_threshold) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(intra_threshold) || !in_unit(inter_threshold)) {
    throw Error(Errc::RangeOutOfBounds, "knob thresholds must lie in [0, 1]");
  }
  std::vector<QuestionFacet> out;
  for (auto& f : facets) {
    QuestionFacet kept{std::move(f.stem), 0.0, {}};
    for (auto& m : f.members) {
      if (m.inter_confidence < inter_threshold) continue;
      std::erase_if(m.questions, [&](const GeneratedQuestion& q) {
        return q.intra_confidence < intra_threshold;
      });
      if (m.questions.empty()) continue;
      kept.inter_confidence = std::max(kept.inter_confidence, m.inter_confidence);
      kept.members.push_back(std::move(m));
    }
    if (!kept.members.empty()) out.push_back(std::move(kept));
  }
  return out;
}

std::size_t question_count(const std::vector<QuestionFacet>& facets) {
  std::size_t n = 0;
  for (const auto& f : facets) {
    for (const auto& m : f.members) n += m.questions.size();
  }
  return n;
}

}  // namespace pivotqg
