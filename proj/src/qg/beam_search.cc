#include "pivotqg/qg/beam_search.h"

#include <algorithm>
#include <cmath>

#include "pivotqg/common/error.h"

namespace pivotqg::qg {

namespace {

struct Beam {
  std::size_t state = 0;
  std::vector<TokenId> tokens;
  std::vector<Eigen::VectorXd> rows;
  double score = 0.0;
};

struct Candidate {
  std::size_t parent;
  TokenId token;
  double score;
  double rank;
  std::size_t next_state;
};

double rank_of(double score, std::size_t length, bool normalize) {
  return normalize ? score / static_cast<double>(length + 1) : score;
}

Hypothesis to_hypothesis(Beam beam, bool finished) {
  Hypothesis h;
  h.tokens = std::move(beam.tokens);
  h.score = beam.score;
  h.finished = finished;
  const Eigen::Index cols = beam.rows.empty() ? 0 : beam.rows.front().size();
  h.attention = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(beam.rows.size()), cols);
  for (std::size_t r = 0; r < beam.rows.size(); ++r) {
    if (beam.rows[r].size() != cols) {
      throw Error(Errc::ShapeMismatch, "attention rows differ in length");
    }
    if (cols > 0) h.attention.row(static_cast<Eigen::Index>(r)) = beam.rows[r].transpose();
  }
  return h;
}

}  // namespace

std::vector<Hypothesis> beam_search(StepModel& model, const BeamOptions& options) {
  if (options.beam_width == 0) throw Error(Errc::InvalidConfig, "beam_width must be at least 1");
  const TokenId eos = model.eos();

  std::vector<Beam> live(1);
  live[0].state = model.root();
  std::vector<std::pair<double, Beam>> finished;  // (rank, beam)

  for (std::size_t t = 0; t <= options.max_len && !live.empty(); ++t) {
    std::vector<Candidate> candidates;
    std::vector<Eigen::VectorXd> attention(live.size());
    for (std::size_t p = 0; p < live.size(); ++p) {
      const TokenId prev = live[p].tokens.empty() ? model.bos() : live[p].tokens.back();
      auto [next, result] = model.step(live[p].state, prev);
      if (!result.probs.allFinite()) {
        throw Error(Errc::NonFiniteInput, "decoder produced a non-finite distribution");
      }
      attention[p] = std::move(result.attention);
      for (Eigen::Index tok = 0; tok < result.probs.size(); ++tok) {
        const double prob = result.probs(tok);
        if (prob <= 0.0) continue;
        if (t == options.max_len && tok != eos) continue;
        const double score = live[p].score + std::log(prob);
        const std::size_t length = live[p].tokens.size() + (tok == eos ? 0 : 1);
        candidates.push_back(
            {p, tok, score, rank_of(score, length, options.length_normalize), next});
      }
    }
    if (candidates.empty()) break;

    const std::size_t keep = std::min(options.beam_width, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<long>(keep),
                      candidates.end(), [](const Candidate& a, const Candidate& b) {
                        if (a.rank != b.rank) return a.rank > b.rank;
                        if (a.parent != b.parent) return a.parent < b.parent;
                        return a.token < b.token;
                      });

    std::vector<Beam> next_live;
    for (std::size_t k = 0; k < keep; ++k) {
      const Candidate& c = candidates[k];
      Beam b;
      b.state = c.next_state;
      b.tokens = live[c.parent].tokens;
      b.rows = live[c.parent].rows;
      b.score = c.score;
      if (c.token == eos) {
        finished.emplace_back(c.rank, std::move(b));
      } else {
        b.tokens.push_back(c.token);
        b.rows.push_back(attention[c.parent]);
        next_live.push_back(std::move(b));
      }
    }
    live = std::move(next_live);

    // Scores never increase, so once beam_width finished hypotheses all beat
    // every open one the result is settled.
    if (!options.length_normalize && finished.size() >= options.beam_width) {
      std::vector<double> ranks;
      for (const auto& f : finished) ranks.push_back(f.first);
      std::nth_element(ranks.begin(), ranks.begin() + static_cast<long>(options.beam_width - 1),
                       ranks.end(), std::greater<>());
      const double kth = ranks[options.beam_width - 1];
      double best_live = -INFINITY;
      for (const auto& b : live) best_live = std::max(best_live, b.score);
      if (best_live <= kth) break;
    }
  }

  std::vector<Hypothesis> out;
  if (!finished.empty()) {
    std::stable_sort(finished.begin(), finished.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; k < finished.size() && k < options.beam_width; ++k) {
      out.push_back(to_hypothesis(std::move(finished[k].second), true));
    }
    return out;
  }
  for (std::size_t k = 0; k < live.size() && k < options.beam_width; ++k) {
    out.push_back(to_hypothesis(std::move(live[k]), false));
  }
  return out;
}

}  // namespace pivotqg::qg
