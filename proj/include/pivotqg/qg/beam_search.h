#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pivotqg/qg/vocabulary.h"

namespace pivotqg::qg {

/// Next-token distribution after feeding one token.
struct StepResult {
  Eigen::VectorXd probs;      // over token ids, sums to 1
  Eigen::VectorXd attention;  // per source position; may be empty
};

/// Incremental decoder seen by the search. States are opaque handles owned
/// by the implementation.
class StepModel {
 public:
  virtual ~StepModel() = default;
  virtual std::size_t root() = 0;
  // Feeds `prev` to `state`; returns the successor handle and its output.
  virtual std::pair<std::size_t, StepResult> step(std::size_t state, TokenId prev) = 0;
  virtual TokenId bos() const { return Vocabulary::kBos; }
  virtual TokenId eos() const { return Vocabulary::kEos; }
};

struct BeamOptions {
  std::size_t beam_width = 5;
  std::size_t max_len = 30;  // emitted tokens, end token excluded
  bool length_normalize = false;
};

struct Hypothesis {
  std::vector<TokenId> tokens;  // emitted, end token excluded
  double score = 0.0;           // sum of log-probabilities, end token included when finished
  Eigen::MatrixXd attention;    // tokens.size() x source_len
  bool finished = false;
};

// Returns up to beam_width finished hypotheses by descending rank. When none
// finishes within max_len the best open ones are returned unfinished.
// Ranking is by score, or score / (length + 1) with length_normalize; ties
// go to the earlier parent, then the lower token id. Throws InvalidConfig
// when beam_width is 0.
std::vector<Hypothesis> beam_search(StepModel& model, const BeamOptions& options);

}  // namespace pivotqg::qg
