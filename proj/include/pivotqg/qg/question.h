#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pivotqg/answers/span.h"

namespace pivotqg {

struct GeneratedQuestion {
  std::string id;                   // assigned by the service; empty otherwise
  std::vector<std::string> tokens;  // copied tokens resolved to source surfaces
  double beam_score = 0.0;          // sum of emitted-token log-probabilities
  Eigen::MatrixXd attention;        // tokens.size() x source length
  double intra_confidence = 0.0;
  bool truncated = false;           // no </s> within the decode budget
  AnswerSpan answer;

  std::string text() const;
};

}  // namespace pivotqg
