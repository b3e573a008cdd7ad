#include "pivotqg/nn/sparsemax.h"

#include <algorithm>
#include <functional>
#include <vector>

#include "pivotqg/common/error.h"

namespace pivotqg::nn {

double sparsemax_threshold(const Eigen::VectorXd& scores) {
  if (scores.size() == 0 || !scores.allFinite()) {
    throw Error(Errc::NonFiniteInput, "sparsemax needs a non-empty finite vector");
  }
  std::vector<double> sorted(scores.data(), scores.data() + scores.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double support_sum = 0.0;
  std::size_t support = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    if (1.0 + static_cast<double>(k + 1) * sorted[k] > cumulative) {
      support = k + 1;
      support_sum = cumulative;
    }
  }
  return (support_sum - 1.0) / static_cast<double>(support);
}

Eigen::VectorXd sparsemax(const Eigen::VectorXd& scores) {
  const double tau = sparsemax_threshold(scores);
  return (scores.array() - tau).max(0.0).matrix();
}

Eigen::VectorXd sparsemax_backward(const Eigen::VectorXd& p,
                                   const Eigen::VectorXd& upstream) {
  if (p.size() != upstream.size()) {
    throw Error(Errc::ShapeMismatch, "sparsemax_backward: size mismatch");
  }
  double sum = 0.0;
  int support = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      sum += upstream[i];
      ++support;
    }
  }
  const double mean = support > 0 ? sum / support : 0.0;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) out[i] = upstream[i] - mean;
  }
  return out;
}

}  // namespace pivotqg::nn
