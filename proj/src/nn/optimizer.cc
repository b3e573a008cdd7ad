#include "pivotqg/nn/optimizer.h"

#include <cmath>
#include <string>

#include "pivotqg/common/error.h"

namespace pivotqg::nn {

void Sgd::step(ParameterSet& params, double learning_rate) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params.at(i);
    if (!p.frozen) p.value -= learning_rate * p.grad;
  }
}

void Adam::step(ParameterSet& params, double learning_rate) {
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_.push_back(Matrix::Zero(params.at(i).value.rows(), params.at(i).value.cols()));
      v_.push_back(m_.back());
    }
  }
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params.at(i);
    if (p.frozen) continue;
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p.grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p.grad.cwiseAbs2();
    p.value.array() -= learning_rate * (m_[i].array() / c1) /
                       ((v_[i].array() / c2).sqrt() + epsilon_);
  }
}

std::unique_ptr<Optimizer> make_optimizer(std::string_view name) {
  if (name == "sgd") return std::make_unique<Sgd>();
  if (name == "adam") return std::make_unique<Adam>();
  throw Error(Errc::InvalidConfig, "unknown optimizer '" + std::string(name) + "'");
}

double clip_gradients(ParameterSet& params, double max_norm) {
  const double norm = params.grad_norm();
  if (max_norm > 0.0 && norm > max_norm) params.scale_grad(max_norm / norm);
  return norm;
}

}  // namespace pivotqg::nn
