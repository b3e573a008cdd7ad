#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "pivotqg/nn/parameters.h"

namespace pivotqg::nn {

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  // Applies the accumulated gradients and leaves them untouched.
  virtual void step(ParameterSet& params, double learning_rate) = 0;
};

class Sgd final : public Optimizer {
 public:
  void step(ParameterSet& params, double learning_rate) override;
};

class Adam final : public Optimizer {
 public:
  Adam(double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8)
      : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}
  void step(ParameterSet& params, double learning_rate) override;

 private:
  double beta1_;
  double beta2_;
  double epsilon_;
  long steps_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

std::unique_ptr<Optimizer> make_optimizer(std::string_view name);

// Rescales gradients so their global norm is at most max_norm; returns the
// norm before clipping. max_norm <= 0 disables clipping.
double clip_gradients(ParameterSet& params, double max_norm);

}  // namespace pivotqg::nn
