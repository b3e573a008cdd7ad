#pragma once

#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pivotqg::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  bool frozen = false;
  std::size_t index = 0;  // position in the owning ParameterSet
};

/// Owns named parameter tensors. Addresses are stable for the set's lifetime.
class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet&) = delete;
  ParameterSet& operator=(const ParameterSet&) = delete;
  ParameterSet(ParameterSet&&) = default;
  ParameterSet& operator=(ParameterSet&&) = default;

  Parameter& add(std::string name, Eigen::Index rows, Eigen::Index cols);

  Parameter& get(std::string_view name);
  const Parameter& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  Parameter& at(std::size_t index) { return *params_[index]; }
  const Parameter& at(std::size_t index) const { return *params_[index]; }
  std::size_t size() const { return params_.size(); }

  void zero_grad();
  double grad_norm() const;
  void scale_grad(double factor);
  void init_uniform(double scale, std::mt19937_64& rng);
  std::size_t count() const;  // total scalar count

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

}  // namespace pivotqg::nn
