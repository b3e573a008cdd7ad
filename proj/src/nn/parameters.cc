#include "pivotqg/nn/parameters.h"

#include <cmath>

#include "pivotqg/common/error.h"

namespace pivotqg::nn {

Parameter& ParameterSet::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
  if (contains(name)) {
    throw Error(Errc::InvalidConfig, "duplicate parameter '" + name + "'");
  }
  auto p = std::make_unique<Parameter>();
  p->name = std::move(name);
  p->value = Matrix::Zero(rows, cols);
  p->grad = Matrix::Zero(rows, cols);
  p->index = params_.size();
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParameterSet::get(std::string_view name) {
  for (auto& p : params_) {
    if (p->name == name) return *p;
  }
  throw Error(Errc::NotFound, "no parameter '" + std::string(name) + "'");
}

const Parameter& ParameterSet::get(std::string_view name) const {
  return const_cast<ParameterSet*>(this)->get(name);
}

bool ParameterSet::contains(std::string_view name) const {
  for (const auto& p : params_) {
    if (p->name == name) return true;
  }
  return false;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

double ParameterSet::grad_norm() const {
  double sq = 0.0;
  for (const auto& p : params_) {
    if (!p->frozen) sq += p->grad.squaredNorm();
  }
  return std::sqrt(sq);
}

void ParameterSet::scale_grad(double factor) {
  for (auto& p : params_) p->grad *= factor;
}

void ParameterSet::init_uniform(double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (auto& p : params_) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = dist(rng);
  }
}

std::size_t ParameterSet::count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

}  // namespace pivotqg::nn
