#pragma once

#include <functional>
#include <random>
#include <unordered_map>
#include <vector>

#include "pivotqg/nn/parameters.h"

namespace pivotqg::nn {

struct Expr {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Define-by-run computation tape. Every op records its value eagerly and a
/// closure for the reverse pass. Parameters are read by reference and never
/// written by the graph; gradients stay on the tape until
/// accumulate_gradients() copies them into a ParameterSet, so any number of
/// graphs may read one model concurrently.
class Graph {
 public:
  explicit Graph(bool track_gradients = true) : track_(track_gradients) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Expr input(Matrix value);
  Expr scalar(double value);
  Expr param(const Parameter& p);
  Expr lookup(const Parameter& table, Eigen::Index column);

  Expr matmul(Expr a, Expr b);
  Expr matmul_transposed(Expr a, Expr b);  // a^T b
  Expr affine(Expr w, Expr x, Expr b);      // w x + b
  Expr add(Expr a, Expr b);
  Expr sub(Expr a, Expr b);
  Expr cmul(Expr a, Expr b);
  Expr scale(Expr a, double factor);
  Expr scalar_mul(Expr s, Expr a);  // s is 1x1
  Expr one_minus(Expr a);
  Expr sigmoid(Expr a);
  Expr tanh(Expr a);
  Expr concat_rows(const std::vector<Expr>& parts);
  Expr concat_cols(const std::vector<Expr>& parts);
  Expr slice_rows(Expr a, Eigen::Index start, Eigen::Index count);
  Expr sum(const std::vector<Expr>& terms);

  // Column-vector softmax; `masked` rows get probability exactly zero.
  Expr softmax(Expr a, const std::vector<Eigen::Index>& masked = {});
  Expr sparsemax(Expr a);
  // Zero-extends a column vector to `total` rows.
  Expr pad_rows(Expr a, Eigen::Index total);
  // out[index[i]] += a[i], out has `size` rows.
  Expr scatter_add(Expr a, std::vector<Eigen::Index> index, Eigen::Index size);
  Expr pick(Expr a, Eigen::Index row);
  // -log(a + eps) for a 1x1 a.
  Expr neg_log(Expr a, double eps);
  // -log softmax(logits)[target] restricted to rows where allowed[i].
  Expr nll_softmax(Expr logits, Eigen::Index target, std::vector<bool> allowed);
  Expr dropout(Expr a, double rate, std::mt19937_64& rng);

  // Fused LSTM update: gates = [i; f; g; o] pre-activations (4H), returns [h; c].
  Expr lstm_cell(Expr gates, Expr c_prev);
  // Fused GRU update: rz = [r; z] pre-activations, xn = W_n x + b, hn = U_n h + b.
  Expr gru_cell(Expr rz, Expr xn, Expr hn, Expr h_prev);

  const Matrix& value(Expr e) const;
  double scalar_value(Expr e) const { return value(e)(0, 0); }
  std::size_t size() const { return nodes_.size(); }
  bool tracking() const { return track_; }

  void backward(Expr loss);
  // Adds tape gradients into `params`, which must own every parameter used.
  void accumulate_gradients(ParameterSet& params) const;

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    const Parameter* param = nullptr;
    Eigen::Index column = -1;  // >= 0 for embedding lookups
    bool needs_grad = false;
    std::function<void()> backward;
  };

  Expr push(Matrix value, bool needs_grad);
  bool needs(Expr e) const { return nodes_[e.id].needs_grad; }
  bool any_needs(std::initializer_list<Expr> es) const;
  Matrix& grad(Expr e);

  bool track_;
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_nodes_;
};

}  // namespace pivotqg::nn
