#include "pivotqg/nn/graph.h"

#include <cmath>

#include "pivotqg/common/error.h"
#include "pivotqg/nn/sparsemax.h"

namespace pivotqg::nn {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(Errc::ShapeMismatch, std::string(op) + ": shape mismatch");
  }
}

Matrix logistic(const Matrix& x) {
  return x.unaryExpr([](double v) {
    if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

}  // namespace

Expr Graph::push(Matrix value, bool needs_grad) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = track_ && needs_grad;
  nodes_.push_back(std::move(n));
  return Expr{static_cast<int>(nodes_.size() - 1)};
}

bool Graph::any_needs(std::initializer_list<Expr> es) const {
  for (Expr e : es) {
    if (needs(e)) return true;
  }
  return false;
}

Matrix& Graph::grad(Expr e) {
  Node& n = nodes_[e.id];
  if (n.grad.size() == 0) {
    const Matrix& v = value(e);
    n.grad = Matrix::Zero(v.rows(), v.cols());
  }
  return n.grad;
}

const Matrix& Graph::value(Expr e) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(e.id));
  return (n.param != nullptr && n.column < 0) ? n.param->value : n.value;
}

Expr Graph::input(Matrix value) { return push(std::move(value), false); }

Expr Graph::scalar(double value) {
  Matrix m(1, 1);
  m(0, 0) = value;
  return push(std::move(m), false);
}

Expr Graph::param(const Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Expr{it->second};
  Node n;
  n.param = &p;
  n.needs_grad = track_ && !p.frozen;
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size() - 1);
  param_nodes_.emplace(&p, id);
  return Expr{id};
}

Expr Graph::lookup(const Parameter& table, Eigen::Index column) {
  if (column < 0 || column >= table.value.cols()) {
    throw Error(Errc::ShapeMismatch, "lookup column out of range in '" + table.name + "'");
  }
  Node n;
  n.value = table.value.col(column);
  n.param = &table;
  n.column = column;
  n.needs_grad = track_ && !table.frozen;
  nodes_.push_back(std::move(n));
  return Expr{static_cast<int>(nodes_.size() - 1)};
}

Expr Graph::matmul(Expr a, Expr b) {
  const Matrix& va = value(a);
  const Matrix& vb = value(b);
  if (va.cols() != vb.rows()) throw Error(Errc::ShapeMismatch, "matmul: inner dimensions differ");
  Expr out = push(va * vb, any_needs({a, b}));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, b, out] {
      const Matrix& g = nodes_[out.id].grad;
      if (needs(a)) grad(a).noalias() += g * value(b).transpose();
      if (needs(b)) grad(b).noalias() += value(a).transpose() * g;
    };
  }
  return out;
}

Expr Graph::matmul_transposed(Expr a, Expr b) {
  const Matrix& va = value(a);
  const Matrix& vb = value(b);
  if (va.rows() != vb.rows()) throw Error(Errc::ShapeMismatch, "matmul_transposed: rows differ");
  Expr out = push(va.transpose() * vb, any_needs({a, b}));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, b, out] {
      const Matrix& g = nodes_[out.id].grad;
      if (needs(a)) grad(a).noalias() += value(b) * g.transpose();
      if (needs(b)) grad(b).noalias() += value(a) * g;
    };
  }
  return out;
}

Expr Graph::affine(Expr w, Expr x, Expr b) {
  const Matrix& vw = value(w);
  const Matrix& vx = value(x);
  const Matrix& vb = value(b);
  if (vw.cols() != vx.rows() || vb.rows() != vw.rows() || vb.cols() != vx.cols()) {
    throw Error(Errc::ShapeMismatch, "affine: shape mismatch");
  }
  Matrix v = vb;
  v.noalias() += vw * vx;
  Expr out = push(std::move(v), any_needs({w, x, b}));
  if (needs(out)) {
    nodes_[out.id].backward = [this, w, x, b, out] {
      const Matrix& g = nodes_[out.id].grad;
      if (needs(w)) grad(w).noalias() += g * value(x).transpose();
      if (needs(x)) grad(x).noalias() += value(w).transpose() * g;
      if (needs(b)) grad(b) += g;
    };
  }
  return out;
}

Expr Graph::add(Expr a, Expr b) {
  check_same_shape(value(a), value(b), "add");
  Expr out = push(value(a) + value(b), any_needs({a, b}));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, b, out] {
      const Matrix& g = nodes_[out.id].grad;
      if (needs(a)) grad(a) += g;
      if (needs(b)) grad(b) += g;
    };
  }
  return out;
}

Expr Graph::sub(Expr a, Expr b) {
  check_same_shape(value(a), value(b), "sub");
  Expr out = push(value(a) - value(b), any_needs({a, b}));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, b, out] {
      const Matrix& g = nodes_[out.id].grad;
      if (needs(a)) grad(a) += g;
      if (needs(b)) grad(b) -= g;
    };
  }
  return out;
}

Expr Graph::cmul(Expr a, Expr b) {
  check_same_shape(value(a), value(b), "cmul");
  Expr out = push(value(a).cwiseProduct(value(b)), any_needs({a, b}));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, b, out] {
      const Matrix& g = nodes_[out.id].grad;
      if (needs(a)) grad(a) += g.cwiseProduct(value(b));
      if (needs(b)) grad(b) += g.cwiseProduct(value(a));
    };
  }
  return out;
}

Expr Graph::scale(Expr a, double factor) {
  Expr out = push(value(a) * factor, needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out, factor] {
      grad(a) += nodes_[out.id].grad * factor;
    };
  }
  return out;
}

Expr Graph::scalar_mul(Expr s, Expr a) {
  if (value(s).size() != 1) throw Error(Errc::ShapeMismatch, "scalar_mul: s must be 1x1");
  Expr out = push(value(a) * value(s)(0, 0), any_needs({s, a}));
  if (needs(out)) {
    nodes_[out.id].backward = [this, s, a, out] {
      const Matrix& g = nodes_[out.id].grad;
      if (needs(s)) grad(s)(0, 0) += g.cwiseProduct(value(a)).sum();
      if (needs(a)) grad(a) += g * value(s)(0, 0);
    };
  }
  return out;
}

Expr Graph::one_minus(Expr a) {
  Expr out = push((1.0 - value(a).array()).matrix(), needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out] { grad(a) -= nodes_[out.id].grad; };
  }
  return out;
}

Expr Graph::sigmoid(Expr a) {
  Expr out = push(logistic(value(a)), needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out] {
      const Matrix& y = nodes_[out.id].value;
      grad(a).array() += nodes_[out.id].grad.array() * y.array() * (1.0 - y.array());
    };
  }
  return out;
}

Expr Graph::tanh(Expr a) {
  Expr out = push(value(a).array().tanh().matrix(), needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out] {
      const Matrix& y = nodes_[out.id].value;
      grad(a).array() += nodes_[out.id].grad.array() * (1.0 - y.array().square());
    };
  }
  return out;
}

Expr Graph::concat_rows(const std::vector<Expr>& parts) {
  if (parts.empty()) throw Error(Errc::ShapeMismatch, "concat_rows: no parts");
  Eigen::Index rows = 0;
  const Eigen::Index cols = value(parts[0]).cols();
  bool need = false;
  for (Expr p : parts) {
    if (value(p).cols() != cols) throw Error(Errc::ShapeMismatch, "concat_rows: column mismatch");
    rows += value(p).rows();
    need = need || needs(p);
  }
  Matrix v(rows, cols);
  Eigen::Index at = 0;
  for (Expr p : parts) {
    v.middleRows(at, value(p).rows()) = value(p);
    at += value(p).rows();
  }
  Expr out = push(std::move(v), need);
  if (needs(out)) {
    nodes_[out.id].backward = [this, parts, out] {
      Eigen::Index at = 0;
      for (Expr p : parts) {
        const Eigen::Index r = value(p).rows();
        if (needs(p)) grad(p) += nodes_[out.id].grad.middleRows(at, r);
        at += r;
      }
    };
  }
  return out;
}

Expr Graph::concat_cols(const std::vector<Expr>& parts) {
  if (parts.empty()) throw Error(Errc::ShapeMismatch, "concat_cols: no parts");
  const Eigen::Index rows = value(parts[0]).rows();
  Eigen::Index cols = 0;
  bool need = false;
  for (Expr p : parts) {
    if (value(p).rows() != rows) throw Error(Errc::ShapeMismatch, "concat_cols: row mismatch");
    cols += value(p).cols();
    need = need || needs(p);
  }
  Matrix v(rows, cols);
  Eigen::Index at = 0;
  for (Expr p : parts) {
    v.middleCols(at, value(p).cols()) = value(p);
    at += value(p).cols();
  }
  Expr out = push(std::move(v), need);
  if (needs(out)) {
    nodes_[out.id].backward = [this, parts, out] {
      Eigen::Index at = 0;
      for (Expr p : parts) {
        const Eigen::Index c = value(p).cols();
        if (needs(p)) grad(p) += nodes_[out.id].grad.middleCols(at, c);
        at += c;
      }
    };
  }
  return out;
}

Expr Graph::slice_rows(Expr a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > value(a).rows()) {
    throw Error(Errc::ShapeMismatch, "slice_rows: out of range");
  }
  Expr out = push(value(a).middleRows(start, count), needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out, start, count] {
      grad(a).middleRows(start, count) += nodes_[out.id].grad;
    };
  }
  return out;
}

Expr Graph::sum(const std::vector<Expr>& terms) {
  if (terms.empty()) throw Error(Errc::ShapeMismatch, "sum: no terms");
  Matrix v = value(terms[0]);
  bool need = needs(terms[0]);
  for (std::size_t k = 1; k < terms.size(); ++k) {
    check_same_shape(v, value(terms[k]), "sum");
    v += value(terms[k]);
    need = need || needs(terms[k]);
  }
  Expr out = push(std::move(v), need);
  if (needs(out)) {
    nodes_[out.id].backward = [this, terms, out] {
      for (Expr t : terms) {
        if (needs(t)) grad(t) += nodes_[out.id].grad;
      }
    };
  }
  return out;
}

Expr Graph::softmax(Expr a, const std::vector<Eigen::Index>& masked) {
  const Matrix& x = value(a);
  if (x.cols() != 1) throw Error(Errc::ShapeMismatch, "softmax: expects a column vector");
  std::vector<bool> keep(static_cast<std::size_t>(x.rows()), true);
  for (auto m : masked) keep[static_cast<std::size_t>(m)] = false;
  double max = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (keep[static_cast<std::size_t>(i)]) max = std::max(max, x(i, 0));
  }
  Matrix p = Matrix::Zero(x.rows(), 1);
  double z = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (keep[static_cast<std::size_t>(i)]) {
      p(i, 0) = std::exp(x(i, 0) - max);
      z += p(i, 0);
    }
  }
  p /= z;
  Expr out = push(std::move(p), needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out] {
      const Matrix& y = nodes_[out.id].value;
      const Matrix& g = nodes_[out.id].grad;
      const double dot = y.col(0).dot(g.col(0));
      grad(a).array() += y.array() * (g.array() - dot);
    };
  }
  return out;
}

Expr Graph::sparsemax(Expr a) {
  const Matrix& x = value(a);
  if (x.cols() != 1) throw Error(Errc::ShapeMismatch, "sparsemax: expects a column vector");
  Expr out = push(nn::sparsemax(x.col(0)), needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out] {
      grad(a) += nn::sparsemax_backward(nodes_[out.id].value.col(0),
                                        nodes_[out.id].grad.col(0));
    };
  }
  return out;
}

Expr Graph::pad_rows(Expr a, Eigen::Index total) {
  const Matrix& x = value(a);
  if (x.rows() > total) throw Error(Errc::ShapeMismatch, "pad_rows: target smaller than input");
  Matrix v = Matrix::Zero(total, x.cols());
  v.topRows(x.rows()) = x;
  Expr out = push(std::move(v), needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out] {
      grad(a) += nodes_[out.id].grad.topRows(value(a).rows());
    };
  }
  return out;
}

Expr Graph::scatter_add(Expr a, std::vector<Eigen::Index> index, Eigen::Index size) {
  const Matrix& x = value(a);
  if (x.cols() != 1 || static_cast<std::size_t>(x.rows()) != index.size()) {
    throw Error(Errc::ShapeMismatch, "scatter_add: index length differs from input");
  }
  Matrix v = Matrix::Zero(size, 1);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= size) throw Error(Errc::ShapeMismatch, "scatter_add: index out of range");
    v(index[i], 0) += x(static_cast<Eigen::Index>(i), 0);
  }
  Expr out = push(std::move(v), needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out, index = std::move(index)] {
      Matrix& ga = grad(a);
      const Matrix& g = nodes_[out.id].grad;
      for (std::size_t i = 0; i < index.size(); ++i) {
        ga(static_cast<Eigen::Index>(i), 0) += g(index[i], 0);
      }
    };
  }
  return out;
}

Expr Graph::pick(Expr a, Eigen::Index row) {
  const Matrix& x = value(a);
  if (row < 0 || row >= x.rows()) throw Error(Errc::ShapeMismatch, "pick: row out of range");
  Matrix v(1, x.cols());
  v = x.row(row);
  Expr out = push(std::move(v), needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out, row] {
      grad(a).row(row) += nodes_[out.id].grad;
    };
  }
  return out;
}

Expr Graph::neg_log(Expr a, double eps) {
  if (value(a).size() != 1) throw Error(Errc::ShapeMismatch, "neg_log: expects 1x1");
  const double x = value(a)(0, 0);
  Matrix v(1, 1);
  v(0, 0) = -std::log(x + eps);
  Expr out = push(std::move(v), needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out, eps] {
      grad(a)(0, 0) -= nodes_[out.id].grad(0, 0) / (value(a)(0, 0) + eps);
    };
  }
  return out;
}

Expr Graph::nll_softmax(Expr logits, Eigen::Index target, std::vector<bool> allowed) {
  const Matrix& x = value(logits);
  if (x.cols() != 1) throw Error(Errc::ShapeMismatch, "nll_softmax: expects a column vector");
  if (allowed.empty()) allowed.assign(static_cast<std::size_t>(x.rows()), true);
  if (static_cast<Eigen::Index>(allowed.size()) != x.rows() || target < 0 ||
      target >= x.rows() || !allowed[static_cast<std::size_t>(target)]) {
    throw Error(Errc::ShapeMismatch, "nll_softmax: bad target or mask");
  }
  double max = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (allowed[static_cast<std::size_t>(i)]) max = std::max(max, x(i, 0));
  }
  Matrix p = Matrix::Zero(x.rows(), 1);
  double z = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (allowed[static_cast<std::size_t>(i)]) {
      p(i, 0) = std::exp(x(i, 0) - max);
      z += p(i, 0);
    }
  }
  p /= z;
  Matrix v(1, 1);
  v(0, 0) = -(x(target, 0) - max - std::log(z));
  Expr out = push(std::move(v), needs(logits));
  if (needs(out)) {
    nodes_[out.id].backward = [this, logits, out, target, p = std::move(p)] {
      const double g = nodes_[out.id].grad(0, 0);
      Matrix& gl = grad(logits);
      gl += g * p;
      gl(target, 0) -= g;
    };
  }
  return out;
}

Expr Graph::dropout(Expr a, double rate, std::mt19937_64& rng) {
  if (rate <= 0.0) return a;
  const Matrix& x = value(a);
  std::bernoulli_distribution keep(1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = keep(rng) ? 1.0 / (1.0 - rate) : 0.0;
  }
  Expr out = push(x.cwiseProduct(mask), needs(a));
  if (needs(out)) {
    nodes_[out.id].backward = [this, a, out, mask = std::move(mask)] {
      grad(a) += nodes_[out.id].grad.cwiseProduct(mask);
    };
  }
  return out;
}

Expr Graph::lstm_cell(Expr gates, Expr c_prev) {
  const Matrix& pre = value(gates);
  const Matrix& c = value(c_prev);
  const Eigen::Index h = c.rows();
  if (pre.rows() != 4 * h || pre.cols() != 1 || c.cols() != 1) {
    throw Error(Errc::ShapeMismatch, "lstm_cell: gates must be 4H");
  }
  const Matrix i = logistic(pre.middleRows(0, h));
  const Matrix f = logistic(pre.middleRows(h, h));
  const Matrix g = pre.middleRows(2 * h, h).array().tanh().matrix();
  const Matrix o = logistic(pre.middleRows(3 * h, h));
  const Matrix c_new = f.cwiseProduct(c) + i.cwiseProduct(g);
  Matrix v(2 * h, 1);
  v.topRows(h) = o.cwiseProduct(c_new.array().tanh().matrix());
  v.bottomRows(h) = c_new;
  Expr out = push(std::move(v), any_needs({gates, c_prev}));
  if (needs(out)) {
    nodes_[out.id].backward = [this, gates, c_prev, out, h] {
      const Matrix& pre = value(gates);
      const Matrix& c = value(c_prev);
      const Matrix& y = nodes_[out.id].value;
      const Matrix& gout = nodes_[out.id].grad;
      const Eigen::ArrayXXd i = logistic(pre.middleRows(0, h)).array();
      const Eigen::ArrayXXd f = logistic(pre.middleRows(h, h)).array();
      const Eigen::ArrayXXd g = pre.middleRows(2 * h, h).array().tanh();
      const Eigen::ArrayXXd o = logistic(pre.middleRows(3 * h, h)).array();
      const Eigen::ArrayXXd tc = y.bottomRows(h).array().tanh();
      const Eigen::ArrayXXd gh = gout.topRows(h).array();
      const Eigen::ArrayXXd dc = gout.bottomRows(h).array() + gh * o * (1.0 - tc.square());
      if (needs(gates)) {
        Matrix& gg = grad(gates);
        gg.middleRows(0, h).array() += dc * g * i * (1.0 - i);
        gg.middleRows(h, h).array() += dc * c.array() * f * (1.0 - f);
        gg.middleRows(2 * h, h).array() += dc * i * (1.0 - g.square());
        gg.middleRows(3 * h, h).array() += gh * tc * o * (1.0 - o);
      }
      if (needs(c_prev)) grad(c_prev).array() += dc * f;
    };
  }
  return out;
}

Expr Graph::gru_cell(Expr rz, Expr xn, Expr hn, Expr h_prev) {
  const Matrix& pre = value(rz);
  const Matrix& hp = value(h_prev);
  const Eigen::Index h = hp.rows();
  if (pre.rows() != 2 * h || value(xn).rows() != h || value(hn).rows() != h) {
    throw Error(Errc::ShapeMismatch, "gru_cell: shape mismatch");
  }
  const Matrix r = logistic(pre.topRows(h));
  const Matrix z = logistic(pre.bottomRows(h));
  const Matrix n = (value(xn) + r.cwiseProduct(value(hn))).array().tanh().matrix();
  Matrix v = (1.0 - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(hp);
  Expr out = push(std::move(v), any_needs({rz, xn, hn, h_prev}));
  if (needs(out)) {
    nodes_[out.id].backward = [this, rz, xn, hn, h_prev, out, h] {
      const Matrix& pre = value(rz);
      const Eigen::ArrayXXd r = logistic(pre.topRows(h)).array();
      const Eigen::ArrayXXd z = logistic(pre.bottomRows(h)).array();
      const Eigen::ArrayXXd hnv = value(hn).array();
      const Eigen::ArrayXXd n = (value(xn).array() + r * hnv).tanh();
      const Eigen::ArrayXXd g = nodes_[out.id].grad.array();
      const Eigen::ArrayXXd dn = g * (1.0 - z) * (1.0 - n.square());
      if (needs(rz)) {
        Matrix& gr = grad(rz);
        gr.topRows(h).array() += dn * hnv * r * (1.0 - r);
        gr.bottomRows(h).array() += g * (value(h_prev).array() - n) * z * (1.0 - z);
      }
      if (needs(xn)) grad(xn).array() += dn;
      if (needs(hn)) grad(hn).array() += dn * r;
      if (needs(h_prev)) grad(h_prev).array() += g * z;
    };
  }
  return out;
}

void Graph::backward(Expr loss) {
  if (!track_) throw Error(Errc::InvalidConfig, "backward on a graph without gradient tracking");
  if (value(loss).size() != 1) throw Error(Errc::ShapeMismatch, "backward: loss must be 1x1");
  if (!needs(loss)) return;
  grad(loss)(0, 0) += 1.0;
  for (int k = loss.id; k >= 0; --k) {
    Node& n = nodes_[static_cast<std::size_t>(k)];
    if (n.backward && n.grad.size() != 0) n.backward();
  }
}

void Graph::accumulate_gradients(ParameterSet& params) const {
  for (const Node& n : nodes_) {
    if (n.param == nullptr || !n.needs_grad || n.grad.size() == 0) continue;
    if (n.param->index >= params.size() || &params.at(n.param->index) != n.param) {
      throw Error(Errc::InvalidConfig, "gradient for a parameter outside this set");
    }
    Parameter& p = params.at(n.param->index);
    if (n.column >= 0) {
      p.grad.col(n.column) += n.grad;
    } else {
      p.grad += n.grad;
    }
  }
}

}  // namespace pivotqg::nn
