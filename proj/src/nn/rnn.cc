#include "pivotqg/nn/rnn.h"

#include "pivotqg/common/error.h"

namespace pivotqg::nn {

std::string_view cell_kind_name(CellKind kind) {
  return kind == CellKind::Lstm ? "lstm" : "gru";
}

CellKind parse_cell_kind(std::string_view name) {
  if (name == "lstm") return CellKind::Lstm;
  if (name == "gru") return CellKind::Gru;
  throw Error(Errc::InvalidConfig, "unknown cell kind '" + std::string(name) + "'");
}

RecurrentCell::RecurrentCell(ParameterSet& params, const std::string& prefix,
                             CellKind kind, int input_dim, int hidden_dim)
    : kind_(kind), input_dim_(input_dim), hidden_dim_(hidden_dim) {
  const int gates = kind == CellKind::Lstm ? 4 : 2;
  w_ = &params.add(prefix + ".w", gates * hidden_dim, input_dim + hidden_dim);
  b_ = &params.add(prefix + ".b", gates * hidden_dim, 1);
  if (kind == CellKind::Gru) {
    wn_ = &params.add(prefix + ".wn", hidden_dim, input_dim);
    bn_ = &params.add(prefix + ".bn", hidden_dim, 1);
    un_ = &params.add(prefix + ".un", hidden_dim, hidden_dim);
    bun_ = &params.add(prefix + ".bun", hidden_dim, 1);
  }
}

RnnState RecurrentCell::zero_state(Graph& g) const {
  return state_from(g, g.input(Matrix::Zero(hidden_dim_, 1)));
}

RnnState RecurrentCell::state_from(Graph& g, Expr h) const {
  RnnState s{h, {}};
  if (kind_ == CellKind::Lstm) s.c = g.input(Matrix::Zero(hidden_dim_, 1));
  return s;
}

RnnState RecurrentCell::step(Graph& g, Expr x, const RnnState& prev) const {
  const Expr xh = g.concat_rows({x, prev.h});
  const Expr pre = g.affine(g.param(*w_), xh, g.param(*b_));
  if (kind_ == CellKind::Lstm) {
    const Expr hc = g.lstm_cell(pre, prev.c);
    return {g.slice_rows(hc, 0, hidden_dim_), g.slice_rows(hc, hidden_dim_, hidden_dim_)};
  }
  const Expr xn = g.affine(g.param(*wn_), x, g.param(*bn_));
  const Expr hn = g.affine(g.param(*un_), prev.h, g.param(*bun_));
  return {g.gru_cell(pre, xn, hn, prev.h), {}};
}

BiRnnLayer::BiRnnLayer(ParameterSet& params, const std::string& prefix,
                       CellKind kind, int input_dim, int hidden_dim) {
  if (hidden_dim % 2 != 0) {
    throw Error(Errc::InvalidConfig, "bidirectional hidden size must be even");
  }
  forward_ = RecurrentCell(params, prefix + ".fwd", kind, input_dim, hidden_dim / 2);
  backward_ = RecurrentCell(params, prefix + ".bwd", kind, input_dim, hidden_dim / 2);
}

BiRnnLayer::Output BiRnnLayer::run(Graph& g, const std::vector<Expr>& inputs) const {
  const std::size_t n = inputs.size();
  std::vector<Expr> fwd(n);
  std::vector<Expr> bwd(n);
  RnnState s = forward_.zero_state(g);
  for (std::size_t t = 0; t < n; ++t) {
    s = forward_.step(g, inputs[t], s);
    fwd[t] = s.h;
  }
  s = backward_.zero_state(g);
  for (std::size_t t = n; t-- > 0;) {
    s = backward_.step(g, inputs[t], s);
    bwd[t] = s.h;
  }
  Output out;
  out.states.reserve(n);
  for (std::size_t t = 0; t < n; ++t) out.states.push_back(g.concat_rows({fwd[t], bwd[t]}));
  out.last_forward = fwd[n - 1];
  out.first_backward = bwd[0];
  return out;
}

}  // namespace pivotqg::nn
