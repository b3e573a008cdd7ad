#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pivotqg/nn/graph.h"
#include "pivotqg/nn/parameters.h"

namespace pivotqg::nn {

enum class CellKind { Lstm, Gru };

std::string_view cell_kind_name(CellKind kind);
CellKind parse_cell_kind(std::string_view name);

struct RnnState {
  Expr h;
  Expr c;  // unused by GRU
};

/// One recurrent cell whose weights live in a ParameterSet under `prefix`.
class RecurrentCell {
 public:
  RecurrentCell() = default;
  RecurrentCell(ParameterSet& params, const std::string& prefix, CellKind kind,
                int input_dim, int hidden_dim);

  RnnState zero_state(Graph& g) const;
  RnnState state_from(Graph& g, Expr h) const;
  RnnState step(Graph& g, Expr x, const RnnState& prev) const;

  int input_dim() const { return input_dim_; }
  int hidden_dim() const { return hidden_dim_; }

 private:
  CellKind kind_ = CellKind::Lstm;
  int input_dim_ = 0;
  int hidden_dim_ = 0;
  const Parameter* w_ = nullptr;   // LSTM: 4H x (D+H); GRU: 2H x (D+H)
  const Parameter* b_ = nullptr;
  const Parameter* wn_ = nullptr;  // GRU candidate input weights
  const Parameter* bn_ = nullptr;
  const Parameter* un_ = nullptr;  // GRU candidate recurrent weights
  const Parameter* bun_ = nullptr;
};

/// Bidirectional layer; each direction has hidden_dim / 2 units so the
/// concatenated state per position has hidden_dim rows.
class BiRnnLayer {
 public:
  BiRnnLayer() = default;
  BiRnnLayer(ParameterSet& params, const std::string& prefix, CellKind kind,
             int input_dim, int hidden_dim);

  struct Output {
    std::vector<Expr> states;  // [forward_i; backward_i] per position
    Expr last_forward;
    Expr first_backward;
  };
  Output run(Graph& g, const std::vector<Expr>& inputs) const;

 private:
  RecurrentCell forward_;
  RecurrentCell backward_;
};

}  // namespace pivotqg::nn
