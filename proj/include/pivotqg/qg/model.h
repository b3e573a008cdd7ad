#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pivotqg/answers/span.h"
#include "pivotqg/nn/graph.h"
#include "pivotqg/nn/parameters.h"
#include "pivotqg/nn/rnn.h"
#include "pivotqg/qg/config.h"
#include "pivotqg/qg/vocabulary.h"

namespace pivotqg::qg {

/// Encoder output bound to the graph that produced it.
struct EncodedParagraph {
  nn::Expr token_states;  // hidden_size x source_len
  nn::Expr summary;       // hidden_size x 1
  BioTaggedInput source;
  DynamicDictionary dictionary;

  std::size_t source_len() const { return source.tokens.size(); }
};

struct DecoderState {
  std::vector<nn::RnnState> layers;
  nn::Expr feed;  // previous attentional hidden state (input feeding)
};

struct StepOptions {
  std::optional<double> forced_gate;  // pins the generate/copy mixture
};

struct StepOutput {
  DecoderState next;
  nn::Expr distribution;  // extended_size x 1
  nn::Expr attention;     // source_len x 1, sparsemax weights
  nn::Expr gate;          // 1x1 probability of generating from the fixed vocabulary
};

/// Answer-aware encoder-decoder with sparsemax attention and a
/// dynamic-dictionary copy pathway. The same attention row weighs the
/// context vector and the copy distribution.
class QGModel {
 public:
  QGModel(QGConfig config, Vocabulary vocab);

  QGModel(QGModel&&) = default;
  QGModel& operator=(QGModel&&) = default;

  // `rng` enables dropout between encoder layers; pass nullptr at inference.
  // Throws EmptyInput or SequenceTooLong.
  EncodedParagraph encode(nn::Graph& g, const BioTaggedInput& tagged,
                          std::mt19937_64* rng = nullptr) const;
  DecoderState initial_state(nn::Graph& g, const EncodedParagraph& enc) const;
  StepOutput decode_step(nn::Graph& g, const DecoderState& state, TokenId prev,
                         const EncodedParagraph& enc, const StepOptions& options = {}) const;

  // Summed negative log-likelihood of `target` followed by </s>.
  nn::Expr loss(nn::Graph& g, const BioTaggedInput& source,
                const std::vector<std::string>& target, std::mt19937_64* rng = nullptr) const;

  // Reads whitespace-separated "token v1 .. vD" lines; returns how many
  // vocabulary entries were covered.
  std::size_t load_embeddings(const std::string& path);

  const QGConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  nn::ParameterSet& parameters() { return params_; }
  const nn::ParameterSet& parameters() const { return params_; }

  void save(const std::string& path) const;
  static QGModel load(const std::string& path);

 private:
  nn::Expr embed_token(nn::Graph& g, TokenId id) const;

  QGConfig config_;
  Vocabulary vocab_;
  nn::ParameterSet params_;

  const nn::Parameter* word_embedding_ = nullptr;
  const nn::Parameter* bio_embedding_ = nullptr;
  const nn::Parameter* feature_embedding_ = nullptr;
  std::vector<nn::BiRnnLayer> encoder_;
  std::vector<nn::RecurrentCell> decoder_;
  std::vector<const nn::Parameter*> init_w_;
  std::vector<const nn::Parameter*> init_b_;
  const nn::Parameter* attn_w_ = nullptr;
  const nn::Parameter* comb_w_ = nullptr;
  const nn::Parameter* comb_b_ = nullptr;
  const nn::Parameter* proj_w_ = nullptr;
  const nn::Parameter* proj_b_ = nullptr;
  const nn::Parameter* gate_w_ = nullptr;
  const nn::Parameter* gate_b_ = nullptr;
};

// Floor added inside the log of the copy-mixture likelihood; sparsemax can
// give an out-of-vocabulary target exactly zero mass.
inline constexpr double kLikelihoodFloor = 1e-10;

}  // namespace pivotqg::qg
