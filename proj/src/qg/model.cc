#include "pivotqg/qg/model.h"

#include <fstream>
#include <sstream>

#include "pivotqg/answers/annotator.h"
#include "pivotqg/common/error.h"
#include "pivotqg/nn/checkpoint.h"

namespace pivotqg::qg {

namespace {

constexpr int kPosKinds = 13;  // HeuristicAnnotator::Pos values

std::vector<int> pos_features(const std::vector<std::string>& tokens) {
  Paragraph p;
  p.tokens = tokens;
  p.token_offsets.resize(tokens.size());
  const auto tags = HeuristicAnnotator().tag(p);
  std::vector<int> out;
  out.reserve(tags.size());
  for (auto t : tags) out.push_back(static_cast<int>(t));
  return out;
}

}  // namespace

QGModel::QGModel(QGConfig config, Vocabulary vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.validate();
  const int emb = config_.embedding_dim;
  const int hid = config_.hidden_size;
  const auto vocab_size = static_cast<Eigen::Index>(vocab_.size());
  const auto kind = nn::parse_cell_kind(config_.cell);

  word_embedding_ = &params_.add("embed.word", emb, vocab_size);
  bio_embedding_ = &params_.add("embed.bio", config_.bio_embedding_dim, 3);
  int input_dim = emb + config_.bio_embedding_dim;
  if (config_.linguistic_features) {
    feature_embedding_ = &params_.add("embed.feature", config_.feature_embedding_dim, kPosKinds);
    input_dim += config_.feature_embedding_dim;
  }
  for (int k = 0; k < config_.encoder_layers; ++k) {
    encoder_.emplace_back(params_, "enc.l" + std::to_string(k), kind,
                          k == 0 ? input_dim : hid, hid);
  }
  for (int k = 0; k < config_.decoder_layers; ++k) {
    const std::string prefix = "dec.l" + std::to_string(k);
    decoder_.emplace_back(params_, prefix, kind, k == 0 ? emb + hid : hid, hid);
    init_w_.push_back(&params_.add(prefix + ".init.w", hid, hid));
    init_b_.push_back(&params_.add(prefix + ".init.b", hid, 1));
  }
  attn_w_ = &params_.add("attn.w", hid, hid);
  comb_w_ = &params_.add("out.comb.w", hid, 2 * hid);
  comb_b_ = &params_.add("out.comb.b", hid, 1);
  proj_w_ = &params_.add("out.proj.w", vocab_size, hid);
  proj_b_ = &params_.add("out.proj.b", vocab_size, 1);
  gate_w_ = &params_.add("gate.w", 1, 2 * hid + emb);
  gate_b_ = &params_.add("gate.b", 1, 1);

  std::mt19937_64 rng(config_.seed);
  params_.init_uniform(config_.init_scale, rng);
}

nn::Expr QGModel::embed_token(nn::Graph& g, TokenId id) const {
  // Dynamic-dictionary tokens have no embedding of their own.
  if (id < 0 || static_cast<std::size_t>(id) >= vocab_.size()) id = Vocabulary::kUnk;
  return g.lookup(*word_embedding_, id);
}

EncodedParagraph QGModel::encode(nn::Graph& g, const BioTaggedInput& tagged,
                                 std::mt19937_64* rng) const {
  const std::size_t n = tagged.tokens.size();
  if (n == 0) throw Error(Errc::EmptyInput, "cannot encode an empty source");
  if (tagged.tags.size() != n) throw Error(Errc::ShapeMismatch, "tags and tokens differ in length");
  if (n > static_cast<std::size_t>(config_.max_source_len)) {
    throw Error(Errc::SequenceTooLong, "source of " + std::to_string(n) +
                                           " tokens exceeds max_source_len " +
                                           std::to_string(config_.max_source_len));
  }
  std::vector<int> features;
  if (config_.linguistic_features) features = pos_features(tagged.tokens);

  std::vector<nn::Expr> inputs;
  inputs.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<nn::Expr> parts = {
        embed_token(g, vocab_.index(tagged.tokens[t])),
        g.lookup(*bio_embedding_, static_cast<Eigen::Index>(tagged.tags[t]))};
    if (config_.linguistic_features) parts.push_back(g.lookup(*feature_embedding_, features[t]));
    inputs.push_back(g.concat_rows(parts));
  }

  nn::BiRnnLayer::Output out;
  for (std::size_t k = 0; k < encoder_.size(); ++k) {
    if (k > 0 && rng != nullptr) {
      for (auto& x : inputs) x = g.dropout(x, config_.dropout, *rng);
    }
    out = encoder_[k].run(g, inputs);
    inputs = out.states;
  }

  EncodedParagraph enc;
  enc.token_states = g.concat_cols(out.states);
  enc.summary = g.concat_rows({out.last_forward, out.first_backward});
  enc.source = tagged;
  enc.dictionary = DynamicDictionary(vocab_, tagged.tokens);
  return enc;
}

DecoderState QGModel::initial_state(nn::Graph& g, const EncodedParagraph& enc) const {
  DecoderState s;
  for (std::size_t k = 0; k < decoder_.size(); ++k) {
    const nn::Expr h0 = g.tanh(g.affine(g.param(*init_w_[k]), enc.summary, g.param(*init_b_[k])));
    s.layers.push_back(decoder_[k].state_from(g, h0));
  }
  s.feed = g.input(nn::Matrix::Zero(config_.hidden_size, 1));
  return s;
}

StepOutput QGModel::decode_step(nn::Graph& g, const DecoderState& state, TokenId prev,
                                const EncodedParagraph& enc, const StepOptions& options) const {
  const auto extended = static_cast<Eigen::Index>(enc.dictionary.extended_size());
  if (prev < 0 || prev >= extended) {
    throw Error(Errc::ShapeMismatch, "previous token outside the extended vocabulary");
  }
  if (state.layers.size() != decoder_.size()) {
    throw Error(Errc::ShapeMismatch, "decoder state has the wrong number of layers");
  }
  StepOutput out;
  const nn::Expr emb = embed_token(g, prev);
  nn::Expr x = g.concat_rows({emb, state.feed});
  for (std::size_t k = 0; k < decoder_.size(); ++k) {
    out.next.layers.push_back(decoder_[k].step(g, x, state.layers[k]));
    x = out.next.layers.back().h;
  }
  const nn::Expr h = x;

  const nn::Expr scores = g.matmul_transposed(enc.token_states, g.matmul(g.param(*attn_w_), h));
  out.attention = g.sparsemax(scores);
  const nn::Expr context = g.matmul(enc.token_states, out.attention);
  const nn::Expr attentional =
      g.tanh(g.affine(g.param(*comb_w_), g.concat_rows({h, context}), g.param(*comb_b_)));
  out.next.feed = attentional;

  const nn::Expr logits = g.affine(g.param(*proj_w_), attentional, g.param(*proj_b_));
  const nn::Expr generate = g.softmax(logits, {Vocabulary::kPad, Vocabulary::kBos});

  if (options.forced_gate) {
    out.gate = g.scalar(*options.forced_gate);
  } else {
    out.gate = g.sigmoid(g.affine(g.param(*gate_w_), g.concat_rows({attentional, context, emb}),
                                  g.param(*gate_b_)));
  }
  const auto& ids = enc.dictionary.source_ids();
  const nn::Expr copy = g.scatter_add(out.attention,
                                      std::vector<Eigen::Index>(ids.begin(), ids.end()), extended);
  out.distribution = g.add(g.scalar_mul(out.gate, g.pad_rows(generate, extended)),
                           g.scalar_mul(g.one_minus(out.gate), copy));
  return out;
}

nn::Expr QGModel::loss(nn::Graph& g, const BioTaggedInput& source,
                       const std::vector<std::string>& target, std::mt19937_64* rng) const {
  const EncodedParagraph enc = encode(g, source, rng);
  DecoderState state = initial_state(g, enc);
  std::vector<nn::Expr> terms;
  TokenId prev = Vocabulary::kBos;
  for (std::size_t t = 0; t <= target.size(); ++t) {
    const TokenId gold = t < target.size() ? enc.dictionary.target_id(vocab_, target[t])
                                           : Vocabulary::kEos;
    StepOutput step = decode_step(g, state, prev, enc);
    terms.push_back(g.neg_log(g.pick(step.distribution, gold), kLikelihoodFloor));
    state = std::move(step.next);
    prev = gold;
  }
  return g.sum(terms);
}

std::size_t QGModel::load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidConfig, "cannot open embeddings file '" + path + "'");
  auto& table = params_.get("embed.word");
  std::size_t covered = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token) || !vocab_.contains(token)) continue;
    nn::Vector v(config_.embedding_dim);
    for (int k = 0; k < config_.embedding_dim; ++k) {
      if (!(fields >> v[k])) {
        throw Error(Errc::InvalidConfig, "embedding for '" + token + "' has fewer than " +
                                             std::to_string(config_.embedding_dim) + " values");
      }
    }
    table.value.col(vocab_.index(token)) = v;
    ++covered;
  }
  table.frozen = config_.embeddings_frozen;
  return covered;
}

void QGModel::save(const std::string& path) const {
  nlohmann::json meta = {{"config", config_}, {"vocab", vocab_},
                         {"word_embedding_frozen", params_.get("embed.word").frozen}};
  nn::write_checkpoint(path, "qg", meta, params_);
}

QGModel QGModel::load(const std::string& path) {
  const auto contents = nn::read_checkpoint(path);
  if (contents.kind != "qg") {
    throw Error(Errc::BadCheckpoint, "'" + path + "' holds a " + contents.kind +
                                         " checkpoint, not a question generator");
  }
  QGModel model(contents.meta.at("config").get<QGConfig>(),
                contents.meta.at("vocab").get<Vocabulary>());
  nn::restore_parameters(contents, model.params_);
  model.params_.get("embed.word").frozen = contents.meta.value("word_embedding_frozen", false);
  return model;
}

}  // namespace pivotqg::qg
