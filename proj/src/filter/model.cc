#include <algorithm>
#include <cmath>
#include <numeric>

#include "pivotqg/answers/span.h"
#include "pivotqg/common/error.h"
#include "pivotqg/filter/filter.h"
#include "pivotqg/nn/checkpoint.h"
#include "pivotqg/nn/optimizer.h"
#include "pivotqg/text/review.h"

namespace pivotqg::filter {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::InvalidConfig, "filter config: " + what);
}

}  // namespace

void FilterConfig::validate() const {
  require(epochs > 0, "epochs must be positive");
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(optimizer == "sgd" || optimizer == "adam", "optimizer must be sgd or adam");
  require(max_seq_len > 4, "max_seq_len must exceed 4");
  require(max_span_len > 0, "max_span_len must be positive");
  require(embedding_dim > 0 && segment_dim > 0, "embedding sizes must be positive");
  require(hidden_size > 0 && hidden_size % 2 == 0, "hidden_size must be positive and even");
  require(vocab_size > 6, "vocab_size must exceed the reserved entries");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0,1)");
  require(init_scale > 0.0, "init_scale must be positive");
}

void to_json(nlohmann::json& j, const FilterConfig& c) {
  j = {{"epochs", c.epochs},
       {"learning_rate", c.learning_rate},
       {"batch_size", c.batch_size},
       {"optimizer", c.optimizer},
       {"max_seq_len", c.max_seq_len},
       {"max_span_len", c.max_span_len},
       {"clip_norm", c.clip_norm},
       {"embedding_dim", c.embedding_dim},
       {"segment_dim", c.segment_dim},
       {"hidden_size", c.hidden_size},
       {"vocab_size", c.vocab_size},
       {"dropout", c.dropout},
       {"init_scale", c.init_scale},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, FilterConfig& c) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "filter config must be a JSON object");
  nlohmann::json known;
  to_json(known, FilterConfig{});
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error(Errc::InvalidConfig, "filter config: unknown key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("epochs", c.epochs);
    get("learning_rate", c.learning_rate);
    get("batch_size", c.batch_size);
    get("optimizer", c.optimizer);
    get("max_seq_len", c.max_seq_len);
    get("max_span_len", c.max_span_len);
    get("clip_norm", c.clip_norm);
    get("embedding_dim", c.embedding_dim);
    get("segment_dim", c.segment_dim);
    get("hidden_size", c.hidden_size);
    get("vocab_size", c.vocab_size);
    get("dropout", c.dropout);
    get("init_scale", c.init_scale);
    get("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("filter config: ") + e.what());
  }
  c.validate();
}

ToyContextEncoder::ToyContextEncoder(const FilterConfig& config, qg::Vocabulary vocab)
    : vocab_(std::move(vocab)), hidden_(config.hidden_size), dropout_(config.dropout) {
  config.validate();
  vocab_.add(kCls);
  vocab_.add(kSep);
  word_ = &params_.add("enc.word", config.embedding_dim, static_cast<Eigen::Index>(vocab_.size()));
  segment_ = &params_.add("enc.segment", config.segment_dim, 2);
  rnn_ = std::make_unique<nn::BiRnnLayer>(params_, "enc.rnn", nn::CellKind::Lstm,
                                          2 * config.embedding_dim + config.segment_dim, hidden_);
  std::mt19937_64 rng(config.seed);
  params_.init_uniform(config.init_scale, rng);
}

nn::Expr ToyContextEncoder::encode(nn::Graph& g, const PackedSequence& packed,
                                   std::mt19937_64* rng) const {
  std::vector<nn::Expr> words;
  words.reserve(packed.size());
  for (const auto& tok : packed.tokens) words.push_back(g.lookup(*word_, vocab_.index(tok)));

  // Mean question embedding, shared by every position.
  std::vector<nn::Expr> question;
  for (std::size_t t = 1; t + 1 < packed.paragraph_begin; ++t) {
    question.push_back(words[t]);
  }
  const nn::Expr summary =
      g.scale(g.sum(question), 1.0 / static_cast<double>(std::max<std::size_t>(1, question.size())));

  std::vector<nn::Expr> inputs;
  inputs.reserve(packed.size());
  for (std::size_t t = 0; t < packed.size(); ++t) {
    nn::Expr x = g.concat_rows({words[t], g.lookup(*segment_, packed.segment_ids[t]), summary});
    if (rng && dropout_ > 0.0) x = g.dropout(x, dropout_, *rng);
    inputs.push_back(x);
  }
  return g.concat_cols(rnn_->run(g, inputs).states);
}

nlohmann::json ToyContextEncoder::meta() const { return {{"vocab", vocab_}}; }

SpanScoringModel::SpanScoringModel(FilterConfig config, std::unique_ptr<ContextEncoder> encoder)
    : config_(std::move(config)), encoder_(std::move(encoder)) {
  config_.validate();
  if (!encoder_) throw Error(Errc::InvalidConfig, "filter needs an encoder");
  const int h = encoder_->hidden_size();
  auto& s = encoder_->parameters().add("span.start", h, 1);
  auto& e = encoder_->parameters().add("span.end", h, 1);
  std::mt19937_64 rng(config_.seed ^ 0x5eedULL);
  std::uniform_real_distribution<double> u(-config_.init_scale, config_.init_scale);
  for (auto* p : {&s, &e}) {
    for (Eigen::Index k = 0; k < h; ++k) p->value(k, 0) = u(rng);
  }
  start_ = &s;
  end_ = &e;
}

PackedSequence SpanScoringModel::pack(const std::vector<std::string>& question,
                                      const std::vector<std::string>& paragraph) const {
  return filter::pack(question, paragraph, static_cast<std::size_t>(config_.max_seq_len));
}

SpanScores SpanScoringModel::score(const PackedSequence& packed) const {
  nn::Graph g(false);
  const nn::Expr states = encoder_->encode(g, packed, nullptr);
  return score_spans(start_->value.col(0), end_->value.col(0), g.value(states),
                     packed.paragraph_begin, packed.paragraph_end,
                     static_cast<std::size_t>(config_.max_span_len));
}

nn::Expr SpanScoringModel::loss(nn::Graph& g, const PackedSequence& packed,
                                std::size_t start_target, std::size_t end_target,
                                std::mt19937_64* rng) const {
  auto allowed_target = [&](std::size_t t) {
    return t == 0 || (t >= packed.paragraph_begin && t < packed.paragraph_end);
  };
  if (!allowed_target(start_target) || !allowed_target(end_target) || end_target < start_target) {
    throw Error(Errc::ShapeMismatch, "span targets must be [CLS] or paragraph positions");
  }
  std::vector<bool> allowed(packed.size(), false);
  allowed[0] = true;
  for (std::size_t t = packed.paragraph_begin; t < packed.paragraph_end; ++t) allowed[t] = true;

  const nn::Expr states = encoder_->encode(g, packed, rng);
  const nn::Expr start_logits = g.matmul_transposed(states, g.param(*start_));
  const nn::Expr end_logits = g.matmul_transposed(states, g.param(*end_));
  return g.scale(g.add(g.nll_softmax(start_logits, static_cast<Eigen::Index>(start_target), allowed),
                       g.nll_softmax(end_logits, static_cast<Eigen::Index>(end_target), allowed)),
                 0.5);
}

void SpanScoringModel::save(const std::string& path) const {
  const nlohmann::json meta = {
      {"config", config_}, {"encoder", encoder_->kind()}, {"encoder_meta", encoder_->meta()}};
  nn::write_checkpoint(path, "filter", meta, encoder_->parameters());
}

SpanScoringModel SpanScoringModel::load(const std::string& path) {
  const auto contents = nn::read_checkpoint(path);
  if (contents.kind != "filter") {
    throw Error(Errc::BadCheckpoint, "'" + path + "' holds a " + contents.kind +
                                         " checkpoint, not an answerability filter");
  }
  try {
    const auto config = contents.meta.at("config").get<FilterConfig>();
    const auto kind = contents.meta.at("encoder").get<std::string>();
    if (kind != "toy-bilstm") {
      throw Error(Errc::BadCheckpoint, "unsupported filter encoder '" + kind + "'");
    }
    auto encoder = std::make_unique<ToyContextEncoder>(
        config, contents.meta.at("encoder_meta").at("vocab").get<qg::Vocabulary>());
    SpanScoringModel model(config, std::move(encoder));
    nn::restore_parameters(contents, model.parameters());
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadCheckpoint, std::string("filter checkpoint metadata: ") + e.what());
  }
}

FilterVerdict is_answerable(const SpanScoringModel& model, const std::string& question,
                            const Paragraph& paragraph, double threshold) {
  const Paragraph q = tokenize(question);
  return verdict(model.score(model.pack(q.tokens, paragraph.tokens)), threshold);
}

std::vector<FilterEpochStats> finetune_filter(SpanScoringModel& model,
                                              const std::vector<FilterExample>& data) {
  struct Prepared {
    PackedSequence packed;
    std::size_t start;
    std::size_t end;
  };
  std::vector<Prepared> prepared;
  for (const auto& ex : data) {
    PackedSequence p = model.pack(ex.question, ex.paragraph);
    if (!ex.answerable) {
      prepared.push_back({std::move(p), 0, 0});
      continue;
    }
    const std::size_t s = p.paragraph_begin + ex.answer_first;
    const std::size_t e = p.paragraph_begin + ex.answer_last;
    if (ex.answer_last < ex.answer_first || e >= p.paragraph_end) continue;  // truncated away
    prepared.push_back({std::move(p), s, e});
  }
  if (prepared.empty()) throw Error(Errc::EmptyDataset, "no usable filter training examples");

  const FilterConfig& config = model.config();
  auto optimizer = nn::make_optimizer(config.optimizer);
  nn::ParameterSet& params = model.parameters();
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(prepared.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(config.batch_size);

  std::vector<FilterEpochStats> history;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      params.zero_grad();
      for (std::size_t k = begin; k < end; ++k) {
        const Prepared& ex = prepared[order[k]];
        nn::Graph g;
        const nn::Expr loss = model.loss(g, ex.packed, ex.start, ex.end, &rng);
        const double value = g.scalar_value(loss);
        if (!std::isfinite(value)) {
          throw Error(Errc::DivergedLoss, "non-finite filter loss at epoch " + std::to_string(epoch));
        }
        total += value;
        g.backward(loss);
        g.accumulate_gradients(params);
      }
      params.scale_grad(1.0 / static_cast<double>(end - begin));
      if (config.clip_norm > 0) nn::clip_gradients(params, config.clip_norm);
      optimizer->step(params, config.learning_rate);
    }
    history.push_back({epoch, total / static_cast<double>(prepared.size()), prepared.size()});
  }
  return history;
}

qg::Vocabulary filter_vocabulary(const std::vector<FilterExample>& data, std::size_t max_size) {
  std::vector<std::vector<std::string>> corpora;
  for (const auto& ex : data) {
    corpora.push_back(ex.question);
    corpora.push_back(ex.paragraph);
  }
  // Two slots stay free for [CLS] and [SEP].
  return qg::Vocabulary::build(corpora, max_size > 2 ? max_size - 2 : max_size);
}

std::vector<FilterExample> filter_examples_from_squad(const SquadDataset& data) {
  std::vector<FilterExample> out;
  for (const auto& r : data.records) {
    const Paragraph& p = data.paragraphs.at(r.paragraph_index);
    if (p.size() == 0) continue;
    FilterExample ex;
    try {
      ex.question = tokenize(r.question).tokens;
    } catch (const Error&) {
      continue;
    }
    ex.paragraph = p.tokens;
    if (r.answer) {
      try {
        const AnswerSpan span = validate_custom_span(p, *r.answer);
        ex.answerable = true;
        ex.answer_first = span.tokens.first;
        ex.answer_last = span.tokens.last;
      } catch (const Error&) {
        continue;
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<CalibrationPoint> calibration_points(const SpanScoringModel& model,
                                                 const std::vector<FilterExample>& data) {
  std::vector<CalibrationPoint> out;
  out.reserve(data.size());
  for (const auto& ex : data) {
    const SpanScores s = model.score(model.pack(ex.question, ex.paragraph));
    out.push_back({s.s_null - s.s_best, ex.answerable});
  }
  return out;
}

}  // namespace pivotqg::filter
