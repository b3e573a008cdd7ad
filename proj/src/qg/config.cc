#include "pivotqg/qg/config.h"

#include <set>

#include "pivotqg/common/error.h"

namespace pivotqg::qg {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::InvalidConfig, "qg config: " + what);
}

}  // namespace

void QGConfig::validate() const {
  require(embedding_dim > 0, "embedding_dim must be positive");
  require(bio_embedding_dim > 0, "bio_embedding_dim must be positive");
  require(encoder_layers > 0, "encoder_layers must be positive");
  require(decoder_layers > 0, "decoder_layers must be positive");
  require(hidden_size > 0 && hidden_size % 2 == 0, "hidden_size must be positive and even");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0,1)");
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(epochs > 0, "epochs must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(beam_width > 0, "beam_width must be positive");
  require(max_decode_len > 0, "max_decode_len must be positive");
  require(max_source_len > 0, "max_source_len must be positive");
  require(vocab_size > 4, "vocab_size must exceed the reserved entries");
  require(cell == "lstm" || cell == "gru", "cell must be lstm or gru");
  require(optimizer == "sgd" || optimizer == "adam", "optimizer must be sgd or adam");
  require(anneal_start_epoch > 0, "anneal_start_epoch must be positive");
  require(anneal_factor > 0.0 && anneal_factor <= 1.0, "anneal_factor must be in (0,1]");
  require(init_scale > 0.0, "init_scale must be positive");
  require(feature_embedding_dim > 0, "feature_embedding_dim must be positive");
}

void to_json(nlohmann::json& j, const QGConfig& c) {
  j = {
      {"embedding_dim", c.embedding_dim},
      {"bio_embedding_dim", c.bio_embedding_dim},
      {"encoder_layers", c.encoder_layers},
      {"decoder_layers", c.decoder_layers},
      {"hidden_size", c.hidden_size},
      {"dropout", c.dropout},
      {"learning_rate", c.learning_rate},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"beam_width", c.beam_width},
      {"max_decode_len", c.max_decode_len},
      {"max_source_len", c.max_source_len},
      {"vocab_size", c.vocab_size},
      {"embeddings_frozen", c.embeddings_frozen},
      {"embeddings_path", c.embeddings_path},
      {"cell", c.cell},
      {"optimizer", c.optimizer},
      {"anneal_start_epoch", c.anneal_start_epoch},
      {"anneal_factor", c.anneal_factor},
      {"clip_norm", c.clip_norm},
      {"init_scale", c.init_scale},
      {"length_normalize", c.length_normalize},
      {"linguistic_features", c.linguistic_features},
      {"feature_embedding_dim", c.feature_embedding_dim},
      {"seed", c.seed},
  };
}

void from_json(const nlohmann::json& j, QGConfig& c) {
  if (!j.is_object()) throw Error(Errc::InvalidConfig, "qg config must be a JSON object");
  nlohmann::json known;
  to_json(known, QGConfig{});
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error(Errc::InvalidConfig, "qg config: unknown key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("embedding_dim", c.embedding_dim);
    get("bio_embedding_dim", c.bio_embedding_dim);
    get("encoder_layers", c.encoder_layers);
    get("decoder_layers", c.decoder_layers);
    get("hidden_size", c.hidden_size);
    get("dropout", c.dropout);
    get("learning_rate", c.learning_rate);
    get("epochs", c.epochs);
    get("batch_size", c.batch_size);
    get("beam_width", c.beam_width);
    get("max_decode_len", c.max_decode_len);
    get("max_source_len", c.max_source_len);
    get("vocab_size", c.vocab_size);
    get("embeddings_frozen", c.embeddings_frozen);
    get("embeddings_path", c.embeddings_path);
    get("cell", c.cell);
    get("optimizer", c.optimizer);
    get("anneal_start_epoch", c.anneal_start_epoch);
    get("anneal_factor", c.anneal_factor);
    get("clip_norm", c.clip_norm);
    get("init_scale", c.init_scale);
    get("length_normalize", c.length_normalize);
    get("linguistic_features", c.linguistic_features);
    get("feature_embedding_dim", c.feature_embedding_dim);
    get("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("qg config: ") + e.what());
  }
  c.validate();
}

}  // namespace pivotqg::qg
