#pragma once

#include <string>

#include <json.hpp>

namespace pivotqg::qg {

/// Generator hyper-parameters. Defaults are the published architecture and
/// optimisation settings; toy runs override the sizes.
struct QGConfig {
  int embedding_dim = 300;
  int bio_embedding_dim = 16;
  int encoder_layers = 2;
  int decoder_layers = 1;
  int hidden_size = 600;
  double dropout = 0.3;
  double learning_rate = 0.1;
  int epochs = 20;
  int batch_size = 64;
  int beam_width = 5;
  int max_decode_len = 30;
  int max_source_len = 400;
  int vocab_size = 20000;  // includes the four reserved entries
  bool embeddings_frozen = true;
  std::string embeddings_path;  // optional pretrained text vectors
  std::string cell = "lstm";
  std::string optimizer = "sgd";
  int anneal_start_epoch = 8;  // halve-style decay from this epoch on
  double anneal_factor = 0.5;
  double clip_norm = 5.0;
  double init_scale = 0.1;
  bool length_normalize = false;
  bool linguistic_features = false;
  int feature_embedding_dim = 16;
  unsigned long long seed = 1;

  void validate() const;  // throws InvalidConfig
};

void to_json(nlohmann::json& j, const QGConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, QGConfig& c);

}  // namespace pivotqg::qg
