#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pivotqg/nn/graph.h"
#include "pivotqg/nn/parameters.h"
#include "pivotqg/nn/rnn.h"
#include "pivotqg/qg/vocabulary.h"
#include "pivotqg/text/paragraph.h"
#include "pivotqg/text/squad.h"

namespace pivotqg::filter {

inline constexpr const char* kCls = "[CLS]";
inline constexpr const char* kSep = "[SEP]";

/// [CLS] question [SEP] paragraph [SEP]
struct PackedSequence {
  std::vector<std::string> tokens;
  std::vector<int> segment_ids;             // 0 up to the first [SEP], 1 after
  std::vector<long> paragraph_token_index;  // -1 outside the paragraph part
  std::size_t paragraph_begin = 0;          // first paragraph position
  std::size_t paragraph_end = 0;            // one past the last

  std::size_t size() const { return tokens.size(); }
};

// Truncates the paragraph tail to fit max_len. Throws EmptyInput or
// QuestionTooLong (question longer than max_len - 3).
PackedSequence pack(const std::vector<std::string>& question,
                    const std::vector<std::string>& paragraph, std::size_t max_len);

struct SpanScores {
  double s_null = 0.0;
  double s_best = 0.0;  // -inf when the paragraph part is empty
  std::size_t best_start = 0;
  std::size_t best_end = 0;
};

// s_null = S.C + E.C with C = states[:, 0]; s_best = max over
// begin <= i <= j < end, j - i < max_span_len, of S.T_i + E.T_j.
// Dot products run left to right in plain loops.
SpanScores score_spans(const Eigen::VectorXd& start, const Eigen::VectorXd& end,
                       const Eigen::MatrixXd& states, std::size_t begin, std::size_t stop,
                       std::size_t max_span_len);

struct FilterVerdict {
  SpanScores scores;
  double threshold = 0.0;
  bool answerable = true;

  double diff() const { return scores.s_null - scores.s_best; }
};

// answerable iff s_null - s_best <= V.
FilterVerdict verdict(const SpanScores& scores, double threshold);

struct CalibrationPoint {
  double diff = 0.0;
  bool answerable = true;
};

struct Calibration {
  double threshold = 0.0;
  double accuracy = 0.0;
  bool degenerate = false;  // single-class input; threshold is +inf
};

// Tries min-1, every midpoint of adjacent distinct diffs and max+1 for the
// rule "unanswerable iff diff > V"; keeps the most accurate, the smallest on
// ties. Throws EmptyDataset.
Calibration calibrate_threshold(const std::vector<CalibrationPoint>& validation);

/// Contextual encoder over a packed sequence. Returns H x L hidden states.
class ContextEncoder {
 public:
  virtual ~ContextEncoder() = default;
  virtual std::string kind() const = 0;
  virtual int hidden_size() const = 0;
  virtual nn::Expr encode(nn::Graph& g, const PackedSequence& packed,
                          std::mt19937_64* rng) const = 0;
  virtual nn::ParameterSet& parameters() = 0;
  virtual const nn::ParameterSet& parameters() const = 0;
  virtual nlohmann::json meta() const = 0;
};

struct FilterConfig {
  int epochs = 3;
  double learning_rate = 3e-5;
  int batch_size = 12;
  std::string optimizer = "adam";
  int max_seq_len = 384;
  int max_span_len = 30;
  double clip_norm = 1.0;
  // toy encoder
  int embedding_dim = 32;
  int segment_dim = 8;
  int hidden_size = 64;
  int vocab_size = 30000;
  double dropout = 0.1;
  double init_scale = 0.1;
  unsigned long long seed = 1;

  void validate() const;  // throws InvalidConfig
};

void to_json(nlohmann::json& j, const FilterConfig& c);
void from_json(const nlohmann::json& j, FilterConfig& c);

/// One bidirectional LSTM layer over [word; segment; mean question word]
/// embeddings. The question mean gives paragraph positions direct access to
/// the question, standing in for cross-segment self-attention.
class ToyContextEncoder : public ContextEncoder {
 public:
  ToyContextEncoder(const FilterConfig& config, qg::Vocabulary vocab);

  std::string kind() const override { return "toy-bilstm"; }
  int hidden_size() const override { return hidden_; }
  nn::Expr encode(nn::Graph& g, const PackedSequence& packed,
                  std::mt19937_64* rng) const override;
  nn::ParameterSet& parameters() override { return params_; }
  const nn::ParameterSet& parameters() const override { return params_; }
  nlohmann::json meta() const override;

  const qg::Vocabulary& vocab() const { return vocab_; }

 private:
  qg::Vocabulary vocab_;
  int hidden_;
  double dropout_;
  nn::ParameterSet params_;
  const nn::Parameter* word_ = nullptr;
  const nn::Parameter* segment_ = nullptr;
  std::unique_ptr<nn::BiRnnLayer> rnn_;
};

/// Encoder plus the start and end vectors S, E in R^H.
class SpanScoringModel {
 public:
  SpanScoringModel(FilterConfig config, std::unique_ptr<ContextEncoder> encoder);

  const FilterConfig& config() const { return config_; }
  ContextEncoder& encoder() { return *encoder_; }
  const ContextEncoder& encoder() const { return *encoder_; }
  nn::ParameterSet& parameters() { return encoder_->parameters(); }

  PackedSequence pack(const std::vector<std::string>& question,
                      const std::vector<std::string>& paragraph) const;
  SpanScores score(const PackedSequence& packed) const;

  // Mean of the start and end cross-entropies over [CLS] and the paragraph
  // positions. Targets are packed indices; (0, 0) marks unanswerable.
  nn::Expr loss(nn::Graph& g, const PackedSequence& packed, std::size_t start_target,
                std::size_t end_target, std::mt19937_64* rng) const;

  void save(const std::string& path) const;
  static SpanScoringModel load(const std::string& path);

 private:
  FilterConfig config_;
  std::unique_ptr<ContextEncoder> encoder_;
  const nn::Parameter* start_ = nullptr;
  const nn::Parameter* end_ = nullptr;
};

FilterVerdict is_answerable(const SpanScoringModel& model, const std::string& question,
                            const Paragraph& paragraph, double threshold);

struct FilterExample {
  std::vector<std::string> question;
  std::vector<std::string> paragraph;
  bool answerable = false;
  std::size_t answer_first = 0;  // paragraph token indices, inclusive
  std::size_t answer_last = 0;
};

struct FilterEpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  std::size_t examples = 0;  // after dropping answers lost to truncation
};

// Throws EmptyDataset or DivergedLoss.
std::vector<FilterEpochStats> finetune_filter(SpanScoringModel& model,
                                              const std::vector<FilterExample>& data);

qg::Vocabulary filter_vocabulary(const std::vector<FilterExample>& data, std::size_t max_size);

// One example per record; unanswerable ones keep the whole paragraph.
std::vector<FilterExample> filter_examples_from_squad(const SquadDataset& data);

// Scores every example and pairs its diff with the gold label.
std::vector<CalibrationPoint> calibration_points(const SpanScoringModel& model,
                                                 const std::vector<FilterExample>& data);

}  // namespace pivotqg::filter
