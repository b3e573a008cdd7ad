#include "pivotqg/qg/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pivotqg/common/error.h"
#include "pivotqg/nn/optimizer.h"
#include "pivotqg/text/review.h"

namespace pivotqg::qg {

double annealed_rate(const QGConfig& config, int epoch) {
  const int decays = std::max(0, epoch - config.anneal_start_epoch + 1);
  return config.learning_rate * std::pow(config.anneal_factor, decays);
}

std::vector<EpochStats> train(QGModel& model, const std::vector<TrainingExample>& data,
                              const EpochCallback& on_epoch) {
  if (data.empty()) throw Error(Errc::EmptyDataset, "no training examples");
  const QGConfig& config = model.config();
  auto optimizer = nn::make_optimizer(config.optimizer);
  nn::ParameterSet& params = model.parameters();
  std::mt19937_64 rng(config.seed);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(config.batch_size);

  std::vector<EpochStats> history;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double lr = annealed_rate(config, epoch);
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      const std::size_t end = std::min(order.size(), begin + batch);
      params.zero_grad();
      for (std::size_t k = begin; k < end; ++k) {
        const TrainingExample& ex = data[order[k]];
        nn::Graph g;
        const nn::Expr loss = model.loss(g, ex.source, ex.target, &rng);
        const double value = g.scalar_value(loss);
        if (!std::isfinite(value)) {
          throw Error(Errc::DivergedLoss, "non-finite loss at epoch " + std::to_string(epoch));
        }
        total += value;
        g.backward(loss);
        g.accumulate_gradients(params);
      }
      params.scale_grad(1.0 / static_cast<double>(end - begin));
      if (config.clip_norm > 0) nn::clip_gradients(params, config.clip_norm);
      optimizer->step(params, lr);
    }
    EpochStats stats{epoch, total / static_cast<double>(data.size()), lr, data.size()};
    history.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return history;
}

std::vector<TrainingExample> examples_from_squad(const SquadDataset& data,
                                                 std::size_t max_source_len) {
  std::vector<TrainingExample> out;
  for (const auto& r : data.records) {
    if (!r.answer) continue;
    const Paragraph& p = data.paragraphs.at(r.paragraph_index);
    if (p.size() == 0 || p.size() > max_source_len) continue;
    AnswerSpan span;
    try {
      span = validate_custom_span(p, *r.answer);
    } catch (const Error&) {
      continue;
    }
    std::vector<std::string> target;
    try {
      target = tokenize(r.question).tokens;
    } catch (const Error&) {
      continue;
    }
    out.push_back({encode_bio(p, span), std::move(target)});
  }
  return out;
}

Vocabulary build_vocabulary(const std::vector<TrainingExample>& data, std::size_t max_size) {
  std::vector<std::vector<std::string>> corpora;
  corpora.reserve(data.size() * 2);
  for (const auto& ex : data) {
    corpora.push_back(ex.source.tokens);
    corpora.push_back(ex.target);
  }
  return Vocabulary::build(corpora, max_size);
}

}  // namespace pivotqg::qg
