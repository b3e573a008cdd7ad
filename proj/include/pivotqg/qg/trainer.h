#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pivotqg/answers/span.h"
#include "pivotqg/qg/config.h"
#include "pivotqg/qg/model.h"
#include "pivotqg/text/squad.h"

namespace pivotqg::qg {

struct TrainingExample {
  BioTaggedInput source;
  std::vector<std::string> target;  // question tokens, no end marker
};

struct EpochStats {
  int epoch = 0;             // 1-based
  double mean_loss = 0.0;    // per example
  double learning_rate = 0.0;
  std::size_t examples = 0;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Learning rate for a 1-based epoch: constant until anneal_start_epoch, then
// multiplied by anneal_factor once per epoch.
double annealed_rate(const QGConfig& config, int epoch);

// Mini-batch training on the summed sequence NLL, averaged over each batch,
// with gradient clipping. Throws EmptyDataset, or DivergedLoss on a
// non-finite loss.
std::vector<EpochStats> train(QGModel& model, const std::vector<TrainingExample>& data,
                              const EpochCallback& on_epoch = {});

// One example per answerable record whose paragraph fits max_source_len.
std::vector<TrainingExample> examples_from_squad(const SquadDataset& data,
                                                 std::size_t max_source_len);

Vocabulary build_vocabulary(const std::vector<TrainingExample>& data, std::size_t max_size);

}  // namespace pivotqg::qg
