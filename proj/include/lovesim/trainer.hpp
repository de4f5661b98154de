#pragma once

#include <span>
#include <vector>

#include "lovesim/adamw.hpp"
#include "lovesim/condition.hpp"
#include "lovesim/corpus.hpp"
#include "lovesim/model.hpp"
#include "lovesim/vocab.hpp"

namespace lovesim {

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  ModelParams params;  // checkpoint of the best validation epoch
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> history;
};

// Mini-batch AdamW on clamped BCE. Validation accuracy is measured after
// every epoch; the earliest epoch with the highest accuracy wins.
TrainResult train(std::span<const EncodedExample> train_set, std::span<const EncodedExample> val_set,
                  const EncoderConfig& encoder_config, const TrainConfig& train_config);

double accuracy(const ModelParams& params, std::span<const EncodedExample> examples,
                double threshold);

std::vector<EncodedExample> encode_examples(std::span<const TrainingExample> examples,
                                            AblationCondition condition, const Vocab& vocab,
                                            std::size_t max_len);

}  // namespace lovesim
