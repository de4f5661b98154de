#include "lovesim/trainer.hpp"

#include <algorithm>
#include <numeric>

#include "lovesim/error.hpp"
#include "lovesim/serialize.hpp"

namespace lovesim {

double accuracy(const ModelParams& params, std::span<const EncodedExample> examples,
                double threshold) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    const bool predicted = forward(params, ex.tokens).probability >= threshold;
    correct += predicted == (ex.label >= 0.5) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

std::vector<EncodedExample> encode_examples(std::span<const TrainingExample> examples,
                                            AblationCondition condition, const Vocab& vocab,
                                            std::size_t max_len) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    out.push_back({serialize_input(ex, condition, vocab, max_len), ex.label ? 1.0 : 0.0});
  }
  return out;
}

TrainResult train(std::span<const EncodedExample> train_set, std::span<const EncodedExample> val_set,
                  const EncoderConfig& encoder_config, const TrainConfig& train_config) {
  if (train_set.empty()) throw ValidationError("train: empty training set");
  if (val_set.empty()) throw ValidationError("train: empty validation set");
  train_config.validate();

  TrainResult result;
  ModelParams params = init_params(encoder_config);
  AdamState state = make_adam_state(encoder_config);
  Rng shuffle_rng(derive_seed(train_config.seed, {0x5u}));
  Rng dropout_rng(derive_seed(train_config.seed, {0xd}));
  Rng* dropout = encoder_config.dropout > 0.0 ? &dropout_rng : nullptr;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<EncodedExample> batch;
  std::size_t step = 0;
  double best_acc = -1.0;

  for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += train_config.batch_size) {
      const std::size_t end = std::min(order.size(), start + train_config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(train_set[order[i]]);
      auto lg = loss_and_grad(params, batch, dropout);
      loss_sum += lg.loss * static_cast<double>(batch.size());
      adamw_step(params, lg.grad, state, ++step, train_config);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.val_accuracy = accuracy(params, val_set, encoder_config.threshold);
    result.history.push_back(rec);
    if (rec.val_accuracy > best_acc) {
      best_acc = rec.val_accuracy;
      result.best_epoch = epoch;
      result.params = params;
    }
  }
  return result;
}

}  // namespace lovesim
