#pragma once

#include <cstdint>

#include "lovesim/model.hpp"

namespace lovesim {

struct TrainConfig {
  std::size_t epochs = 15;
  std::size_t batch_size = 32;
  // Tuned for the small from-scratch encoder; fine-tuning a pre-trained one
  // would use kFineTuneLearningRate.
  double learning_rate = 3e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
  bool bias_correction = true;
  std::uint64_t seed = 1;

  static constexpr double kFineTuneLearningRate = 2e-5;

  bool operator==(const TrainConfig&) const = default;
  void validate() const;
};

struct AdamState {
  ModelParams m;
  ModelParams v;
};

AdamState make_adam_state(const EncoderConfig& config);

// One AdamW update at step t (1-based). Weight decay is decoupled and only
// touches weight matrices.
void adamw_step(ModelParams& params, const ModelParams& grads, AdamState& state, std::size_t t,
                const TrainConfig& config);

}  // namespace lovesim
