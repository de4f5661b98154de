#pragma once

#include <filesystem>

#include "lovesim/condition.hpp"
#include "lovesim/corpus.hpp"
#include "lovesim/model.hpp"
#include "lovesim/vocab.hpp"

namespace lovesim {

// A trained model together with everything needed to feed it.
struct Classifier {
  ModelParams params;
  Vocab vocab;
  AblationCondition condition = AblationCondition::PD;

  bool operator==(const Classifier&) const = default;
};

struct Prediction {
  double probability = 0.0;
  bool label = false;  // probability >= threshold
};

Prediction predict(const ModelParams& params, const TrainingExample& example,
                   AblationCondition condition, const Vocab& vocab, double threshold);

inline Prediction predict(const Classifier& c, const TrainingExample& example) {
  return predict(c.params, example, c.condition, c.vocab, c.params.config.threshold);
}

inline constexpr int kModelFormatVersion = 1;

// One line of JSON (format version, config, condition, vocab, tensor names
// and shapes) followed by the tensors as little-endian float64 in the same
// order.
void save_classifier(const std::filesystem::path& path, const Classifier& classifier);
Classifier load_classifier(const std::filesystem::path& path);

std::string encode_classifier(const Classifier& classifier);
Classifier decode_classifier(const std::string& bytes);

}  // namespace lovesim
