#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lovesim/adamw.hpp"
#include "lovesim/classifier.hpp"
#include "lovesim/condition.hpp"
#include "lovesim/corpus.hpp"
#include "lovesim/metrics.hpp"
#include "lovesim/trainer.hpp"

namespace lovesim {

struct CvSettings {
  EncoderConfig encoder;  // vocab_size is filled in per fold
  TrainConfig train;
  // Per-fold training set size. Unset means: as many of each class as the
  // smaller class allows.
  std::optional<std::size_t> balance_pos = 280;
  std::optional<std::size_t> balance_neg = 269;
  std::size_t vocab_max_size = 4000;
  std::size_t history_len = kDefaultHistoryLen;
  double initial_score = kDefaultInitialScore;
  std::size_t threads = 1;
};

struct FoldResult {
  std::size_t fold = 0;
  Metrics metrics;
  std::size_t best_epoch = 0;
  std::vector<EpochRecord> history;
  std::size_t train_examples = 0;
  std::size_t val_examples = 0;
  std::size_t test_examples = 0;
};

struct CvResult {
  AblationCondition condition = AblationCondition::PD;
  std::vector<FoldResult> folds;  // in fold order; skipped folds are absent
  std::vector<Classifier> ensemble;  // one model per evaluated fold
  std::vector<std::string> warnings;

  std::vector<Metrics> per_fold_metrics() const;
  std::vector<double> metric_column(MetricKind kind) const;
  AggregateMetrics summary() const { return aggregate(per_fold_metrics()); }
};

struct FoldRun {
  std::optional<FoldResult> result;  // empty when the fold was skipped
  std::optional<Classifier> model;
  std::string warning;
};

// Trains and evaluates a single fold of make_folds(...) on examples built
// from the whole corpus.
FoldRun run_fold(std::span<const TrainingExample> examples, const Fold& fold,
                 std::size_t fold_index, AblationCondition condition, const CvSettings& settings,
                 std::uint64_t seed);

// Hold-pairs-out cross-validation for one condition. Each fold fits its own
// vocabulary and balanced training set on its training pairs only, picks the
// checkpoint on the validation half of the held-out pairs and reports Metrics
// on the test half. Folds run on up to settings.threads threads; results are
// merged in fold order.
CvResult run_cv(std::span<const DialogueRecord> corpus, AblationCondition condition,
                const CvSettings& settings, std::uint64_t seed);

// Same folds and seeds for every condition, so fold i is paired across them.
std::vector<CvResult> run_ablation(std::span<const DialogueRecord> corpus,
                                   std::span<const AblationCondition> conditions,
                                   const CvSettings& settings, std::uint64_t seed);

struct Significance {
  double permutation_p = 1.0;
  double welch_p = 1.0;
};

// Paired on folds present in both results.
Significance significance(const CvResult& a, const CvResult& b, MetricKind kind,
                          std::uint64_t seed = 0);
Significance significance(std::span<const double> a, std::span<const double> b,
                          std::uint64_t seed = 0);

}  // namespace lovesim
