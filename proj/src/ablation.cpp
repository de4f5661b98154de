#include "lovesim/ablation.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "lovesim/error.hpp"
#include "lovesim/rng.hpp"
#include "lovesim/serialize.hpp"
#include "lovesim/stats.hpp"

namespace lovesim {

std::vector<Metrics> CvResult::per_fold_metrics() const {
  std::vector<Metrics> out;
  out.reserve(folds.size());
  for (const auto& f : folds) out.push_back(f.metrics);
  return out;
}

std::vector<double> CvResult::metric_column(MetricKind kind) const {
  std::vector<double> out;
  out.reserve(folds.size());
  for (const auto& f : folds) out.push_back(metric_value(f.metrics, kind));
  return out;
}

namespace {

// Runs jobs 0..n-1 on up to `threads` workers; rethrows the first failure.
template <typename Job>
void parallel_for(std::size_t n, std::size_t threads, Job job) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

FoldRun run_fold(std::span<const TrainingExample> examples, const Fold& fold,
                 std::size_t fold_index, AblationCondition condition, const CvSettings& settings,
                 std::uint64_t seed) {
  FoldRun out;
  const std::set<std::string> train_pairs(fold.train_pairs.begin(), fold.train_pairs.end());
  std::vector<TrainingExample> train_pool;
  for (const auto& e : examples) {
    if (train_pairs.count(e.pair_id)) train_pool.push_back(e);
  }
  const auto held = split_held_out(examples, fold, derive_seed(seed, {fold_index, 2}));
  for (const auto& e : held.test) {
    if (train_pairs.count(e.pair_id)) {
      throw std::logic_error("fold " + std::to_string(fold_index) + ": test pair " + e.pair_id +
                             " is also a training pair");
    }
  }
  if (held.test.empty()) {
    out.warning = "fold " + std::to_string(fold_index) + " skipped: no test examples";
    return out;
  }
  if (held.val.empty()) {
    out.warning = "fold " + std::to_string(fold_index) + " skipped: no validation examples";
    return out;
  }

  std::size_t n_pos = 0;
  for (const auto& e : train_pool) n_pos += e.label ? 1 : 0;
  const std::size_t n_neg = train_pool.size() - n_pos;
  const std::size_t minority = std::min(n_pos, n_neg);
  const auto balanced =
      balance_dataset(train_pool, settings.balance_pos.value_or(minority),
                      settings.balance_neg.value_or(minority), derive_seed(seed, {fold_index, 1}));
  if (balanced.empty()) {
    out.warning = "fold " + std::to_string(fold_index) + " skipped: empty training set";
    return out;
  }

  const auto texts = vocab_texts(balanced);
  Vocab vocab = fit_vocab(texts, settings.vocab_max_size);
  EncoderConfig enc = settings.encoder;
  enc.vocab_size = vocab.size();
  enc.seed = derive_seed(seed, {fold_index, 3});
  TrainConfig tc = settings.train;
  tc.seed = derive_seed(seed, {fold_index, 4});

  const auto train_set = encode_examples(balanced, condition, vocab, enc.max_len);
  const auto val_set = encode_examples(held.val, condition, vocab, enc.max_len);
  auto trained = train(train_set, val_set, enc, tc);

  const std::size_t n_test = held.test.size();
  auto preds = std::make_unique<bool[]>(n_test);
  auto labels = std::make_unique<bool[]>(n_test);
  for (std::size_t i = 0; i < n_test; ++i) {
    preds[i] = predict(trained.params, held.test[i], condition, vocab, enc.threshold).label;
    labels[i] = held.test[i].label;
  }
  FoldResult fr;
  fr.fold = fold_index;
  fr.metrics = compute_metrics(std::span<const bool>(preds.get(), n_test),
                               std::span<const bool>(labels.get(), n_test));
  fr.best_epoch = trained.best_epoch;
  fr.history = std::move(trained.history);
  fr.train_examples = balanced.size();
  fr.val_examples = held.val.size();
  fr.test_examples = held.test.size();
  out.result = std::move(fr);
  out.model = Classifier{std::move(trained.params), std::move(vocab), condition};
  return out;
}

CvResult run_cv(std::span<const DialogueRecord> corpus, AblationCondition condition,
                const CvSettings& settings, std::uint64_t seed) {
  return run_ablation(corpus, std::span<const AblationCondition>(&condition, 1), settings, seed)
      .front();
}

std::vector<CvResult> run_ablation(std::span<const DialogueRecord> corpus,
                                   std::span<const AblationCondition> conditions,
                                   const CvSettings& settings, std::uint64_t seed) {
  if (conditions.empty()) throw ValidationError("ablation: no conditions requested");
  const auto examples = build_examples(corpus, settings.history_len, settings.initial_score);
  const auto folds = make_folds(pair_ids_of(corpus), seed);

  const std::size_t jobs = folds.size() * conditions.size();
  std::vector<FoldRun> outcomes(jobs);
  parallel_for(jobs, settings.threads, [&](std::size_t j) {
    const std::size_t c = j / folds.size();
    const std::size_t f = j % folds.size();
    outcomes[j] = run_fold(examples, folds[f], f, conditions[c], settings, seed);
  });

  std::vector<CvResult> results;
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    CvResult r;
    r.condition = conditions[c];
    for (std::size_t f = 0; f < folds.size(); ++f) {
      auto& o = outcomes[c * folds.size() + f];
      if (!o.result) {
        r.warnings.push_back(o.warning);
        continue;
      }
      r.folds.push_back(std::move(*o.result));
      r.ensemble.push_back(std::move(*o.model));
    }
    results.push_back(std::move(r));
  }
  return results;
}

Significance significance(std::span<const double> a, std::span<const double> b,
                          std::uint64_t seed) {
  Significance s;
  s.permutation_p = paired_permutation_test(a, b, seed);
  s.welch_p = welch_t_test(a, b).p_value;
  return s;
}

Significance significance(const CvResult& a, const CvResult& b, MetricKind kind,
                          std::uint64_t seed) {
  std::map<std::size_t, double> by_fold;
  for (const auto& f : b.folds) by_fold[f.fold] = metric_value(f.metrics, kind);
  std::vector<double> xa;
  std::vector<double> xb;
  for (const auto& f : a.folds) {
    auto it = by_fold.find(f.fold);
    if (it == by_fold.end()) continue;
    xa.push_back(metric_value(f.metrics, kind));
    xb.push_back(it->second);
  }
  return significance(xa, xb, seed);
}

}  // namespace lovesim
