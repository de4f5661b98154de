#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "lovesim/ablation.hpp"
#include "lovesim/error.hpp"
#include "lovesim/serialize.hpp"

using namespace lovesim;

namespace {

CvSettings fast_settings() {
  CvSettings s;
  s.encoder.d_model = 8;
  s.encoder.d_ff = 16;
  s.encoder.n_heads = 2;
  s.train.epochs = 2;
  s.train.learning_rate = 1e-2;
  s.balance_pos.reset();
  s.balance_neg.reset();
  return s;
}

const std::vector<DialogueRecord>& corpus8() {
  static const auto c = synth_corpus(testing::small_synth(8), 31);
  return c;
}

}  // namespace

TEST_SUITE("ablation") {

TEST_CASE("masking leaves the expected segments") {
  CHECK(uses_personality(AblationCondition::PD));
  CHECK(uses_history(AblationCondition::PD));
  CHECK(uses_personality(AblationCondition::P_only));
  CHECK_FALSE(uses_history(AblationCondition::P_only));
  CHECK_FALSE(uses_personality(AblationCondition::D_only));
  CHECK(uses_history(AblationCondition::D_only));
  CHECK_FALSE(uses_personality(AblationCondition::None_));
  CHECK_FALSE(uses_history(AblationCondition::None_));
  for (auto c : kAllConditions) CHECK(parse_condition(to_string(c)) == c);
  CHECK_THROWS_AS(parse_condition("pq"), ValidationError);
}

TEST_CASE("eight pairs give four folds, four models and four metric rows") {
  const auto r = run_cv(corpus8(), AblationCondition::PD, fast_settings(), 3);
  CHECK(r.condition == AblationCondition::PD);
  CHECK(r.folds.size() == 4);
  CHECK(r.ensemble.size() == 4);
  CHECK(r.per_fold_metrics().size() == 4);
  CHECK(r.warnings.empty());
  for (std::size_t i = 0; i < r.folds.size(); ++i) {
    const auto& f = r.folds[i];
    CHECK(f.fold == i);
    CHECK(f.history.size() == 2);
    CHECK(f.best_epoch >= 1);
    CHECK(f.metrics.tp + f.metrics.fp + f.metrics.fn + f.metrics.tn == f.test_examples);
    CHECK(r.ensemble[i].condition == AblationCondition::PD);
  }
  CHECK(r.summary().folds == 4);
}

TEST_CASE("balanced training set sizes") {
  auto s = fast_settings();
  s.balance_pos = 20;
  s.balance_neg = 15;
  const auto examples = build_examples(corpus8());
  const auto folds = make_folds(pair_ids_of(corpus8()), 3);
  const auto run = run_fold(examples, folds[0], 0, AblationCondition::None_, s, 3);
  REQUIRE(run.result.has_value());
  CHECK(run.result->train_examples == 35);

  s.balance_pos = 100000;
  CHECK_THROWS_AS(run_fold(examples, folds[0], 0, AblationCondition::None_, s, 3), ValidationError);
}

TEST_CASE("a held-out pair inside the training set is caught") {
  const auto examples = build_examples(corpus8());
  auto fold = make_folds(pair_ids_of(corpus8()), 3)[0];
  fold.train_pairs.push_back(fold.test_pairs[0]);
  CHECK_THROWS_AS(run_fold(examples, fold, 0, AblationCondition::PD, fast_settings(), 3),
                  std::logic_error);
}

TEST_CASE("a fold without held-out examples is skipped with a warning") {
  const auto examples = build_examples(corpus8());
  auto fold = make_folds(pair_ids_of(corpus8()), 3)[0];
  fold.val_pairs = {"nobody", "nowhere"};
  fold.test_pairs = fold.val_pairs;
  const auto run = run_fold(examples, fold, 2, AblationCondition::PD, fast_settings(), 3);
  CHECK_FALSE(run.result.has_value());
  CHECK(run.warning.find("fold 2") != std::string::npos);
}

TEST_CASE("threads do not change results") {
  const std::vector<AblationCondition> conds = {AblationCondition::D_only, AblationCondition::None_};
  auto serial = fast_settings();
  auto parallel = fast_settings();
  parallel.threads = 3;
  const auto a = run_ablation(corpus8(), conds, serial, 9);
  const auto b = run_ablation(corpus8(), conds, parallel, 9);
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    CHECK(a[c].condition == conds[c]);
    REQUIRE(a[c].folds.size() == b[c].folds.size());
    for (std::size_t f = 0; f < a[c].folds.size(); ++f) {
      CHECK(a[c].folds[f].metrics == b[c].folds[f].metrics);
      CHECK(a[c].ensemble[f] == b[c].ensemble[f]);
    }
  }
}

TEST_CASE("significance pairs folds by index") {
  CvResult a, b;
  for (std::size_t i = 0; i < 10; ++i) {
    FoldResult fa, fb;
    fa.fold = fb.fold = i;
    fa.metrics = metrics_from_counts(9, 0, 0, 1 + i % 3);
    fb.metrics = metrics_from_counts(5, 4, 4, 1 + i % 3);
    a.folds.push_back(fa);
    b.folds.push_back(fb);
  }
  const auto s = significance(a, b, MetricKind::Accuracy);
  CHECK(s.permutation_p == doctest::Approx(2.0 / 1024.0));
  CHECK(s.welch_p < 0.05);
  CHECK(significance(a, a, MetricKind::F1).permutation_p == 1.0);
}

}
