"""Python access to the lovesim core library."""

import json

from ._lovesim import (
    Classifier,
    ValidationError,
    __version__,
    binomial_significance,
    choose_by_votes,
    paired_permutation_test,
    select_baseline,
    tokenize,
    welch_p_value,
)
from . import _lovesim

__all__ = [
    "Classifier",
    "ValidationError",
    "__version__",
    "binomial_significance",
    "build_examples",
    "choose_by_votes",
    "compute_metrics",
    "make_folds",
    "paired_permutation_test",
    "predict",
    "run_cv",
    "select_baseline",
    "synth_corpus",
    "tokenize",
    "welch_p_value",
]


def synth_corpus(seed, **config):
    """Synthetic dialogues as a list of dicts; keyword args override SynthConfig fields."""
    return json.loads(_lovesim.synth_corpus_json(json.dumps(config), seed))


def build_examples(corpus, history_len=10, initial_score=5.0):
    return json.loads(_lovesim.build_examples_json(json.dumps(corpus), history_len, initial_score))


def make_folds(pair_ids, seed):
    return json.loads(_lovesim.make_folds_json(list(pair_ids), seed))


def compute_metrics(predictions, labels):
    return json.loads(_lovesim.compute_metrics_json([bool(p) for p in predictions],
                                                    [bool(y) for y in labels]))


def run_cv(corpus, condition, settings=None, seed=0):
    """Per-fold metrics of one ablation condition; settings overlay the CvSettings defaults."""
    return json.loads(_lovesim.run_cv_json(json.dumps(corpus), condition,
                                           json.dumps(settings or {}), seed))


def predict(classifier, example):
    """(probability, label) for one example dict."""
    return classifier.predict_json(json.dumps(example))
