// Thin bindings; structured values cross the boundary as JSON text.
#include <memory>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lovesim/ablation.hpp"
#include "lovesim/classifier.hpp"
#include "lovesim/config.hpp"
#include "lovesim/corpus.hpp"
#include "lovesim/corpus_io.hpp"
#include "lovesim/error.hpp"
#include "lovesim/manifest.hpp"
#include "lovesim/metrics.hpp"
#include "lovesim/report.hpp"
#include "lovesim/simulator.hpp"
#include "lovesim/stats.hpp"
#include "lovesim/synth.hpp"
#include "lovesim/vocab.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace lovesim;

namespace {

std::vector<DialogueRecord> corpus_from(const std::string& text) {
  auto corpus = json::parse(text).get<std::vector<DialogueRecord>>();
  for (const auto& d : corpus) d.validate();
  return corpus;
}

Metrics metrics_of(const std::vector<bool>& predictions, const std::vector<bool>& labels) {
  auto p = std::make_unique<bool[]>(predictions.size());
  auto l = std::make_unique<bool[]>(labels.size());
  std::copy(predictions.begin(), predictions.end(), p.get());
  std::copy(labels.begin(), labels.end(), l.get());
  return compute_metrics({p.get(), predictions.size()}, {l.get(), labels.size()});
}

}  // namespace

PYBIND11_MODULE(_lovesim, m) {
  m.attr("__version__") = kVersion;
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  m.def("tokenize", [](const std::string& text) { return tokenize(text); });

  m.def(
      "synth_corpus_json",
      [](const std::string& config, std::uint64_t seed) {
        const SynthConfig cfg = json::parse(config).get<SynthConfig>();
        return json(synth_corpus(cfg, seed)).dump();
      },
      py::arg("config"), py::arg("seed"));

  m.def(
      "build_examples_json",
      [](const std::string& corpus, std::size_t history_len, double initial_score) {
        return json(build_examples(corpus_from(corpus), history_len, initial_score)).dump();
      },
      py::arg("corpus"), py::arg("history_len") = kDefaultHistoryLen,
      py::arg("initial_score") = kDefaultInitialScore);

  m.def(
      "make_folds_json",
      [](const std::vector<std::string>& pair_ids, std::uint64_t seed) {
        return json(make_folds(pair_ids, seed)).dump();
      },
      py::arg("pair_ids"), py::arg("seed"));

  m.def(
      "compute_metrics_json",
      [](const std::vector<bool>& predictions, const std::vector<bool>& labels) {
        return json(metrics_of(predictions, labels)).dump();
      },
      py::arg("predictions"), py::arg("labels"));

  m.def("binomial_significance", &binomial_significance, py::arg("wins"), py::arg("n"));
  m.def(
      "paired_permutation_test",
      [](const std::vector<double>& a, const std::vector<double>& b, std::uint64_t seed) {
        return paired_permutation_test(a, b, seed);
      },
      py::arg("a"), py::arg("b"), py::arg("seed") = 0);
  m.def(
      "welch_p_value",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return welch_t_test(a, b).p_value;
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "select_baseline",
      [](const std::vector<double>& cohesion) { return select_baseline(cohesion); },
      py::arg("cohesion"));
  m.def(
      "choose_by_votes",
      [](const std::vector<int>& votes, const std::vector<double>& cohesion) {
        const auto v = choose_by_votes(votes, cohesion);
        return py::make_tuple(v.chosen, v.tie_break);
      },
      py::arg("votes"), py::arg("cohesion"));

  m.def(
      "run_cv_json",
      [](const std::string& corpus, const std::string& condition, const std::string& settings,
         std::uint64_t seed) {
        CvSettings s;
        apply_json(json::parse(settings), s);
        const auto records = corpus_from(corpus);
        CvResult r;
        {
          py::gil_scoped_release release;
          r = run_cv(records, parse_condition(condition), s, seed);
        }
        return json(r).dump();
      },
      py::arg("corpus"), py::arg("condition"), py::arg("settings") = "{}", py::arg("seed") = 0);

  py::class_<Classifier>(m, "Classifier")
      .def_static("load", [](const std::string& path) { return load_classifier(path); })
      .def_property_readonly("condition",
                             [](const Classifier& c) { return to_string(c.condition); })
      .def("predict_json", [](const Classifier& c, const std::string& example) {
        const auto p = predict(c, json::parse(example).get<TrainingExample>());
        return py::make_tuple(p.probability, p.label);
      });
}
