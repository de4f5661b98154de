#include "lovesim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "lovesim/corpus_io.hpp"
#include "lovesim/error.hpp"
#include "lovesim/stats.hpp"

namespace lovesim {

void to_json(nlohmann::json& j, const Metrics& m) {
  j = nlohmann::json{{"tp", m.tp},
                     {"fp", m.fp},
                     {"fn", m.fn},
                     {"tn", m.tn},
                     {"accuracy", m.accuracy},
                     {"precision", m.precision},
                     {"recall", m.recall},
                     {"f1", m.f1},
                     {"precision_undefined", m.precision_undefined},
                     {"recall_undefined", m.recall_undefined},
                     {"f1_undefined", m.f1_undefined}};
}

void from_json(const nlohmann::json& j, Metrics& m) {
  // Counts are authoritative; the derived values are recomputed.
  m = metrics_from_counts(j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(),
                          j.at("fn").get<std::size_t>(), j.at("tn").get<std::size_t>());
}

void to_json(nlohmann::json& j, const FoldResult& f) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& e : f.history) {
    history.push_back(
        {{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_accuracy", e.val_accuracy}});
  }
  j = nlohmann::json{{"fold", f.fold},
                     {"metrics", f.metrics},
                     {"best_epoch", f.best_epoch},
                     {"history", history},
                     {"train_examples", f.train_examples},
                     {"val_examples", f.val_examples},
                     {"test_examples", f.test_examples}};
}

void from_json(const nlohmann::json& j, FoldResult& f) {
  j.at("fold").get_to(f.fold);
  j.at("metrics").get_to(f.metrics);
  j.at("best_epoch").get_to(f.best_epoch);
  f.history.clear();
  for (const auto& e : j.value("history", nlohmann::json::array())) {
    EpochRecord r;
    e.at("epoch").get_to(r.epoch);
    e.at("train_loss").get_to(r.train_loss);
    e.at("val_accuracy").get_to(r.val_accuracy);
    f.history.push_back(r);
  }
  j.at("train_examples").get_to(f.train_examples);
  j.at("val_examples").get_to(f.val_examples);
  j.at("test_examples").get_to(f.test_examples);
}

void to_json(nlohmann::json& j, const CvResult& r) {
  j = nlohmann::json{{"condition", to_string(r.condition)},
                     {"folds", r.folds},
                     {"warnings", r.warnings}};
}

void from_json(const nlohmann::json& j, CvResult& r) {
  r.condition = parse_condition(j.at("condition").get<std::string>());
  j.at("folds").get_to(r.folds);
  r.warnings = j.value("warnings", std::vector<std::string>{});
  r.ensemble.clear();
}

std::vector<CvResult> read_ablation_results(const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(read_text_file(path));
  return j.at("results").get<std::vector<CvResult>>();
}

void write_ablation_results(const std::filesystem::path& path, std::span<const CvResult> results) {
  nlohmann::json j;
  j["results"] = std::vector<CvResult>(results.begin(), results.end());
  write_text_file(path, j.dump(2) + "\n");
}

char row_letter(AblationCondition c) {
  switch (c) {
    case AblationCondition::D_only: return 'a';
    case AblationCondition::P_only: return 'b';
    case AblationCondition::PD: return 'c';
    case AblationCondition::None_: return 'd';
  }
  return '?';
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

AblationReport render_ablation_report(std::span<const CvResult> results, std::uint64_t seed) {
  if (results.empty()) throw ValidationError("report: no ablation results");
  std::vector<const CvResult*> rows;
  for (auto c : kAllConditions) {
    for (const auto& r : results) {
      if (r.condition == c) rows.push_back(&r);
    }
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i]->condition == rows[i - 1]->condition) {
      throw ValidationError("report: condition " + to_string(rows[i]->condition) +
                            " appears twice");
    }
  }
  std::vector<AggregateMetrics> agg;
  for (const auto* r : rows) {
    if (r->folds.size() < 2) {
      throw ValidationError("report: condition " + to_string(r->condition) + " has " +
                            std::to_string(r->folds.size()) + " evaluated folds, need 2");
    }
    agg.push_back(r->summary());
  }
  auto ms_of = [](const AggregateMetrics& a, MetricKind k) -> const MeanStd& {
    switch (k) {
      case MetricKind::Accuracy: return a.accuracy;
      case MetricKind::Precision: return a.precision;
      case MetricKind::Recall: return a.recall;
      case MetricKind::F1: return a.f1;
    }
    return a.accuracy;
  };

  const std::size_t n = rows.size();
  // sig[row][metric] = letters of the rows this one significantly beats.
  std::vector<std::vector<std::string>> sig(n, std::vector<std::string>(4));
  struct PairLine {
    std::string a, b, metric;
    Significance s;
  };
  std::vector<PairLine> pairs;
  for (std::size_t k = 0; k < 4; ++k) {
    const MetricKind kind = kAllMetrics[k];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto s = significance(*rows[i], *rows[j], kind, seed);
        pairs.push_back({std::string(1, row_letter(rows[i]->condition)),
                         std::string(1, row_letter(rows[j]->condition)), metric_name(kind), s});
        if (s.permutation_p >= kSignificanceLevel) continue;
        const double mi = ms_of(agg[i], kind).mean;
        const double mj = ms_of(agg[j], kind).mean;
        if (mi > mj) sig[i][k] += row_letter(rows[j]->condition);
        if (mj > mi) sig[j][k] += row_letter(rows[i]->condition);
      }
    }
  }
  for (auto& r : sig) {
    for (auto& s : r) std::sort(s.begin(), s.end());
  }

  std::vector<double> best(4, -1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 4; ++k) best[k] = std::max(best[k], ms_of(agg[i], kAllMetrics[k]).mean);
  }

  std::ostringstream md;
  md << "| Features assigned to target utt. | Acc. | Precision | Recall | F1 |\n";
  md << "|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < n; ++i) {
    md << "| " << table_label(rows[i]->condition) << " |";
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& ms = ms_of(agg[i], kAllMetrics[k]);
      std::string cell = format_mean_std(ms);
      if (ms.mean == best[k]) cell = "**" + cell + "**";
      if (!sig[i][k].empty()) {
        std::string letters;
        for (char c : sig[i][k]) letters += std::string(letters.empty() ? "" : ",") + c;
        cell += "<sup>" + letters + "</sup>";
      }
      md << " " << cell << " |";
    }
    md << "\n";
  }
  md << "\nMean ± sample standard deviation over folds. Bold marks the highest mean in each "
        "column. Superscripts name the rows a row beats with p < 0.05 "
        "(paired permutation test over folds).\n";
  if (!pairs.empty()) {
    md << "\n| Rows | Metric | Permutation p | Welch p |\n|---|---|---|---|\n";
    for (const auto& p : pairs) {
      md << "| " << p.a << " vs " << p.b << " | " << p.metric << " | "
         << fmt("%.4g", p.s.permutation_p) << " | " << fmt("%.4g", p.s.welch_p) << " |\n";
    }
  }
  for (const auto* r : rows) {
    for (const auto& w : r->warnings) md << "\nWarning (" << to_string(r->condition) << "): " << w;
  }

  std::ostringstream csv;
  csv << "row,condition,folds";
  for (auto k : kAllMetrics) csv << "," << metric_name(k) << "_mean," << metric_name(k) << "_std";
  for (auto k : kAllMetrics) csv << "," << metric_name(k) << "_sig";
  csv << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    csv << row_letter(rows[i]->condition) << "," << to_string(rows[i]->condition) << ","
        << agg[i].folds;
    for (auto k : kAllMetrics) {
      const auto& ms = ms_of(agg[i], k);
      csv << "," << fmt("%.6g", ms.mean) << "," << fmt("%.6g", ms.std);
    }
    for (std::size_t k = 0; k < 4; ++k) csv << "," << sig[i][k];
    csv << "\n";
  }
  return {md.str(), csv.str()};
}

}  // namespace lovesim
