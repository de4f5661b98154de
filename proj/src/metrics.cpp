#include "lovesim/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "lovesim/error.hpp"

namespace lovesim {

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.tn = tn;
  const auto total = static_cast<double>(tp + fp + fn + tn);
  m.accuracy = total > 0 ? static_cast<double>(tp + tn) / total : 0.0;
  if (tp + fp == 0) {
    m.precision_undefined = true;
  } else {
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    m.recall_undefined = true;
  } else {
    m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  if (m.precision + m.recall == 0.0) {
    m.f1_undefined = true;
  } else {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

Metrics compute_metrics(std::span<const bool> predictions, std::span<const bool> labels) {
  if (predictions.size() != labels.size()) {
    throw ValidationError("compute_metrics: " + std::to_string(predictions.size()) +
                          " predictions vs " + std::to_string(labels.size()) + " labels");
  }
  if (predictions.empty()) throw ValidationError("compute_metrics: no predictions");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i]) {
      (labels[i] ? tp : fp) += 1;
    } else {
      (labels[i] ? fn : tn) += 1;
    }
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

double metric_value(const Metrics& m, MetricKind kind) {
  switch (kind) {
    case MetricKind::Accuracy: return m.accuracy;
    case MetricKind::Precision: return m.precision;
    case MetricKind::Recall: return m.recall;
    case MetricKind::F1: return m.f1;
  }
  return 0.0;
}

std::string metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::Accuracy: return "accuracy";
    case MetricKind::Precision: return "precision";
    case MetricKind::Recall: return "recall";
    case MetricKind::F1: return "f1";
  }
  return "";
}

MeanStd mean_std(std::span<const double> values) {
  if (values.size() < 2) throw ValidationError("aggregate: need at least two folds");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

AggregateMetrics aggregate(std::span<const Metrics> per_fold) {
  AggregateMetrics agg;
  agg.folds = per_fold.size();
  auto column = [&](MetricKind k) {
    std::vector<double> v;
    for (const auto& m : per_fold) v.push_back(metric_value(m, k));
    return mean_std(v);
  };
  agg.accuracy = column(MetricKind::Accuracy);
  agg.precision = column(MetricKind::Precision);
  agg.recall = column(MetricKind::Recall);
  agg.f1 = column(MetricKind::F1);
  return agg;
}

std::string format_mean_std(const MeanStd& ms) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f ± %.2g", ms.mean, ms.std);
  return buf;
}

}  // namespace lovesim
