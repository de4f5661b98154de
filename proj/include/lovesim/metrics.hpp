#pragma once

#include <span>
#include <string>
#include <vector>

namespace lovesim {

struct Metrics {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Set when the metric's denominator was zero; the value is then reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;

  bool operator==(const Metrics&) const = default;
};

Metrics compute_metrics(std::span<const bool> predictions, std::span<const bool> labels);
Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

enum class MetricKind { Accuracy, Precision, Recall, F1 };
inline constexpr MetricKind kAllMetrics[] = {MetricKind::Accuracy, MetricKind::Precision,
                                             MetricKind::Recall, MetricKind::F1};

double metric_value(const Metrics& m, MetricKind kind);
std::string metric_name(MetricKind kind);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) standard deviation
};

// Needs at least two values.
MeanStd mean_std(std::span<const double> values);

struct AggregateMetrics {
  MeanStd accuracy, precision, recall, f1;
  std::size_t folds = 0;
};

AggregateMetrics aggregate(std::span<const Metrics> per_fold);

// "0.69 ± 0.095": mean to two decimals, std to two significant digits.
std::string format_mean_std(const MeanStd& ms);

}  // namespace lovesim
