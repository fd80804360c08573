#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "boxer/dataset.hpp"
#include "boxer/instance_set.hpp"

namespace boxer {

/// l x l outcome counts; row = actual label, column = predicted label.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t label_count = 0)
      : label_count_(label_count), cells_(label_count * label_count, 0) {}

  std::size_t label_count() const noexcept { return label_count_; }
  std::uint64_t at(LabelId actual, LabelId predicted) const { return cells_[actual * label_count_ + predicted]; }
  void add(LabelId actual, LabelId predicted, std::uint64_t count = 1) {
    cells_[actual * label_count_ + predicted] += count;
  }

  std::uint64_t subset_size() const noexcept;
  std::uint64_t trace() const noexcept;
  std::uint64_t row_total(LabelId actual) const;
  std::uint64_t column_total(LabelId predicted) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t label_count_;
  std::vector<std::uint64_t> cells_;
};

enum class MetricKind { Accuracy, ErrorRate, Precision, Recall, F1, Mcc };

inline constexpr std::array kAllMetrics = {MetricKind::Accuracy, MetricKind::ErrorRate, MetricKind::Precision,
                                           MetricKind::Recall,   MetricKind::F1,        MetricKind::Mcc};

std::string_view metric_name(MetricKind kind);
std::optional<MetricKind> parse_metric(std::string_view text);

/// Macro averaging when `per_class` is empty, one-vs-rest for that label otherwise.
struct Averaging {
  std::optional<LabelId> per_class;

  static Averaging macro() { return {}; }
  static Averaging of_class(LabelId label) { return {label}; }
};

struct MetricValue {
  MetricKind kind = MetricKind::Accuracy;
  double value = 0.0;
  bool defined = false;
  /// Classes left out of a macro mean because their per-class value was undefined.
  std::size_t skipped_classes = 0;
};

/**
 * Scalar reduction of a confusion matrix.
 *
 * accuracy = trace / size and error_rate = 1 - accuracy; per class they are
 * the within-class hit rate (equal to recall) and its complement.
 * precision, recall and F1 = 2tp / (2tp + fp + fn) use one-vs-rest counts;
 * their macro value is the mean over classes where the value is defined.
 * mcc is the multiclass (Gorodkin) coefficient over the full matrix, or the
 * binary coefficient of the one-vs-rest table per class.
 * A zero controlling denominator yields defined = false.
 */
MetricValue metric(const ConfusionMatrix& matrix, MetricKind kind, Averaging averaging = Averaging::macro());

ConfusionMatrix confusion(const ExperimentDataset& dataset, ClassifierId classifier, const InstanceSet& subset);

/// Members of `scope` the classifier labels correctly.
InstanceSet correct_set(const ExperimentDataset& dataset, ClassifierId classifier, const InstanceSet& scope);
InstanceSet incorrect_set(const ExperimentDataset& dataset, ClassifierId classifier, const InstanceSet& scope);

/// True when a view can stack boxes for the metric (counts over a shared denominator).
bool is_count_ratio(MetricKind kind, Averaging averaging);

struct MetricRow {
  ClassifierId classifier = 0;
  std::array<MetricValue, kAllMetrics.size()> values{};

  const MetricValue& get(MetricKind kind) const { return values[static_cast<std::size_t>(kind)]; }
};

/// Every macro metric for every compared classifier, in dataset order.
std::vector<MetricRow> metric_table(const ExperimentDataset& dataset, const InstanceSet& subset);

/// Descending by value with undefined values last; ties keep `a` before `b` by id.
bool ranks_before(const MetricValue& a, ClassifierId a_id, const MetricValue& b, ClassifierId b_id);

}  // namespace boxer
