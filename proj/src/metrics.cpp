#include "boxer/metrics.hpp"

#include <cmath>

#include "boxer/error.hpp"

namespace boxer {

std::uint64_t ConfusionMatrix::subset_size() const noexcept {
  std::uint64_t total = 0;
  for (const auto c : cells_) total += c;
  return total;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < label_count_; ++k) total += cells_[k * label_count_ + k];
  return total;
}

std::uint64_t ConfusionMatrix::row_total(LabelId actual) const {
  std::uint64_t total = 0;
  for (std::size_t p = 0; p < label_count_; ++p) total += cells_[actual * label_count_ + p];
  return total;
}

std::uint64_t ConfusionMatrix::column_total(LabelId predicted) const {
  std::uint64_t total = 0;
  for (std::size_t a = 0; a < label_count_; ++a) total += cells_[a * label_count_ + predicted];
  return total;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.label_count_ != label_count_) {
    throw Error(ErrorCode::InvalidParameter, "cannot add confusion matrices of different label counts");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
  return *this;
}

std::string_view metric_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::Accuracy: return "accuracy";
    case MetricKind::ErrorRate: return "error_rate";
    case MetricKind::Precision: return "precision";
    case MetricKind::Recall: return "recall";
    case MetricKind::F1: return "f1";
    case MetricKind::Mcc: return "mcc";
  }
  return "accuracy";
}

std::optional<MetricKind> parse_metric(std::string_view text) {
  for (const auto kind : kAllMetrics) {
    if (metric_name(kind) == text) return kind;
  }
  return std::nullopt;
}

namespace {

MetricValue ratio(MetricKind kind, std::uint64_t numerator, std::uint64_t denominator) {
  if (denominator == 0) return {kind, 0.0, false, 0};
  return {kind, static_cast<double>(numerator) / static_cast<double>(denominator), true, 0};
}

struct OneVsRest {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
};

OneVsRest one_vs_rest(const ConfusionMatrix& m, LabelId label) {
  OneVsRest c;
  c.tp = m.at(label, label);
  c.fp = m.column_total(label) - c.tp;
  c.fn = m.row_total(label) - c.tp;
  c.tn = m.subset_size() - c.tp - c.fp - c.fn;
  return c;
}

MetricValue per_class_value(const ConfusionMatrix& m, MetricKind kind, LabelId label) {
  const auto c = one_vs_rest(m, label);
  switch (kind) {
    case MetricKind::Accuracy:
    case MetricKind::Recall: return ratio(kind, c.tp, c.tp + c.fn);
    case MetricKind::ErrorRate: return ratio(kind, c.fn, c.tp + c.fn);
    case MetricKind::Precision: return ratio(kind, c.tp, c.tp + c.fp);
    case MetricKind::F1: return ratio(kind, 2 * c.tp, 2 * c.tp + c.fp + c.fn);
    case MetricKind::Mcc: {
      const double denom = static_cast<double>(c.tp + c.fp) * static_cast<double>(c.tp + c.fn) *
                           static_cast<double>(c.tn + c.fp) * static_cast<double>(c.tn + c.fn);
      if (denom == 0.0) return {kind, 0.0, false, 0};
      const auto num = static_cast<std::int64_t>(c.tp * c.tn) - static_cast<std::int64_t>(c.fp * c.fn);
      return {kind, static_cast<double>(num) / std::sqrt(denom), true, 0};
    }
  }
  return {kind, 0.0, false, 0};
}

MetricValue multiclass_mcc(const ConfusionMatrix& m) {
  const auto l = m.label_count();
  const auto s = static_cast<std::int64_t>(m.subset_size());
  const auto c = static_cast<std::int64_t>(m.trace());
  std::int64_t sum_pt = 0;
  std::int64_t sum_pp = 0;
  std::int64_t sum_tt = 0;
  for (std::size_t k = 0; k < l; ++k) {
    const auto p = static_cast<std::int64_t>(m.column_total(static_cast<LabelId>(k)));
    const auto t = static_cast<std::int64_t>(m.row_total(static_cast<LabelId>(k)));
    sum_pt += p * t;
    sum_pp += p * p;
    sum_tt += t * t;
  }
  const auto left = s * s - sum_pp;
  const auto right = s * s - sum_tt;
  if (left == 0 || right == 0) return {MetricKind::Mcc, 0.0, false, 0};
  const double num = static_cast<double>(c * s - sum_pt);
  return {MetricKind::Mcc, num / std::sqrt(static_cast<double>(left) * static_cast<double>(right)), true, 0};
}

}  // namespace

MetricValue metric(const ConfusionMatrix& matrix, MetricKind kind, Averaging averaging) {
  if (averaging.per_class) {
    if (*averaging.per_class >= matrix.label_count()) {
      throw Error(ErrorCode::UnknownLabel, "label id " + std::to_string(*averaging.per_class) + " out of range");
    }
    return per_class_value(matrix, kind, *averaging.per_class);
  }
  switch (kind) {
    case MetricKind::Accuracy: return ratio(kind, matrix.trace(), matrix.subset_size());
    case MetricKind::ErrorRate: return ratio(kind, matrix.subset_size() - matrix.trace(), matrix.subset_size());
    case MetricKind::Mcc: return multiclass_mcc(matrix);
    case MetricKind::Precision:
    case MetricKind::Recall:
    case MetricKind::F1: {
      double sum = 0.0;
      std::size_t defined = 0;
      for (std::size_t k = 0; k < matrix.label_count(); ++k) {
        const auto v = per_class_value(matrix, kind, static_cast<LabelId>(k));
        if (v.defined) {
          sum += v.value;
          ++defined;
        }
      }
      const auto skipped = matrix.label_count() - defined;
      if (defined == 0) return {kind, 0.0, false, skipped};
      return {kind, sum / static_cast<double>(defined), true, skipped};
    }
  }
  return {kind, 0.0, false, 0};
}

ConfusionMatrix confusion(const ExperimentDataset& dataset, ClassifierId classifier, const InstanceSet& subset) {
  if (classifier >= dataset.classifier_count()) {
    throw Error(ErrorCode::UnknownClassifier, "classifier id " + std::to_string(classifier) + " out of range");
  }
  if (subset.universe_size() != dataset.size()) {
    throw Error(ErrorCode::UniverseMismatch, "subset universe does not match dataset size");
  }
  ConfusionMatrix m(dataset.label_count());
  const auto actual = dataset.actual();
  const auto pred = dataset.predictions(classifier);
  subset.for_each([&](InstanceIndex i) { m.add(actual[i], pred[i]); });
  return m;
}

InstanceSet correct_set(const ExperimentDataset& dataset, ClassifierId classifier, const InstanceSet& scope) {
  if (classifier >= dataset.classifier_count()) {
    throw Error(ErrorCode::UnknownClassifier, "classifier id " + std::to_string(classifier) + " out of range");
  }
  const auto actual = dataset.actual();
  const auto pred = dataset.predictions(classifier);
  InstanceSet out(dataset.size());
  scope.for_each([&](InstanceIndex i) {
    if (pred[i] == actual[i]) out.insert(i);
  });
  return out;
}

InstanceSet incorrect_set(const ExperimentDataset& dataset, ClassifierId classifier, const InstanceSet& scope) {
  return scope - correct_set(dataset, classifier, scope);
}

bool is_count_ratio(MetricKind kind, Averaging averaging) {
  switch (kind) {
    case MetricKind::Accuracy:
    case MetricKind::ErrorRate: return true;
    case MetricKind::Precision:
    case MetricKind::Recall: return averaging.per_class.has_value();
    case MetricKind::F1:
    case MetricKind::Mcc: return false;
  }
  return false;
}

std::vector<MetricRow> metric_table(const ExperimentDataset& dataset, const InstanceSet& subset) {
  std::vector<MetricRow> rows;
  for (const auto c : dataset.comparison_classifiers()) {
    const auto m = confusion(dataset, c, subset);
    MetricRow row;
    row.classifier = c;
    for (std::size_t k = 0; k < kAllMetrics.size(); ++k) row.values[k] = metric(m, kAllMetrics[k]);
    rows.push_back(row);
  }
  return rows;
}

bool ranks_before(const MetricValue& a, ClassifierId a_id, const MetricValue& b, ClassifierId b_id) {
  if (a.defined != b.defined) return a.defined;
  if (a.defined && a.value != b.value) return a.value > b.value;
  return a_id < b_id;
}

}  // namespace boxer
