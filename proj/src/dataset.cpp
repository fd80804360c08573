#include "boxer/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "boxer/error.hpp"

namespace boxer {

std::string_view scope_name(Scope scope) {
  switch (scope) {
    case Scope::Train: return "train";
    case Scope::Test: return "test";
    case Scope::All: return "all";
  }
  return "all";
}

std::optional<Scope> parse_scope(std::string_view text) {
  if (text == "train") return Scope::Train;
  if (text == "test") return Scope::Test;
  if (text == "all") return Scope::All;
  return std::nullopt;
}

Vocabulary::Vocabulary(std::vector<std::string> names, std::string_view what) : names_(std::move(names)) {
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], i).second) {
      throw Error(ErrorCode::SchemaViolation,
                  "duplicate name '" + names_[i] + "' in " + std::string(what),
                  std::string(what) + "[" + std::to_string(i) + "]");
    }
  }
}

std::optional<std::size_t> Vocabulary::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::string column_path(std::string_view prefix, std::string_view name) {
  return std::string(prefix) + "." + std::string(name);
}

void check_labels(std::span<const LabelId> column, std::size_t label_count, const std::string& path) {
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (column[i] >= label_count) {
      throw Error(ErrorCode::LabelOutOfVocabulary,
                  "label id " + std::to_string(column[i]) + " at row " + std::to_string(i) +
                      " is outside the label vocabulary",
                  path + "[" + std::to_string(i) + "]");
    }
  }
}

}  // namespace

ExperimentDataset::ExperimentDataset(DatasetColumns columns)
    : labels_(std::move(columns.labels), "labels"),
      classifiers_(std::move(columns.classifiers), "classifiers"),
      instance_ids_(std::move(columns.instance_ids)),
      split_(std::move(columns.split)),
      actual_(std::move(columns.actual)),
      features_(std::move(columns.features)),
      predictions_(std::move(columns.predictions)) {
  const std::size_t n = instance_ids_.size();

  if (labels_.size() < 2) {
    throw Error(ErrorCode::SchemaViolation, "at least two labels are required", "labels");
  }
  if (classifiers_.size() == 0) {
    throw Error(ErrorCode::SchemaViolation, "at least one classifier is required", "classifiers");
  }
  if (n == 0) {
    throw Error(ErrorCode::SchemaViolation, "dataset has no instances", "data");
  }

  std::unordered_set<std::string_view> seen_ids;
  seen_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen_ids.insert(instance_ids_[i]).second) {
      throw Error(ErrorCode::DuplicateInstanceId, "duplicate instance id '" + instance_ids_[i] + "'",
                  "data.id[" + std::to_string(i) + "]");
    }
  }

  if (split_.size() != n) {
    throw Error(ErrorCode::LengthMismatch,
                "split column has " + std::to_string(split_.size()) + " entries, expected " + std::to_string(n),
                "data.split");
  }

  if (predictions_.size() != classifiers_.size()) {
    throw Error(ErrorCode::SchemaViolation,
                "got " + std::to_string(predictions_.size()) + " prediction columns for " +
                    std::to_string(classifiers_.size()) + " classifiers",
                "classifiers");
  }
  for (std::size_t c = 0; c < predictions_.size(); ++c) {
    const auto path = column_path("predictions", classifiers_.name(c));
    if (predictions_[c].size() != n) {
      throw Error(ErrorCode::LengthMismatch,
                  "classifier '" + classifiers_.name(c) + "' has " + std::to_string(predictions_[c].size()) +
                      " predictions, expected " + std::to_string(n),
                  path);
    }
    check_labels(predictions_[c], labels_.size(), path);
  }

  if (columns.gold_standard) {
    const auto gold = classifiers_.find(*columns.gold_standard);
    if (!gold) {
      throw Error(ErrorCode::SchemaViolation,
                  "gold_standard '" + *columns.gold_standard + "' is not a classifier", "gold_standard");
    }
    gold_standard_ = *gold;
    actual_ = predictions_[*gold];
  } else {
    if (actual_.size() != n) {
      throw Error(ErrorCode::LengthMismatch,
                  "actual column has " + std::to_string(actual_.size()) + " entries, expected " +
                      std::to_string(n),
                  "data.actual");
    }
    check_labels(actual_, labels_.size(), "data.actual");
  }

  for (ClassifierId c = 0; c < classifiers_.size(); ++c) {
    if (c != gold_standard_) comparison_.push_back(c);
  }

  std::unordered_set<std::string_view> feature_names;
  for (std::size_t f = 0; f < features_.size(); ++f) {
    auto& col = features_[f];
    const auto path = "features[" + std::to_string(f) + "]";
    if (!feature_names.insert(col.schema.name).second) {
      throw Error(ErrorCode::SchemaViolation, "duplicate feature name '" + col.schema.name + "'", path + ".name");
    }
    if (col.schema.kind == FeatureKind::Categorical) {
      if (col.schema.categories.empty()) {
        throw Error(ErrorCode::SchemaViolation,
                    "categorical feature '" + col.schema.name + "' lists no categories", path + ".categories");
      }
      col.categories = Vocabulary(col.schema.categories, path + ".categories");
      if (col.codes.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "feature '" + col.schema.name + "' has " +
                                                   std::to_string(col.codes.size()) + " values, expected " +
                                                   std::to_string(n),
                    column_path("data.features", col.schema.name));
      }
      col.values.clear();
    } else {
      if (!col.schema.categories.empty()) {
        throw Error(ErrorCode::SchemaViolation,
                    "continuous feature '" + col.schema.name + "' must not list categories", path + ".categories");
      }
      if (col.values.size() != n) {
        throw Error(ErrorCode::LengthMismatch, "feature '" + col.schema.name + "' has " +
                                                   std::to_string(col.values.size()) + " values, expected " +
                                                   std::to_string(n),
                    column_path("data.features", col.schema.name));
      }
      col.codes.clear();
    }
    if (col.missing.empty()) col.missing.assign(n, 0);
    if (col.missing.size() != n) {
      throw Error(ErrorCode::LengthMismatch, "missing mask of feature '" + col.schema.name + "' has wrong length",
                  column_path("data.features", col.schema.name));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (col.missing[i] != 0) {
        if (!col.schema.missing_allowed) {
          throw Error(ErrorCode::SchemaViolation,
                      "feature '" + col.schema.name + "' does not allow missing values (row " + std::to_string(i) + ")",
                      column_path("data.features", col.schema.name) + "[" + std::to_string(i) + "]");
        }
        if (col.continuous()) {
          col.values[i] = 0.0;
        } else {
          col.codes[i] = 0;
        }
      } else if (!col.continuous() && col.codes[i] >= col.categories.size()) {
        throw Error(ErrorCode::SchemaViolation,
                    "category code out of range for feature '" + col.schema.name + "'",
                    column_path("data.features", col.schema.name) + "[" + std::to_string(i) + "]");
      }
    }
  }
}

std::optional<FeatureId> ExperimentDataset::find_feature(std::string_view name) const {
  for (FeatureId f = 0; f < features_.size(); ++f) {
    if (features_[f].schema.name == name) return f;
  }
  return std::nullopt;
}

ClassifierId ExperimentDataset::require_classifier(std::string_view name) const {
  if (const auto c = classifiers_.find(name)) return *c;
  throw Error(ErrorCode::UnknownClassifier, "unknown classifier '" + std::string(name) + "'");
}

FeatureId ExperimentDataset::require_feature(std::string_view name) const {
  if (const auto f = find_feature(name)) return *f;
  throw Error(ErrorCode::UnknownFeature, "unknown feature '" + std::string(name) + "'");
}

LabelId ExperimentDataset::require_label(std::string_view name) const {
  if (const auto l = labels_.find(name)) return static_cast<LabelId>(*l);
  throw Error(ErrorCode::UnknownLabel, "unknown label '" + std::string(name) + "'");
}

InstanceSet scope_set(const ExperimentDataset& dataset, Scope scope) {
  if (scope == Scope::All) return InstanceSet::full(dataset.size());
  const Split wanted = scope == Scope::Train ? Split::Train : Split::Test;
  InstanceSet set(dataset.size());
  const auto split = dataset.split();
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == wanted) set.insert(static_cast<InstanceIndex>(i));
  }
  return set;
}

ValidationReport validate(const ExperimentDataset& dataset) {
  ValidationReport report;
  const auto split = dataset.split();
  const auto train = static_cast<std::size_t>(std::count(split.begin(), split.end(), Split::Train));
  if (train == 0) report.warnings.emplace_back("empty train split");
  if (train == split.size()) report.warnings.emplace_back("empty test split");

  for (FeatureId f = 0; f < dataset.feature_count(); ++f) {
    const auto& col = dataset.feature(f);
    std::size_t missing = 0;
    bool constant = true;
    bool have_first = false;
    double first_value = 0.0;
    std::uint32_t first_code = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (col.missing[i] != 0) {
        ++missing;
        continue;
      }
      if (!have_first) {
        have_first = true;
        first_value = col.continuous() ? col.values[i] : 0.0;
        first_code = col.continuous() ? 0 : col.codes[i];
      } else if (col.continuous() ? col.values[i] != first_value : col.codes[i] != first_code) {
        constant = false;
      }
    }
    if (constant) report.warnings.push_back("constant feature '" + col.schema.name + "'");
    if (missing > 0) {
      report.warnings.push_back("feature '" + col.schema.name + "' has " + std::to_string(missing) +
                                " missing values");
    }
  }

  std::vector<std::size_t> label_counts(dataset.label_count(), 0);
  for (const auto a : dataset.actual()) ++label_counts[a];
  for (std::size_t l = 0; l < label_counts.size(); ++l) {
    if (label_counts[l] == 0) {
      report.warnings.push_back("label '" + dataset.labels().name(l) + "' never occurs as an actual label");
    }
  }
  return report;
}

}  // namespace boxer
