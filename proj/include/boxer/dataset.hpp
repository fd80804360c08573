#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "boxer/instance_set.hpp"
#include "json.hpp"

namespace boxer {

using LabelId = std::uint32_t;
using ClassifierId = std::size_t;
using FeatureId = std::size_t;

enum class Split : std::uint8_t { Train, Test };
enum class Scope { Train, Test, All };

std::string_view scope_name(Scope scope);
std::optional<Scope> parse_scope(std::string_view text);

/// Ordered, duplicate-free list of names interned to dense ids 0..size-1.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Throws SchemaViolation on a duplicate name; `what` names the list in the message.
  explicit Vocabulary(std::vector<std::string> names, std::string_view what = "vocabulary");

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t id) const { return names_.at(id); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

using LabelVocabulary = Vocabulary;

enum class FeatureKind { Continuous, Categorical };

struct FeatureSchema {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  std::vector<std::string> categories;  // categorical only
  bool missing_allowed = true;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

/// One feature column. Missing cells are flagged in `missing`; the
/// corresponding entry of `values`/`codes` is zero and carries no meaning.
struct FeatureColumn {
  FeatureSchema schema;
  Vocabulary categories;
  std::vector<double> values;        // continuous
  std::vector<std::uint32_t> codes;  // categorical
  std::vector<std::uint8_t> missing;

  bool is_missing(InstanceIndex i) const { return missing[i] != 0; }
  bool continuous() const { return schema.kind == FeatureKind::Continuous; }

  friend bool operator==(const FeatureColumn&, const FeatureColumn&) = default;
};

/// Raw columns handed to the dataset constructor (by the manifest loader,
/// the synthesizer, or tests).
struct DatasetColumns {
  std::vector<std::string> labels;
  std::vector<std::string> classifiers;
  std::optional<std::string> gold_standard;
  std::vector<std::string> instance_ids;
  std::vector<Split> split;
  std::vector<LabelId> actual;  // ignored in gold-standard mode
  std::vector<FeatureColumn> features;
  std::vector<std::vector<LabelId>> predictions;  // one column per classifier
};

struct ValidationReport {
  std::vector<std::string> warnings;
};

/**
 * Immutable columnar store of one classifier experiment.
 *
 * In gold-standard mode `actual()` is the gold classifier's prediction
 * column and that classifier is left out of `comparison_classifiers()`;
 * it remains addressable by name in queries.
 */
class ExperimentDataset {
 public:
  explicit ExperimentDataset(DatasetColumns columns);

  std::size_t size() const noexcept { return actual_.size(); }

  const Vocabulary& labels() const noexcept { return labels_; }
  std::size_t label_count() const noexcept { return labels_.size(); }

  std::size_t feature_count() const noexcept { return features_.size(); }
  const FeatureColumn& feature(FeatureId f) const { return features_.at(f); }
  std::optional<FeatureId> find_feature(std::string_view name) const;

  const Vocabulary& classifiers() const noexcept { return classifiers_; }
  std::size_t classifier_count() const noexcept { return classifiers_.size(); }
  /// Classifiers that appear as rows in views: all of them except the gold standard.
  std::span<const ClassifierId> comparison_classifiers() const noexcept { return comparison_; }
  std::optional<ClassifierId> gold_standard() const noexcept { return gold_standard_; }

  std::span<const LabelId> actual() const noexcept { return actual_; }
  std::span<const LabelId> predictions(ClassifierId c) const { return predictions_.at(c); }
  std::span<const Split> split() const noexcept { return split_; }
  const std::vector<std::string>& instance_ids() const noexcept { return instance_ids_; }

  /// Name lookups that throw UnknownClassifier / UnknownFeature / UnknownLabel.
  ClassifierId require_classifier(std::string_view name) const;
  FeatureId require_feature(std::string_view name) const;
  LabelId require_label(std::string_view name) const;

  friend bool operator==(const ExperimentDataset&, const ExperimentDataset&) = default;

 private:
  Vocabulary labels_;
  Vocabulary classifiers_;
  std::vector<ClassifierId> comparison_;
  std::optional<ClassifierId> gold_standard_;
  std::vector<std::string> instance_ids_;
  std::vector<Split> split_;
  std::vector<LabelId> actual_;
  std::vector<FeatureColumn> features_;
  std::vector<std::vector<LabelId>> predictions_;
};

/// Loads a manifest file (JSON) plus the CSV or inline columns it references.
ExperimentDataset load_dataset(const std::filesystem::path& manifest_path);
/// Same, from an already-parsed manifest; relative CSV paths resolve against `base_dir`.
ExperimentDataset load_dataset(const nlohmann::json& manifest, const std::filesystem::path& base_dir);

ValidationReport validate(const ExperimentDataset& dataset);

InstanceSet scope_set(const ExperimentDataset& dataset, Scope scope);

}  // namespace boxer
