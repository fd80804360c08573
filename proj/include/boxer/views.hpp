#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boxer/dataset.hpp"
#include "boxer/instance_set.hpp"
#include "boxer/metrics.hpp"
#include "boxer/query.hpp"
#include "boxer/selection.hpp"
#include "json.hpp"

namespace boxer {

/// A clickable subset: its query plus the three quantities every box shows.
struct Box {
  Query query;
  std::string description;
  std::uint64_t count = 0;
  std::uint64_t overlap_first = 0;
  std::uint64_t overlap_second = 0;
  bool small = false;
};

/// A stack, bar set or matrix of boxes sharing one group universe of size `total`.
struct BoxGroup {
  std::string label;
  std::uint64_t total = 0;
  std::vector<Box> boxes;
  nlohmann::json meta = nlohmann::json::object();
};

struct ViewPayload {
  std::string view;
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t selection_version = 0;
  bool normalized = false;
  std::vector<BoxGroup> groups;
  nlohmann::json meta = nlohmann::json::object();
};

/// Serialized form: `view`, `params`, `selection_version`, `normalized`,
/// `groups[]` of `{label, total, boxes[], ...}` and view metadata at top level.
nlohmann::json to_json(const ViewPayload& payload);

/// Compact serialization shared by every output path; invalid UTF-8 is replaced.
std::string to_text(const nlohmann::json& value);

inline constexpr double kDefaultSmallThreshold = 0.02;

/// Everything a view is a function of, besides its own parameters.
struct ViewContext {
  const ExperimentDataset* dataset = nullptr;
  Scope scope = Scope::All;
  InstanceSet scope_universe;
  std::optional<InstanceSet> first;
  std::optional<InstanceSet> second;
  std::uint64_t selection_version = 0;
  double small_threshold = kDefaultSmallThreshold;

  static ViewContext from_state(const SelectionState& state, std::uint64_t selection_version);
  const ExperimentDataset& data() const { return *dataset; }
};

/// Small-value mark: non-empty but below `threshold` of its group. Zero is never small.
bool is_small(std::uint64_t count, std::uint64_t group_total, double threshold);

struct PerformanceParams {
  MetricKind metric = MetricKind::Accuracy;
  std::optional<std::string> label;  // required for precision/recall stacks
  bool sort_by_value = false;
  bool normalize = false;
};
ViewPayload classifier_performance(const ViewContext& ctx, const PerformanceParams& params);

struct BinSpec {
  std::size_t count = 10;
  std::vector<double> edges;  // explicit edges override count
};

struct HistogramParams {
  std::string feature;  // dataset feature, or the pseudo-features `actual` and `pred(<classifier>)`
  BinSpec bins;
  bool normalize = false;
  bool sort_by_count = false;
};
ViewPayload histogram(const ViewContext& ctx, const HistogramParams& params);

enum class ParetoDirection { Ascending, Descending };

struct CumulativeParams {
  ParetoDirection direction = ParetoDirection::Ascending;
  bool normalize = false;
};
ViewPayload cumulative_accuracy(const ViewContext& ctx, const CumulativeParams& params);

ViewPayload confusion_grid(const ViewContext& ctx);

/// Throws TooFewClassifiers with fewer than two compared classifiers.
ViewPayload pairwise_consensus(const ViewContext& ctx);

struct MetricParams {
  MetricKind metric = MetricKind::Accuracy;
  std::optional<std::string> label;
};
/// Throws MissingSelection when neither slot is populated.
ViewPayload selection_performance(const ViewContext& ctx, const MetricParams& params);

ViewPayload per_class_performance(const ViewContext& ctx, MetricKind metric);

ViewPayload standard_metrics(const ViewContext& ctx);
ViewPayload parallel_metrics(const ViewContext& ctx, MetricKind order_by);

inline constexpr std::size_t kMaxPageSize = 10000;

struct InstanceListParams {
  std::size_t offset = 0;
  std::size_t limit = 50;
  std::string sort_key = "index";
  bool descending = false;
  std::optional<Query> filter;
};
/// Throws MissingSelection with no populated slot, InvalidPage for limit outside 1..kMaxPageSize.
ViewPayload instance_list(const ViewContext& ctx, const InstanceListParams& params);

/// Selection controls: both slots, their relationship regions and the history.
ViewPayload selection_view(const SelectionState& state, std::uint64_t selection_version);

using ViewParams = std::map<std::string, std::string>;

/// String-parameter front end shared by the CLI and the HTTP service.
/// `params` in the payload echoes the resolved parameters, defaults included.
ViewPayload compute_view(const SelectionState& state, std::uint64_t selection_version, std::string_view kind,
                         const ViewParams& params);

const std::vector<std::string>& view_kinds();

}  // namespace boxer
