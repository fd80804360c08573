#include <charconv>
#include <cmath>
#include <set>

#include "boxer/error.hpp"
#include "boxer/views.hpp"

namespace boxer {

using nlohmann::json;

namespace {

class ParamReader {
 public:
  ParamReader(const ViewParams& params, std::string_view kind) : params_(params), kind_(kind) {}

  std::optional<std::string> text(const std::string& key) {
    used_.insert(key);
    const auto it = params_.find(key);
    if (it == params_.end()) return std::nullopt;
    return it->second;
  }

  std::string choice(const std::string& key, std::initializer_list<std::string_view> allowed) {
    const auto value = text(key);
    if (!value) return std::string(*allowed.begin());
    for (const auto a : allowed) {
      if (a == *value) return *value;
    }
    std::string list;
    for (const auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw Error(ErrorCode::InvalidParameter, key + " must be one of: " + list, key);
  }

  bool flag(const std::string& key) {
    const auto value = text(key);
    if (!value || *value == "false" || *value == "0") return false;
    if (*value == "true" || *value == "1" || value->empty()) return true;
    throw Error(ErrorCode::InvalidParameter, key + " must be true or false", key);
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    const auto value = text(key);
    if (!value) return fallback;
    return parse_count(*value, key);
  }

  static std::size_t parse_count(std::string_view value, const std::string& key) {
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
      throw Error(ErrorCode::InvalidParameter, key + " must be a non-negative integer", key);
    }
    return out;
  }

  static double parse_number(std::string_view value, const std::string& key) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || value.empty() || !std::isfinite(out)) {
      throw Error(ErrorCode::InvalidParameter, key + " must be a finite number", key);
    }
    return out;
  }

  MetricKind metric(const std::string& key, MetricKind fallback) {
    const auto value = text(key);
    if (!value) return fallback;
    if (const auto kind = parse_metric(*value)) return *kind;
    throw Error(ErrorCode::InvalidParameter, "unknown metric '" + *value + "'", key);
  }

  void finish() const {
    for (const auto& [key, value] : params_) {
      if (!used_.contains(key)) {
        throw Error(ErrorCode::InvalidParameter, "unknown parameter '" + key + "' for view " + std::string(kind_), key);
      }
    }
  }

 private:
  const ViewParams& params_;
  std::string_view kind_;
  std::set<std::string> used_;
};

json optional_json(const std::optional<std::string>& value) { return value ? json(*value) : json(nullptr); }

}  // namespace

const std::vector<std::string>& view_kinds() {
  static const std::vector<std::string> kinds = {
      "classifier_performance", "histogram", "cumulative", "confusion", "consensus", "selection_performance",
      "per_class",              "metrics",   "parallel_metrics", "instances", "selection"};
  return kinds;
}

ViewPayload compute_view(const SelectionState& state, std::uint64_t selection_version, std::string_view kind,
                         const ViewParams& params) {
  ParamReader reader(params, kind);
  auto ctx = ViewContext::from_state(state, selection_version);
  json resolved = json::object();
  if (const auto threshold = reader.text("small_threshold")) {
    ctx.small_threshold = ParamReader::parse_number(*threshold, "small_threshold");
    if (ctx.small_threshold < 0.0 || ctx.small_threshold > 1.0) {
      throw Error(ErrorCode::InvalidParameter, "small_threshold must lie in [0, 1]", "small_threshold");
    }
  }
  resolved["small_threshold"] = ctx.small_threshold;

  ViewPayload payload;
  if (kind == "classifier_performance") {
    PerformanceParams p;
    p.metric = reader.metric("metric", MetricKind::Accuracy);
    p.label = reader.text("label");
    p.sort_by_value = reader.choice("sort", {"none", "value"}) == "value";
    p.normalize = reader.flag("normalize");
    reader.finish();
    resolved.update({{"metric", metric_name(p.metric)},
                     {"label", optional_json(p.label)},
                     {"sort", p.sort_by_value ? "value" : "none"},
                     {"normalize", p.normalize}});
    payload = classifier_performance(ctx, p);
  } else if (kind == "histogram") {
    HistogramParams p;
    const auto feature = reader.text("feature");
    if (!feature) throw Error(ErrorCode::InvalidParameter, "histogram needs a feature parameter", "feature");
    p.feature = *feature;
    p.bins.count = reader.count("bins", p.bins.count);
    if (const auto edges = reader.text("edges")) {
      std::string_view rest = *edges;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        p.bins.edges.push_back(ParamReader::parse_number(rest.substr(0, comma), "edges"));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
    }
    p.normalize = reader.flag("normalize");
    p.sort_by_count = reader.choice("sort", {"natural", "count"}) == "count";
    reader.finish();
    resolved.update({{"feature", p.feature},
                     {"bins", p.bins.count},
                     {"edges", p.bins.edges},
                     {"normalize", p.normalize},
                     {"sort", p.sort_by_count ? "count" : "natural"}});
    payload = histogram(ctx, p);
  } else if (kind == "cumulative") {
    CumulativeParams p;
    p.direction =
        reader.choice("direction", {"ascending", "descending"}) == "ascending" ? ParetoDirection::Ascending
                                                                               : ParetoDirection::Descending;
    p.normalize = reader.flag("normalize");
    reader.finish();
    resolved.update({{"direction", p.direction == ParetoDirection::Ascending ? "ascending" : "descending"},
                     {"normalize", p.normalize}});
    payload = cumulative_accuracy(ctx, p);
  } else if (kind == "confusion") {
    reader.finish();
    payload = confusion_grid(ctx);
  } else if (kind == "consensus") {
    reader.finish();
    payload = pairwise_consensus(ctx);
  } else if (kind == "selection_performance") {
    MetricParams p;
    p.metric = reader.metric("metric", MetricKind::Accuracy);
    p.label = reader.text("label");
    reader.finish();
    resolved.update({{"metric", metric_name(p.metric)}, {"label", optional_json(p.label)}});
    payload = selection_performance(ctx, p);
  } else if (kind == "per_class") {
    const auto m = reader.metric("metric", MetricKind::Recall);
    reader.finish();
    resolved["metric"] = metric_name(m);
    payload = per_class_performance(ctx, m);
  } else if (kind == "metrics") {
    reader.finish();
    payload = standard_metrics(ctx);
  } else if (kind == "parallel_metrics") {
    const auto order_by = reader.metric("order_by", MetricKind::Accuracy);
    reader.finish();
    resolved["order_by"] = metric_name(order_by);
    payload = parallel_metrics(ctx, order_by);
  } else if (kind == "instances") {
    InstanceListParams p;
    p.offset = reader.count("offset", p.offset);
    p.limit = reader.count("limit", p.limit);
    if (const auto sort = reader.text("sort")) p.sort_key = *sort;
    p.descending = reader.choice("order", {"asc", "desc"}) == "desc";
    const auto filter = reader.text("filter");
    if (filter) p.filter = parse_query(*filter);
    reader.finish();
    resolved.update({{"offset", p.offset},
                     {"limit", p.limit},
                     {"sort", p.sort_key},
                     {"order", p.descending ? "desc" : "asc"},
                     {"filter", p.filter ? json(describe(*p.filter)) : json(nullptr)}});
    payload = instance_list(ctx, p);
  } else if (kind == "selection") {
    reader.finish();
    payload = selection_view(state, selection_version);
  } else {
    throw Error(ErrorCode::UnknownView, "unknown view '" + std::string(kind) + "'", "kind");
  }
  resolved["scope"] = scope_name(state.scope());
  payload.params = std::move(resolved);
  return payload;
}

}  // namespace boxer
