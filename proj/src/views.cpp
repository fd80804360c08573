#include "boxer/views.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "boxer/error.hpp"

namespace boxer {

using nlohmann::json;

namespace {

Box make_box(Query query, std::uint64_t count, std::uint64_t overlap_first, std::uint64_t overlap_second,
             std::uint64_t group_total, double threshold) {
  Box box;
  box.description = describe(query);
  box.query = std::move(query);
  box.count = count;
  box.overlap_first = overlap_first;
  box.overlap_second = overlap_second;
  box.small = is_small(count, group_total, threshold);
  return box;
}

json metric_json(const MetricValue& v) { return v.defined ? json(v.value) : json(nullptr); }

/// Visits the scope with the instance's membership in both selections.
template <typename Fn>
void scan_scope(const ViewContext& ctx, Fn&& fn) {
  const auto* first = ctx.first ? &*ctx.first : nullptr;
  const auto* second = ctx.second ? &*ctx.second : nullptr;
  ctx.scope_universe.for_each([&](InstanceIndex i) {
    fn(i, first != nullptr && first->contains(i), second != nullptr && second->contains(i));
  });
}

/// The confusion matrix of one classifier over the scope and over its
/// intersections with each selection; stacked box counts derive from these.
struct ConfusionTriple {
  ConfusionMatrix all;
  ConfusionMatrix first;
  ConfusionMatrix second;
};

ConfusionTriple confusion_triple(const ViewContext& ctx, ClassifierId c) {
  const auto l = ctx.data().label_count();
  ConfusionTriple t{ConfusionMatrix(l), ConfusionMatrix(l), ConfusionMatrix(l)};
  const auto actual = ctx.data().actual();
  const auto pred = ctx.data().predictions(c);
  scan_scope(ctx, [&](InstanceIndex i, bool in_first, bool in_second) {
    t.all.add(actual[i], pred[i]);
    if (in_first) t.first.add(actual[i], pred[i]);
    if (in_second) t.second.add(actual[i], pred[i]);
  });
  return t;
}

const std::string& classifier_name(const ViewContext& ctx, ClassifierId c) { return ctx.data().classifiers().name(c); }
const std::string& label_name(const ViewContext& ctx, LabelId l) { return ctx.data().labels().name(l); }

/// Numerator/complement box pair of a per-label precision or recall stack.
/// Precision stacks are over pred(c)=L, recall (and within-class accuracy) over actual=L.
struct LabelStack {
  std::uint64_t hit[3] = {0, 0, 0};
  std::uint64_t total[3] = {0, 0, 0};
};

LabelStack label_stack(const ConfusionTriple& t, LabelId label, bool over_predicted) {
  LabelStack s;
  const ConfusionMatrix* ms[3] = {&t.all, &t.first, &t.second};
  for (int k = 0; k < 3; ++k) {
    s.hit[k] = ms[k]->at(label, label);
    s.total[k] = over_predicted ? ms[k]->column_total(label) : ms[k]->row_total(label);
  }
  return s;
}

std::vector<Box> label_stack_boxes(const ViewContext& ctx, ClassifierId c, LabelId label, bool over_predicted,
                                   bool miss_first, const LabelStack& s) {
  const auto& clf = classifier_name(ctx, c);
  const auto& lab = label_name(ctx, label);
  Query hit = over_predicted ? Query::predicted(clf, lab) && Query::actual(lab)
                             : Query::actual(lab) && Query::predicted(clf, lab);
  Query miss = over_predicted ? Query::combine(SetOp::Difference, Query::predicted(clf, lab), Query::actual(lab))
                              : Query::combine(SetOp::Difference, Query::actual(lab), Query::predicted(clf, lab));
  Box hit_box = make_box(std::move(hit), s.hit[0], s.hit[1], s.hit[2], s.total[0], ctx.small_threshold);
  Box miss_box = make_box(std::move(miss), s.total[0] - s.hit[0], s.total[1] - s.hit[1], s.total[2] - s.hit[2],
                          s.total[0], ctx.small_threshold);
  if (miss_first) return {std::move(miss_box), std::move(hit_box)};
  return {std::move(hit_box), std::move(miss_box)};
}

std::vector<std::string> label_names(const ExperimentDataset& ds) { return ds.labels().names(); }

json classifier_names(const ExperimentDataset& ds) {
  json out = json::array();
  for (const auto c : ds.comparison_classifiers()) out.push_back(ds.classifiers().name(c));
  return out;
}

}  // namespace

bool is_small(std::uint64_t count, std::uint64_t group_total, double threshold) {
  if (count == 0 || group_total == 0) return false;
  return static_cast<double>(count) / static_cast<double>(group_total) < threshold;
}

ViewContext ViewContext::from_state(const SelectionState& state, std::uint64_t selection_version) {
  ViewContext ctx;
  ctx.dataset = &state.dataset();
  ctx.scope = state.scope();
  ctx.scope_universe = state.scope_universe();
  if (state.first()) ctx.first = state.first()->set;
  if (state.second()) ctx.second = state.second()->set;
  ctx.selection_version = selection_version;
  return ctx;
}

json to_json(const ViewPayload& payload) {
  json out = payload.meta;
  out["view"] = payload.view;
  out["params"] = payload.params;
  out["selection_version"] = payload.selection_version;
  out["normalized"] = payload.normalized;
  json groups = json::array();
  for (const auto& g : payload.groups) {
    json jg = g.meta;
    jg["label"] = g.label;
    jg["total"] = g.total;
    json boxes = json::array();
    for (const auto& b : g.boxes) {
      json jb = {{"query_text", b.description},
                 {"count", b.count},
                 {"overlap_first", b.overlap_first},
                 {"overlap_second", b.overlap_second},
                 {"small_flag", b.small}};
      if (payload.normalized) {
        const auto c = static_cast<double>(b.count);
        jb["fraction_first"] = b.count == 0 ? json(nullptr) : json(static_cast<double>(b.overlap_first) / c);
        jb["fraction_second"] = b.count == 0 ? json(nullptr) : json(static_cast<double>(b.overlap_second) / c);
      }
      boxes.push_back(std::move(jb));
    }
    jg["boxes"] = std::move(boxes);
    groups.push_back(std::move(jg));
  }
  out["groups"] = std::move(groups);
  return out;
}

std::string to_text(const json& value) { return value.dump(-1, ' ', false, json::error_handler_t::replace); }

// ---------------------------------------------------------------------------

ViewPayload classifier_performance(const ViewContext& ctx, const PerformanceParams& params) {
  const auto& ds = ctx.data();
  std::optional<LabelId> label;
  if (params.label) label = ds.require_label(*params.label);
  const Averaging averaging = label ? Averaging::of_class(*label) : Averaging::macro();
  const bool decomposable = is_count_ratio(params.metric, averaging);

  ViewPayload payload;
  payload.view = "classifier_performance";
  payload.selection_version = ctx.selection_version;
  payload.normalized = params.normalize && decomposable;
  payload.meta["decomposable"] = decomposable;
  if (!decomposable) {
    payload.meta["error"] = {{"code", "NonDecomposableMetric"},
                             {"message", std::string(metric_name(params.metric)) +
                                             (label ? "" : " (macro)") + " is not a ratio of subset counts"}};
  }

  struct Row {
    ClassifierId classifier;
    MetricValue value;
    BoxGroup group;
  };
  std::vector<Row> rows;
  for (const auto c : ds.comparison_classifiers()) {
    const auto t = confusion_triple(ctx, c);
    Row row{c, metric(t.all, params.metric, averaging), {}};
    row.group.label = classifier_name(ctx, c);
    row.group.meta["classifier"] = row.group.label;
    row.group.meta["value"] = metric_json(row.value);

    if (decomposable) {
      const bool per_label = params.metric == MetricKind::Precision || params.metric == MetricKind::Recall;
      if (per_label) {
        const bool over_predicted = params.metric == MetricKind::Precision;
        const auto s = label_stack(t, *label, over_predicted);
        row.group.total = s.total[0];
        row.group.boxes = label_stack_boxes(ctx, c, *label, over_predicted, false, s);
      } else {
        // accuracy / error rate: correct and incorrect stack over the whole scope
        const auto& name = row.group.label;
        const std::uint64_t size[3] = {t.all.subset_size(), t.first.subset_size(), t.second.subset_size()};
        const std::uint64_t hit[3] = {t.all.trace(), t.first.trace(), t.second.trace()};
        row.group.total = size[0];
        Box correct = make_box(Query::correct(name), hit[0], hit[1], hit[2], size[0], ctx.small_threshold);
        Box wrong = make_box(Query::incorrect(name), size[0] - hit[0], size[1] - hit[1], size[2] - hit[2], size[0],
                             ctx.small_threshold);
        if (params.metric == MetricKind::ErrorRate) {
          row.group.boxes = {std::move(wrong), std::move(correct)};
        } else {
          row.group.boxes = {std::move(correct), std::move(wrong)};
        }
      }
    } else {
      row.group.total = t.all.subset_size();
    }
    rows.push_back(std::move(row));
  }

  if (params.sort_by_value) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      return ranks_before(a.value, a.classifier, b.value, b.classifier);
    });
  }
  for (auto& r : rows) payload.groups.push_back(std::move(r.group));
  return payload;
}

// ---------------------------------------------------------------------------

namespace {

struct BinCounts {
  std::vector<std::uint64_t> all, first, second;
  explicit BinCounts(std::size_t n) : all(n, 0), first(n, 0), second(n, 0) {}
  void add(std::size_t bin, bool in_first, bool in_second) {
    ++all[bin];
    if (in_first) ++first[bin];
    if (in_second) ++second[bin];
  }
  std::uint64_t total() const { return std::accumulate(all.begin(), all.end(), std::uint64_t{0}); }
};

std::vector<double> equal_width_edges(double lo, double hi, std::size_t count) {
  if (lo == hi) return {lo, hi};
  std::vector<double> edges(count + 1);
  for (std::size_t i = 0; i < count; ++i) {
    edges[i] = std::min(hi, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count));
  }
  edges[count] = hi;
  return edges;
}

}  // namespace

ViewPayload histogram(const ViewContext& ctx, const HistogramParams& params) {
  const auto& ds = ctx.data();
  ViewPayload payload;
  payload.view = "histogram";
  payload.selection_version = ctx.selection_version;
  payload.normalized = params.normalize;
  BoxGroup group;
  group.label = params.feature;

  // Categorical sources share one path: a code per instance (or missing) and a box query per code.
  std::vector<std::string> categories;
  std::function<Query(std::size_t)> category_query;
  std::function<std::optional<std::uint32_t>(InstanceIndex)> code_of;
  const auto feature = ds.find_feature(params.feature);

  if (feature && ds.feature(*feature).continuous()) {
    const auto& col = ds.feature(*feature);
    std::vector<double> edges = params.bins.edges;
    if (!edges.empty()) {
      if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
          std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
        throw Error(ErrorCode::InvalidParameter, "bin edges must be strictly increasing with at least two edges",
                    "edges");
      }
    } else {
      if (params.bins.count == 0) throw Error(ErrorCode::InvalidParameter, "bin count must be positive", "bins");
      bool any = false;
      double lo = 0.0;
      double hi = 0.0;
      ctx.scope_universe.for_each([&](InstanceIndex i) {
        if (col.missing[i] != 0) return;
        const double v = col.values[i];
        if (!any) {
          lo = hi = v;
          any = true;
        } else {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
      });
      if (any) edges = equal_width_edges(lo, hi, params.bins.count);
    }

    payload.meta["kind"] = "continuous";
    payload.meta["edges"] = edges;
    const std::size_t bins = edges.empty() ? 0 : edges.size() - 1;
    BinCounts counts(bins);
    std::uint64_t missing = 0;
    std::uint64_t outside = 0;
    if (bins > 0) {
      scan_scope(ctx, [&](InstanceIndex i, bool f, bool s) {
        if (col.missing[i] != 0) {
          ++missing;
          return;
        }
        const double v = col.values[i];
        if (v < edges.front() || v > edges.back()) {
          ++outside;
          return;
        }
        auto bin = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()) - 1;
        if (bin == bins) bin = bins - 1;
        counts.add(bin, f, s);
      });
    }
    group.total = counts.total();
    json bin_meta = json::array();
    for (std::size_t b = 0; b < bins; ++b) {
      const bool closed = b + 1 == bins;
      group.boxes.push_back(make_box(Query::feature_range(params.feature, edges[b], edges[b + 1], closed),
                                     counts.all[b], counts.first[b], counts.second[b], group.total,
                                     ctx.small_threshold));
      bin_meta.push_back({{"lo", edges[b]}, {"hi", edges[b + 1]}, {"right_closed", closed}});
    }
    payload.meta["bins"] = std::move(bin_meta);
    payload.meta["missing"] = missing;
    payload.meta["outside"] = outside;
    if (params.sort_by_count) {
      throw Error(ErrorCode::InvalidParameter, "sort=count applies to categorical histograms only", "sort");
    }
    payload.groups.push_back(std::move(group));
    return payload;
  }

  if (feature) {
    const auto& col = ds.feature(*feature);
    categories = col.categories.names();
    const auto name = params.feature;
    category_query = [&, name](std::size_t k) { return Query::feature_equals(name, categories[k]); };
    code_of = [&col](InstanceIndex i) -> std::optional<std::uint32_t> {
      if (col.missing[i] != 0) return std::nullopt;
      return col.codes[i];
    };
  } else if (params.feature == "actual") {
    categories = label_names(ds);
    const auto actual = ds.actual();
    category_query = [&](std::size_t k) { return Query::actual(categories[k]); };
    code_of = [actual](InstanceIndex i) -> std::optional<std::uint32_t> { return actual[i]; };
  } else if (params.feature.starts_with("pred(") && params.feature.ends_with(")")) {
    const auto clf_name = params.feature.substr(5, params.feature.size() - 6);
    const auto pred = ds.predictions(ds.require_classifier(clf_name));
    categories = label_names(ds);
    category_query = [&, clf_name](std::size_t k) { return Query::predicted(clf_name, categories[k]); };
    code_of = [pred](InstanceIndex i) -> std::optional<std::uint32_t> { return pred[i]; };
  } else {
    throw Error(ErrorCode::UnknownFeature, "unknown feature '" + params.feature + "'", "feature");
  }

  payload.meta["kind"] = "categorical";
  BinCounts counts(categories.size());
  std::uint64_t missing = 0;
  scan_scope(ctx, [&](InstanceIndex i, bool f, bool s) {
    if (const auto code = code_of(i)) {
      counts.add(*code, f, s);
    } else {
      ++missing;
    }
  });
  group.total = counts.total();
  std::vector<std::size_t> order(categories.size());
  std::iota(order.begin(), order.end(), 0);
  if (params.sort_by_count) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return counts.all[a] > counts.all[b]; });
  }
  json cats = json::array();
  for (const auto k : order) {
    group.boxes.push_back(make_box(category_query(k), counts.all[k], counts.first[k], counts.second[k], group.total,
                                   ctx.small_threshold));
    cats.push_back(categories[k]);
  }
  payload.meta["categories"] = std::move(cats);
  payload.meta["missing"] = missing;
  payload.groups.push_back(std::move(group));
  return payload;
}

// ---------------------------------------------------------------------------

ViewPayload cumulative_accuracy(const ViewContext& ctx, const CumulativeParams& params) {
  const auto& ds = ctx.data();
  const std::size_t m = ds.comparison_classifiers().size();
  const auto per_instance = correct_counts(ds);
  BinCounts counts(m + 1);
  scan_scope(ctx, [&](InstanceIndex i, bool f, bool s) { counts.add(per_instance[i], f, s); });

  ViewPayload payload;
  payload.view = "cumulative";
  payload.selection_version = ctx.selection_version;
  payload.normalized = params.normalize;
  BoxGroup group;
  group.label = "correct classifiers";
  group.total = counts.total();
  for (std::size_t k = 0; k <= m; ++k) {
    group.boxes.push_back(make_box(Query::cumulative_count(k), counts.all[k], counts.first[k], counts.second[k],
                                   group.total, ctx.small_threshold));
  }

  std::vector<std::size_t> order(m + 1);
  std::iota(order.begin(), order.end(), 0);
  if (params.direction == ParetoDirection::Descending) std::reverse(order.begin(), order.end());
  json pareto = json::array();
  if (group.total > 0) {
    std::uint64_t running = 0;
    for (const auto k : order) {
      running += counts.all[k];
      pareto.push_back(static_cast<double>(running) / static_cast<double>(group.total));
    }
  }
  payload.meta["pareto"] = std::move(pareto);
  payload.meta["pareto_order"] = order;
  payload.meta["direction"] = params.direction == ParetoDirection::Ascending ? "ascending" : "descending";
  payload.meta["classifier_count"] = m;
  payload.groups.push_back(std::move(group));
  return payload;
}

// ---------------------------------------------------------------------------

ViewPayload confusion_grid(const ViewContext& ctx) {
  const auto& ds = ctx.data();
  const auto l = ds.label_count();
  ViewPayload payload;
  payload.view = "confusion";
  payload.selection_version = ctx.selection_version;
  payload.meta["labels"] = label_names(ds);
  payload.meta["shape"] = {l, l};
  payload.meta["classifiers"] = classifier_names(ds);
  for (const auto c : ds.comparison_classifiers()) {
    const auto t = confusion_triple(ctx, c);
    BoxGroup group;
    group.label = classifier_name(ctx, c);
    group.total = t.all.subset_size();
    std::uint64_t max_count = 0;
    for (LabelId a = 0; a < l; ++a) {
      for (LabelId p = 0; p < l; ++p) {
        const auto count = t.all.at(a, p);
        max_count = std::max(max_count, count);
        group.boxes.push_back(make_box(Query::actual(label_name(ctx, a)) && Query::predicted(group.label, label_name(ctx, p)),
                                       count, t.first.at(a, p), t.second.at(a, p), group.total, ctx.small_threshold));
      }
    }
    group.meta["classifier"] = group.label;
    group.meta["max_count"] = max_count;
    payload.groups.push_back(std::move(group));
  }
  return payload;
}

// ---------------------------------------------------------------------------

ViewPayload pairwise_consensus(const ViewContext& ctx) {
  const auto& ds = ctx.data();
  const auto comp = ds.comparison_classifiers();
  const auto m = comp.size();
  if (m < 2) {
    throw Error(ErrorCode::TooFewClassifiers, "pairwise consensus needs at least two compared classifiers");
  }
  const auto actual = ds.actual();
  const auto scope_size = ctx.scope_universe.count();

  // word-level masks: agreement per pair, correctness per classifier, and the
  // scope and selection words the counts are restricted to
  const auto n = ds.size();
  const auto words = (n + 63) / 64;
  auto mask_where = [&](auto&& pred) {
    std::vector<std::uint64_t> out(words, 0);
    for (std::size_t i = 0; i < n; ++i) out[i >> 6] |= static_cast<std::uint64_t>(pred(i)) << (i & 63);
    return out;
  };
  std::vector<std::vector<std::uint64_t>> correct(m);
  for (std::size_t a = 0; a < m; ++a) {
    const auto pa = ds.predictions(comp[a]);
    correct[a] = mask_where([&](std::size_t i) { return pa[i] == actual[i]; });
  }
  const auto scope_words = ctx.scope_universe.words();
  const auto first_words = ctx.first ? ctx.first->words() : std::span<const std::uint64_t>{};
  const auto second_words = ctx.second ? ctx.second->words() : std::span<const std::uint64_t>{};

  struct Cell {
    std::uint64_t correct[3] = {0, 0, 0};
    std::uint64_t wrong[3] = {0, 0, 0};
  };
  std::vector<Cell> cells(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    const auto pa = ds.predictions(comp[a]);
    for (std::size_t b = a; b < m; ++b) {
      const auto pb = ds.predictions(comp[b]);
      const auto agree = mask_where([&](std::size_t i) { return pa[i] == pb[i]; });
      Cell cell;
      for (std::size_t w = 0; w < words; ++w) {
        const auto both = agree[w] & scope_words[w];
        const auto right = both & correct[a][w];
        const auto wrong = both & ~correct[a][w];
        cell.correct[0] += static_cast<std::uint64_t>(std::popcount(right));
        cell.wrong[0] += static_cast<std::uint64_t>(std::popcount(wrong));
        if (!first_words.empty()) {
          cell.correct[1] += static_cast<std::uint64_t>(std::popcount(right & first_words[w]));
          cell.wrong[1] += static_cast<std::uint64_t>(std::popcount(wrong & first_words[w]));
        }
        if (!second_words.empty()) {
          cell.correct[2] += static_cast<std::uint64_t>(std::popcount(right & second_words[w]));
          cell.wrong[2] += static_cast<std::uint64_t>(std::popcount(wrong & second_words[w]));
        }
      }
      cells[a * m + b] = cell;
      cells[b * m + a] = cell;
    }
  }

  ViewPayload payload;
  payload.view = "consensus";
  payload.selection_version = ctx.selection_version;
  payload.meta["classifiers"] = classifier_names(ds);
  payload.meta["shape"] = {m, m};
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const auto& na = classifier_name(ctx, comp[a]);
      const auto& nb = classifier_name(ctx, comp[b]);
      const auto& cell = cells[a * m + b];
      Query agree_correct;
      Query agree_wrong;
      if (a == b) {
        agree_correct = Query::correct(na);
        agree_wrong = Query::incorrect(na);
      } else {
        agree_correct = Query::correct(na) && Query::correct(nb);
        Query agreement;
        for (LabelId k = 0; k < ds.label_count(); ++k) {
          auto same = Query::predicted(na, label_name(ctx, k)) && Query::predicted(nb, label_name(ctx, k));
          agreement = k == 0 ? std::move(same) : std::move(agreement) || std::move(same);
        }
        agree_wrong = Query::combine(SetOp::Difference, std::move(agreement), Query::correct(na));
      }
      BoxGroup group;
      group.label = na + "|" + nb;
      group.total = scope_size;
      group.meta["row"] = na;
      group.meta["column"] = nb;
      group.meta["agree"] = cell.correct[0] + cell.wrong[0];
      group.boxes.push_back(make_box(std::move(agree_correct), cell.correct[0], cell.correct[1], cell.correct[2],
                                     scope_size, ctx.small_threshold));
      group.boxes.push_back(make_box(std::move(agree_wrong), cell.wrong[0], cell.wrong[1], cell.wrong[2], scope_size,
                                     ctx.small_threshold));
      payload.groups.push_back(std::move(group));
    }
  }
  return payload;
}

// ---------------------------------------------------------------------------

ViewPayload selection_performance(const ViewContext& ctx, const MetricParams& params) {
  const auto& ds = ctx.data();
  if (!ctx.first && !ctx.second) {
    throw Error(ErrorCode::MissingSelection, "selection performance needs at least one selection");
  }
  std::optional<LabelId> label;
  if (params.label) label = ds.require_label(*params.label);
  const Averaging averaging = label ? Averaging::of_class(*label) : Averaging::macro();

  ViewPayload payload;
  payload.view = "selection_performance";
  payload.selection_version = ctx.selection_version;
  json rows = json::array();
  const std::pair<const char*, const std::optional<InstanceSet>*> slots[] = {{"first", &ctx.first},
                                                                             {"second", &ctx.second}};
  for (const auto c : ds.comparison_classifiers()) {
    json row = {{"classifier", classifier_name(ctx, c)}};
    for (const auto& [name, slot] : slots) {
      if (!*slot) continue;
      const auto subset = **slot & ctx.scope_universe;
      const auto v = metric(confusion(ds, c, subset), params.metric, averaging);
      row[name] = {{"value", metric_json(v)}, {"defined", v.defined}, {"size", subset.count()}};
    }
    rows.push_back(std::move(row));
  }
  payload.meta["rows"] = std::move(rows);
  payload.meta["metric"] = metric_name(params.metric);
  return payload;
}

ViewPayload per_class_performance(const ViewContext& ctx, MetricKind kind) {
  const auto& ds = ctx.data();
  ViewPayload payload;
  payload.view = "per_class";
  payload.selection_version = ctx.selection_version;
  payload.meta["labels"] = label_names(ds);
  payload.meta["classifiers"] = classifier_names(ds);
  payload.meta["metric"] = metric_name(kind);
  const bool decomposable = kind != MetricKind::F1 && kind != MetricKind::Mcc;
  payload.meta["decomposable"] = decomposable;

  for (const auto c : ds.comparison_classifiers()) {
    const auto t = confusion_triple(ctx, c);
    for (LabelId label = 0; label < ds.label_count(); ++label) {
      const auto v = metric(t.all, kind, Averaging::of_class(label));
      BoxGroup group;
      group.label = classifier_name(ctx, c) + "|" + label_name(ctx, label);
      group.meta["classifier"] = classifier_name(ctx, c);
      group.meta["class"] = label_name(ctx, label);
      group.meta["value"] = metric_json(v);
      const bool over_predicted = kind == MetricKind::Precision;
      const auto s = label_stack(t, label, over_predicted);
      group.total = s.total[0];
      if (decomposable) {
        group.boxes = label_stack_boxes(ctx, c, label, over_predicted, kind == MetricKind::ErrorRate, s);
      }
      payload.groups.push_back(std::move(group));
    }
  }
  return payload;
}

namespace {

json metric_rows(const ViewContext& ctx, const std::vector<MetricRow>& table) {
  json rows = json::array();
  for (const auto& row : table) {
    json values = json::object();
    for (const auto kind : kAllMetrics) values[std::string(metric_name(kind))] = metric_json(row.get(kind));
    rows.push_back({{"classifier", classifier_name(ctx, row.classifier)},
                    {"metrics", std::move(values)},
                    {"skipped_classes", row.get(MetricKind::F1).skipped_classes}});
  }
  return rows;
}

}  // namespace

ViewPayload standard_metrics(const ViewContext& ctx) {
  ViewPayload payload;
  payload.view = "metrics";
  payload.selection_version = ctx.selection_version;
  payload.meta["rows"] = metric_rows(ctx, metric_table(ctx.data(), ctx.scope_universe));
  json kinds = json::array();
  for (const auto kind : kAllMetrics) kinds.push_back(metric_name(kind));
  payload.meta["metric_kinds"] = std::move(kinds);
  return payload;
}

ViewPayload parallel_metrics(const ViewContext& ctx, MetricKind order_by) {
  const auto table = metric_table(ctx.data(), ctx.scope_universe);
  ViewPayload payload;
  payload.view = "parallel_metrics";
  payload.selection_version = ctx.selection_version;
  auto rows = metric_rows(ctx, table);

  std::vector<std::size_t> order(table.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranks_before(table[a].get(order_by), table[a].classifier, table[b].get(order_by), table[b].classifier);
  });
  json ordering = json::array();
  for (std::size_t r = 0; r < order.size(); ++r) {
    rows[order[r]]["rank"] = r + 1;
    ordering.push_back(classifier_name(ctx, table[order[r]].classifier));
  }
  payload.meta["rows"] = std::move(rows);
  payload.meta["order"] = std::move(ordering);
  payload.meta["order_by"] = metric_name(order_by);
  json kinds = json::array();
  for (const auto kind : kAllMetrics) kinds.push_back(metric_name(kind));
  payload.meta["metric_kinds"] = std::move(kinds);
  return payload;
}

// ---------------------------------------------------------------------------

ViewPayload instance_list(const ViewContext& ctx, const InstanceListParams& params) {
  const auto& ds = ctx.data();
  if (!ctx.first && !ctx.second) {
    throw Error(ErrorCode::MissingSelection, "the instance list shows the active selections; none is set");
  }
  if (params.limit == 0 || params.limit > kMaxPageSize) {
    throw Error(ErrorCode::InvalidPage, "limit must be between 1 and " + std::to_string(kMaxPageSize), "limit");
  }

  InstanceSet rows_set(ds.size());
  if (ctx.first) rows_set |= *ctx.first;
  if (ctx.second) rows_set |= *ctx.second;
  rows_set &= ctx.scope_universe;
  if (params.filter) rows_set &= evaluate(*params.filter, ds, ctx.scope_universe);
  auto indices = rows_set.to_vector();

  // Sort keys: index, id, actual, a feature name, or a classifier name (its prediction).
  const auto& key = params.sort_key;
  if (key != "index") {
    std::function<bool(InstanceIndex, InstanceIndex)> less;
    if (key == "id") {
      less = [&](InstanceIndex a, InstanceIndex b) { return ds.instance_ids()[a] < ds.instance_ids()[b]; };
    } else if (key == "actual") {
      const auto actual = ds.actual();
      less = [actual](InstanceIndex a, InstanceIndex b) { return actual[a] < actual[b]; };
    } else if (const auto f = ds.find_feature(key)) {
      const auto& col = ds.feature(*f);
      // missing values sort after present ones in either direction
      less = [&col, desc = params.descending](InstanceIndex a, InstanceIndex b) {
        const bool ma = col.missing[a] != 0;
        const bool mb = col.missing[b] != 0;
        if (ma || mb) return !ma && mb ? !desc : (ma && !mb ? desc : false);
        return col.continuous() ? col.values[a] < col.values[b] : col.codes[a] < col.codes[b];
      };
    } else if (const auto c = ds.classifiers().find(key)) {
      const auto pred = ds.predictions(*c);
      less = [pred](InstanceIndex a, InstanceIndex b) { return pred[a] < pred[b]; };
    } else {
      throw Error(ErrorCode::InvalidParameter, "unknown sort key '" + key + "'", "sort");
    }
    if (params.descending) {
      std::stable_sort(indices.begin(), indices.end(), [&](InstanceIndex a, InstanceIndex b) { return less(b, a); });
    } else {
      std::stable_sort(indices.begin(), indices.end(), less);
    }
  } else if (params.descending) {
    std::reverse(indices.begin(), indices.end());
  }

  ViewPayload payload;
  payload.view = "instances";
  payload.selection_version = ctx.selection_version;
  json features = json::array();
  for (FeatureId f = 0; f < ds.feature_count(); ++f) features.push_back(ds.feature(f).schema.name);
  json classifiers = json::array();
  for (ClassifierId c = 0; c < ds.classifier_count(); ++c) classifiers.push_back(ds.classifiers().name(c));
  payload.meta["features"] = std::move(features);
  payload.meta["classifiers"] = std::move(classifiers);
  payload.meta["total_count"] = indices.size();
  payload.meta["offset"] = params.offset;
  payload.meta["limit"] = params.limit;

  json rows = json::array();
  for (std::size_t r = params.offset; r < indices.size() && r < params.offset + params.limit; ++r) {
    const auto i = indices[r];
    json preds = json::array();
    for (ClassifierId c = 0; c < ds.classifier_count(); ++c) preds.push_back(label_name(ctx, ds.predictions(c)[i]));
    json values = json::array();
    for (FeatureId f = 0; f < ds.feature_count(); ++f) {
      const auto& col = ds.feature(f);
      if (col.missing[i] != 0) {
        values.push_back(nullptr);
      } else if (col.continuous()) {
        values.push_back(col.values[i]);
      } else {
        values.push_back(col.categories.name(col.codes[i]));
      }
    }
    rows.push_back({{"index", i},
                    {"id", ds.instance_ids()[i]},
                    {"in_first", ctx.first && ctx.first->contains(i)},
                    {"in_second", ctx.second && ctx.second->contains(i)},
                    {"actual", label_name(ctx, ds.actual()[i])},
                    {"split", ds.split()[i] == Split::Train ? "train" : "test"},
                    {"predictions", std::move(preds)},
                    {"features", std::move(values)}});
  }
  payload.meta["rows"] = std::move(rows);
  return payload;
}

// ---------------------------------------------------------------------------

ViewPayload selection_view(const SelectionState& state, std::uint64_t selection_version) {
  ViewPayload payload;
  payload.view = "selection";
  payload.selection_version = selection_version;
  payload.meta["scope"] = scope_name(state.scope());
  payload.meta["scope_size"] = state.scope_universe().count();
  for (const auto slot : {Slot::First, Slot::Second}) {
    const auto& s = state.slot(slot);
    payload.meta[std::string(slot_name(slot))] =
        s ? json{{"query_text", s->description}, {"count", s->set.count()}} : json(nullptr);
  }
  if (state.first() && state.second()) {
    const auto rel = state.relationship();
    auto region = [](const RegionSummary& r) { return json{{"count", r.count}, {"query_text", describe(r.query)}}; };
    payload.meta["relationship"] = {{"only_first", region(rel.only_first)},
                                    {"both", region(rel.both)},
                                    {"only_second", region(rel.only_second)},
                                    {"neither", region(rel.neither)}};
  } else {
    payload.meta["relationship"] = nullptr;
  }
  json history = json::array();
  for (std::size_t i = 0; i < state.history().size(); ++i) {
    history.push_back({{"index", i}, {"query_text", state.history()[i].description}});
  }
  payload.meta["history"] = std::move(history);
  return payload;
}

}  // namespace boxer
