// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "boxer/error.hpp"
#include "boxer/http_service.hpp"
#include "boxer/script.hpp"
#include "boxer/session.hpp"
#include "boxer/synth.hpp"
#include "boxer/views.hpp"
#include "httplib.h"
#include "support/process.hpp"
#include "support/test_support.hpp"

using namespace boxer;
using boxer::testing::Rng;
using nlohmann::json;

namespace {

constexpr double kMetricRelTol = 1e-12;
constexpr double kOracleBudgetS = 60.0;
constexpr double kSetAlgebraBudgetS = 30.0;
constexpr double kViewBudgetS = 60.0;
constexpr double kOpBudgetMs = 100.0;
constexpr double kLoadBudgetS = 5.0;
constexpr int kOpRepeats = 3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Collects the first few failure descriptions of one criterion.
class Outcome {
 public:
  void fail(const std::string& what) {
    if (failures_++ < 5) notes_ << "\n    " << what;
  }
  bool ok() const { return failures_ == 0; }
  std::size_t failures() const { return failures_; }
  std::string notes() const { return notes_.str(); }

 private:
  std::size_t failures_ = 0;
  std::ostringstream notes_;
};

std::vector<bool> members(const InstanceSet& s) {
  std::vector<bool> out(s.universe_size());
  s.for_each([&](InstanceIndex i) { out[i] = true; });
  return out;
}

Scope random_scope(Rng& rng) {
  const Scope scopes[] = {Scope::Train, Scope::Test, Scope::All};
  return scopes[testing::uniform(rng, 0, 2)];
}

// ---------------------------------------------------------------------------

std::string metric_oracle(Outcome& out) {
  Rng rng(20240601);
  std::size_t comparisons = 0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    testing::RandomSpec spec;
    spec.allow_gold = true;
    const ExperimentDataset ds(testing::random_columns(rng, spec));
    const auto subset = testing::uniform_real(rng) < 0.2 ? scope_set(ds, random_scope(rng))
                                                         : testing::random_set(rng, ds.size());
    const auto member = members(subset);
    const auto l = ds.label_count();
    for (ClassifierId c = 0; c < ds.classifier_count(); ++c) {
      const auto matrix = confusion(ds, c, subset);
      const auto oracle = testing::oracle_counts(ds, c, member);
      for (LabelId a = 0; a < l; ++a) {
        for (LabelId p = 0; p < l; ++p) {
          ++comparisons;
          if (matrix.at(a, p) != oracle.cells[a * l + p]) {
            out.fail("trial " + std::to_string(trial) + ": cell mismatch");
          }
        }
      }
      if (matrix.subset_size() != oracle.size || matrix.trace() != oracle.correct) {
        out.fail("trial " + std::to_string(trial) + ": size/trace mismatch");
      }
      std::vector<std::optional<LabelId>> averagings{std::nullopt};
      for (LabelId k = 0; k < l; ++k) averagings.emplace_back(k);
      for (const auto kind : kAllMetrics) {
        for (const auto& avg : averagings) {
          const auto got = metric(matrix, kind, avg ? Averaging::of_class(*avg) : Averaging::macro());
          const auto want = testing::oracle_metric(ds, c, member, kind, avg);
          ++comparisons;
          if (got.defined != want.defined ||
              (want.defined && !testing::close_relative(got.value, want.value, kMetricRelTol))) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "trial " << trial << " " << metric_name(kind) << (avg ? " class " + std::to_string(*avg) : "")
                << ": " << got.value << " vs " << want.value;
            out.fail(msg.str());
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= kOracleBudgetS) out.fail("runtime " + std::to_string(elapsed) + " s");
  std::ostringstream detail;
  detail << "1000 trials, " << comparisons << " comparisons, " << elapsed << " s";
  return detail.str();
}

// ---------------------------------------------------------------------------

std::string set_algebra(Outcome& out) {
  Rng rng(777);
  // a pool of datasets for the relationship partition through SelectionState
  std::vector<std::unique_ptr<ExperimentDataset>> pool;
  for (int k = 0; k < 16; ++k) {
    testing::RandomSpec spec;
    spec.max_n = 300;
    pool.push_back(std::make_unique<ExperimentDataset>(testing::random_columns(rng, spec)));
  }
  const auto start = Clock::now();
  for (int trial = 0; trial < 10000; ++trial) {
    const auto& ds = *pool[trial % pool.size()];
    const auto n = ds.size();
    const auto A = testing::random_set(rng, n);
    const auto B = testing::random_set(rng, n);
    const auto C = testing::random_set(rng, n);
    const auto U = InstanceSet::full(n);
    auto check = [&](bool holds, const char* law) {
      if (!holds) out.fail("trial " + std::to_string(trial) + ": " + law);
    };
    check((A | B) == (B | A), "union commutes");
    check((A & B) == (B & A), "intersection commutes");
    check((A ^ B) == (B ^ A), "symmetric difference commutes");
    check(((A | B) | C) == (A | (B | C)), "union associates");
    check(((A & B) & C) == (A & (B & C)), "intersection associates");
    check(((A ^ B) ^ C) == (A ^ (B ^ C)), "symmetric difference associates");
    check((U - (A | B)) == ((U - A) & (U - B)), "De Morgan (union)");
    check((U - (A & B)) == ((U - A) | (U - B)), "De Morgan (intersection)");
    check((A ^ B) == ((A | B) - (A & B)), "A xor B = (A or B) minus (A and B)");

    const auto ma = members(A), mb = members(B);
    std::size_t naive_union = 0, naive_inter = 0;
    for (std::size_t i = 0; i < n; ++i) {
      naive_union += (ma[i] || mb[i]) ? 1 : 0;
      naive_inter += (ma[i] && mb[i]) ? 1 : 0;
    }
    check((A | B).count() == naive_union && A.intersection_count(B) == naive_inter, "counts match a naive scan");

    SelectionState state(ds);
    state.set_scope(random_scope(rng));
    state.set_selection(Slot::First, Query::instance_ids(A.to_vector()));
    state.set_selection(Slot::Second, Query::instance_ids(B.to_vector()));
    const auto rel = state.relationship();
    const auto& S = state.scope_universe();
    check(rel.only_first.count + rel.both.count + rel.only_second.count + rel.neither.count == S.count(),
          "relationship regions partition the scope");
    check(rel.both.count == (A & B & S).count() && rel.only_first.count == ((A - B) & S).count() &&
              rel.only_second.count == ((B - A) & S).count(),
          "relationship region counts");
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= kSetAlgebraBudgetS) out.fail("runtime " + std::to_string(elapsed) + " s");
  std::ostringstream detail;
  detail << "10000 triples, " << elapsed << " s";
  return detail.str();
}

// ---------------------------------------------------------------------------

struct ViewCheck {
  const SelectionState& state;
  Outcome& out;
  int trial;
  double threshold;
  std::size_t boxes = 0;

  void fail(const std::string& view, const std::string& what) {
    out.fail("trial " + std::to_string(trial) + " " + view + ": " + what);
  }

  /// Recomputes every box from its query text.
  void boxes_agree(const json& payload) {
    const auto& ds = state.dataset();
    const auto& S = state.scope_universe();
    const auto view = payload["view"].get<std::string>();
    for (const auto& group : payload["groups"]) {
      const auto total = group["total"].get<std::uint64_t>();
      for (const auto& box : group["boxes"]) {
        ++boxes;
        const auto text = box["query_text"].get<std::string>();
        const auto set = evaluate(parse_query(text), ds, S) & S;
        const auto count = box["count"].get<std::uint64_t>();
        if (set.count() != count) fail(view, "box '" + text + "' count differs from its query");
        for (const auto slot : {Slot::First, Slot::Second}) {
          const auto& sel = state.slot(slot);
          const auto key = slot == Slot::First ? "overlap_first" : "overlap_second";
          const auto overlap = box[key].get<std::uint64_t>();
          const std::uint64_t want = sel ? set.intersection_count(sel->set) : 0;
          const std::uint64_t sel_size = sel ? sel->set.count() : 0;
          if (overlap != want) fail(view, std::string(key) + " of '" + text + "'");
          if (overlap > std::min(count, sel_size)) fail(view, "overlap exceeds min(count, |selection|)");
        }
        if (box["small_flag"].get<bool>() != is_small(count, total, threshold)) fail(view, "small flag");
      }
    }
  }

  static std::uint64_t box_sum(const json& group) {
    std::uint64_t sum = 0;
    for (const auto& b : group["boxes"]) sum += b["count"].get<std::uint64_t>();
    return sum;
  }
};

std::string view_invariants(Outcome& out) {
  Rng rng(4242);
  std::size_t boxes = 0;
  std::size_t payloads = 0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 500; ++trial) {
    testing::RandomSpec spec;
    spec.allow_gold = true;
    const ExperimentDataset ds(testing::random_columns(rng, spec));
    SelectionState state(ds);
    state.set_scope(random_scope(rng));
    if (testing::uniform_real(rng) < 0.8) state.set_selection(Slot::First, testing::random_query(rng, ds, 3));
    if (testing::uniform_real(rng) < 0.6) state.set_selection(Slot::Second, testing::random_query(rng, ds, 3));
    const double threshold = testing::uniform_real(rng) * 0.3;
    ViewCheck check{state, out, trial, threshold};
    const auto scope_size = state.scope_universe().count();
    const auto comparison = ds.comparison_classifiers();
    const auto& labels = ds.labels().names();

    auto run = [&](const std::string& kind, ViewParams params) {
      params["small_threshold"] = std::to_string(threshold);
      auto payload = to_json(compute_view(state, 0, kind, params));
      ++payloads;
      check.boxes_agree(payload);
      return payload;
    };
    auto partition = [&](const std::string& view, const json& payload, bool whole_scope) {
      for (const auto& g : payload["groups"]) {
        if (g["boxes"].empty()) continue;
        const auto sum = ViewCheck::box_sum(g);
        if (sum != g["total"].get<std::uint64_t>()) check.fail(view, "stack does not sum to its total");
        if (whole_scope && sum != scope_size) check.fail(view, "stack does not sum to |scope|");
      }
    };

    for (const auto* m : {"accuracy", "error_rate"}) {
      partition("classifier_performance", run("classifier_performance", {{"metric", m}}), true);
    }
    const auto& label = labels[testing::uniform(rng, 0, labels.size() - 1)];
    for (const auto* m : {"precision", "recall"}) {
      partition("classifier_performance", run("classifier_performance", {{"metric", m}, {"label", label}}), false);
    }
    run("classifier_performance", {{"metric", "mcc"}});
    for (const auto* m : {"recall", "precision", "accuracy", "error_rate"}) {
      partition("per_class", run("per_class", {{"metric", m}}), false);
    }

    std::vector<std::string> sources{"actual"};
    for (std::size_t f = 0; f < ds.feature_count(); ++f) sources.push_back(ds.feature(f).schema.name);
    for (const auto c : comparison) sources.push_back("pred(" + ds.classifiers().name(c) + ")");
    for (const auto& source : sources) {
      const auto h = run("histogram", {{"feature", source}});
      const auto& g = h["groups"][0];
      std::uint64_t accounted = ViewCheck::box_sum(g) + h["missing"].get<std::uint64_t>();
      if (h.contains("outside")) accounted += h["outside"].get<std::uint64_t>();
      if (accounted != scope_size) check.fail("histogram", source + " bins do not account for |scope|");
    }

    const auto cum = run("cumulative", {});
    if (ViewCheck::box_sum(cum["groups"][0]) != scope_size) check.fail("cumulative", "boxes do not sum to |scope|");
    if (cum["groups"][0]["boxes"].size() != comparison.size() + 1) check.fail("cumulative", "expected m+1 boxes");
    const auto& pareto = cum["pareto"];
    if (scope_size > 0) {
      for (std::size_t k = 1; k < pareto.size(); ++k) {
        if (pareto[k].get<double>() < pareto[k - 1].get<double>()) check.fail("cumulative", "pareto not monotone");
      }
      if (pareto.empty() || pareto.back().get<double>() != 1.0) check.fail("cumulative", "pareto does not end at 1");
    }

    partition("confusion", run("confusion", {}), true);

    if (comparison.size() >= 2) {
      const auto cons = run("consensus", {});
      const auto m = comparison.size();
      const auto& groups = cons["groups"];
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          const auto& ab = groups[a * m + b];
          const auto& ba = groups[b * m + a];
          for (std::size_t k = 0; k < ab["boxes"].size(); ++k) {
            if (ab["boxes"][k]["count"] != ba["boxes"][k]["count"]) check.fail("consensus", "asymmetric");
          }
          if (ab["agree"] != ba["agree"]) check.fail("consensus", "agreement asymmetric");
          if (a == b && (ab["agree"].get<std::uint64_t>() != scope_size || ViewCheck::box_sum(ab) != scope_size)) {
            check.fail("consensus", "diagonal differs from |scope|");
          }
          if (ViewCheck::box_sum(ab) > ab["agree"].get<std::uint64_t>()) check.fail("consensus", "boxes exceed agreement");
        }
      }
    }

    run("metrics", {});
    run("parallel_metrics", {});
    run("selection", {});
    if (state.first() || state.second()) {
      run("selection_performance", {});
      const auto inst = run("instances", {{"limit", "10000"}});
      InstanceSet rows(ds.size());
      if (state.first()) rows |= state.first()->set;
      if (state.second()) rows |= state.second()->set;
      rows &= state.scope_universe();
      if (inst["total_count"].get<std::uint64_t>() != rows.count()) check.fail("instances", "total_count");
      for (const auto& r : inst["rows"]) {
        const auto i = r["index"].get<InstanceIndex>();
        const bool in_first = state.first() && state.first()->set.contains(i);
        const bool in_second = state.second() && state.second()->set.contains(i);
        if (r["in_first"] != in_first || r["in_second"] != in_second) check.fail("instances", "membership flags");
      }
    }
    boxes += check.boxes;
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= kViewBudgetS) out.fail("runtime " + std::to_string(elapsed) + " s");
  std::ostringstream detail;
  detail << "500 trials, " << payloads << " payloads, " << boxes << " boxes recomputed, " << elapsed << " s";
  return detail.str();
}

// ---------------------------------------------------------------------------

std::string fixture_golden(Outcome& out) {
  const auto manifest = testing::quote(testing::fixture6_manifest());
  const auto golden_dir = testing::source_dir() / "tests/golden";
  auto run_json = [&](const std::string& args) {
    const auto r = testing::run_cli("--dataset " + manifest + " " + args);
    if (r.status != 0) out.fail("boxer " + args + " exited " + std::to_string(r.status) + ": " + r.err);
    std::vector<json> docs;
    std::istringstream lines(r.out);
    for (std::string line; std::getline(lines, line);) docs.push_back(json::parse(line, nullptr, false));
    return docs;
  };
  auto expect = [&](bool holds, const std::string& what) {
    if (!holds) out.fail(what);
  };

  const auto perf = run_json("view classifier_performance");
  const auto metrics = run_json("view metrics");
  const auto cum = run_json("view cumulative");
  const auto cons = run_json("view consensus");
  const auto rel = run_json("--first \"correct(c1)\" --second \"correct(c2)\" view selection");
  const auto script = run_json("script " + testing::quote(golden_dir / "fixture6.script"));
  if (!out.ok()) return "cli failed";

  const auto& rows = metrics.at(0)["rows"];
  expect(rows[0]["metrics"]["accuracy"] == 4.0 / 6.0, "c1 accuracy 4/6");
  expect(rows[1]["metrics"]["accuracy"] == 5.0 / 6.0, "c2 accuracy 5/6");
  const auto& bars = perf.at(0)["groups"];
  expect(bars[0]["boxes"][0]["count"] == 4 && bars[0]["total"] == 6, "c1 correct box 4 of 6");
  expect(bars[1]["boxes"][0]["count"] == 5 && bars[1]["total"] == 6, "c2 correct box 5 of 6");
  const auto& cboxes = cum.at(0)["groups"][0]["boxes"];
  expect(cboxes.size() == 3 && cboxes[0]["count"] == 0 && cboxes[1]["count"] == 3 && cboxes[2]["count"] == 3,
         "cumulative 0/3/3");
  expect(cons.at(0)["groups"][1]["label"] == "c1|c2" && cons.at(0)["groups"][1]["boxes"][0]["count"] == 3,
         "consensus agree-correct 3");
  const auto& r = rel.at(0)["relationship"];
  expect(r["only_first"]["count"] == 1 && r["both"]["count"] == 3 && r["only_second"]["count"] == 2 &&
             r["neither"]["count"] == 0,
         "relationship 1/3/2/0");
  const double f1 = rows[0]["metrics"]["f1"].get<double>();
  expect(testing::close_relative(f1, 59.0 / 90.0, kMetricRelTol) && std::round(f1 * 1e4) == 6556.0,
         "c1 macro F1 = 59/90 ~ 0.6556");
  const auto& sp = script.at(0);
  expect(sp["view"] == "selection_performance" && sp["rows"][1]["classifier"] == "c2" &&
             sp["rows"][1]["first"]["value"] == 1.0,
         "c2 accuracy 1.0 on c1's errors");

  // frozen golden bytes
  const std::pair<std::string, std::string> goldens[] = {
      {"view cumulative", "cumulative.json"},
      {"--format csv view metrics", "metrics.csv"},
      {"--first \"incorrect(c1)\" --format csv view selection_performance", "selection_performance.csv"},
      {"script " + testing::quote(golden_dir / "fixture6.script"), "fixture6.script.out"},
  };
  for (const auto& [args, file] : goldens) {
    const auto got = testing::run_cli("--dataset " + manifest + " " + args).out;
    expect(got == testing::slurp(golden_dir / file), "golden " + file + " differs");
  }
  return "8 values, 4 golden files";
}

// ---------------------------------------------------------------------------

std::string round_trip(Outcome& out) {
  Rng rng(99);
  std::size_t depth_sum = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    testing::RandomSpec spec;
    spec.allow_gold = true;
    const ExperimentDataset ds(testing::random_columns(rng, spec));
    const int depth = static_cast<int>(testing::uniform(rng, 0, 5));
    depth_sum += static_cast<std::size_t>(depth);
    const auto q = testing::random_query(rng, ds, depth);
    const auto scope = random_scope(rng);
    const auto text = describe(q);
    try {
      const auto back = parse_query(text);
      if (!(evaluate(back, ds, scope) == evaluate(q, ds, scope))) out.fail("evaluation differs for " + text);
      if (describe(back) != text) out.fail("describe is not a fixed point for " + text);
    } catch (const Error& e) {
      out.fail(text + ": " + e.what());
    }
  }
  return "1000 random queries, mean depth " + std::to_string(static_cast<double>(depth_sum) / 1000.0);
}

// ---------------------------------------------------------------------------

template <typename Fn>
double worst_ms(Fn&& fn) {
  double worst = 0.0;
  for (int k = 0; k < kOpRepeats; ++k) {
    const auto start = Clock::now();
    fn();
    worst = std::max(worst, std::chrono::duration<double, std::milli>(Clock::now() - start).count());
  }
  return worst;
}

std::string scalability(Outcome& out) {
  SynthParams p;
  p.instances = 100000;
  p.classifiers = 12;
  p.labels = 12;
  p.features = 30;
  p.seed = 1;
  const auto dir = testing::scratch_dir("boxer_acceptance_scale");
  write_synth(dir, p);

  const auto load_start = Clock::now();
  const auto ds = load_dataset(dir / "manifest.json");
  const double load_s = seconds_since(load_start);
  if (load_s >= kLoadBudgetS) out.fail("load took " + std::to_string(load_s) + " s");

  SelectionState state(ds);
  double slowest = 0.0;
  std::string slowest_name;
  auto timed = [&](const std::string& name, auto&& fn) {
    const double ms = worst_ms(fn);
    if (ms > slowest) {
      slowest = ms;
      slowest_name = name;
    }
    if (ms >= kOpBudgetMs) out.fail(name + " took " + std::to_string(ms) + " ms");
  };

  std::vector<InstanceIndex> some_ids;
  for (InstanceIndex i = 0; i < 100000; i += 997) some_ids.push_back(i);
  const std::vector<Query> atoms = {
      Query::correct("clf03"),          Query::incorrect("clf07"),
      Query::predicted("clf05", "L07"), Query::actual("L03"),
      Query::feature_range("x00", 10.0, 60.0), Query::feature_range("x19", 0.0, 100.0, true),
      Query::feature_equals("g25", "k2"), Query::cumulative_count(6),
      Query::scope(Scope::Test),        Query::instance_ids(some_ids),
      Query::empty(),
  };
  for (const auto& a : atoms) timed("select " + describe(a), [&] { state.set_selection(Slot::First, a); });

  const SetOp ops[] = {SetOp::Union, SetOp::Intersection, SetOp::Difference, SetOp::SymmetricDifference};
  for (const auto op : ops) {
    const auto q = Query::combine(op, Query::correct("clf00"), Query::feature_range("x04", 20.0, 80.0));
    timed("select " + describe(q), [&] { state.set_selection(Slot::Second, q); });
  }
  timed("select NOT correct(clf00)", [&] { state.set_selection(Slot::Second, Query::negate(Query::correct("clf00"))); });
  state.set_selection(Slot::First, Query::incorrect("clf01"));
  state.set_selection(Slot::Second, Query::predicted("clf02", "L04") || Query::actual("L04"));
  for (const auto region : {Region::Both, Region::Either, Region::OnlyFirst, Region::OnlySecond, Region::Neither,
                            Region::Exclusive}) {
    // select_region reads both slots, so restore the first slot before each timed run
    const auto first = state.first()->query;
    timed("combine " + std::string(region_name(region)), [&] {
      state.set_selection(Slot::First, first);
      state.select_region(region, Slot::First);
    });
    state.set_selection(Slot::First, first);
  }

  state.set_selection(Slot::First, Query::incorrect("clf00"));
  state.set_selection(Slot::Second, Query::feature_range("x01", 0.0, 50.0));
  std::vector<std::pair<std::string, ViewParams>> views = {
      {"classifier_performance", {}},
      {"classifier_performance", {{"metric", "precision"}, {"label", "L05"}, {"sort", "value"}}},
      {"classifier_performance", {{"metric", "mcc"}}},
      {"histogram", {{"feature", "x00"}, {"bins", "20"}, {"normalize", "true"}}},
      {"histogram", {{"feature", "g29"}, {"sort", "count"}}},
      {"histogram", {{"feature", "actual"}}},
      {"histogram", {{"feature", "pred(clf11)"}}},
      {"cumulative", {}},
      {"confusion", {}},
      {"consensus", {}},
      {"selection_performance", {{"metric", "f1"}}},
      {"per_class", {{"metric", "recall"}}},
      {"metrics", {}},
      {"parallel_metrics", {{"order_by", "mcc"}}},
      {"instances", {{"sort", "x02"}, {"order", "desc"}, {"limit", "100"}}},
      {"selection", {}},
  };
  for (const auto scope : {Scope::All, Scope::Test}) {
    state.set_scope(scope);
    for (const auto& [kind, params] : views) {
      timed("view " + kind + " (" + std::string(scope_name(scope)) + ")",
            [&] { to_text(to_json(compute_view(state, 1, kind, params))); });
    }
  }
  std::filesystem::remove_all(dir);

  std::ostringstream detail;
  detail.precision(3);
  detail << "load " << load_s << " s; slowest op " << slowest_name << " " << slowest << " ms (worst of "
         << kOpRepeats << ")";
  return detail.str();
}

// ---------------------------------------------------------------------------

std::string parity(Outcome& out) {
  SynthParams p;
  p.instances = 4000;
  p.classifiers = 4;
  p.labels = 4;
  p.features = 4;
  p.seed = 11;
  const auto dir = testing::scratch_dir("boxer_acceptance_parity");
  write_synth(dir, p);
  const auto manifest = dir / "manifest.json";
  const std::string script =
      "set first incorrect(clf0)\n"
      "emit selection_performance\n"
      "set second pred(clf1)=L1 OR x0 in [10,50)\n"
      "emit selection\n"
      "combine both second\n"
      "emit classifier_performance metric=recall label=L0\n"
      "scope test\n"
      "emit histogram feature=x0 bins=5 normalize=true\n"
      "emit instances limit=20 sort=x0 order=desc filter=\"actual=L2 OR g3=k1\"\n"
      "emit consensus\n";
  const auto script_path = dir / "parity.script";
  std::ofstream(script_path, std::ios::binary) << script;

  const auto cli = testing::run_cli("--dataset " + testing::quote(manifest) + " script " + testing::quote(script_path));
  if (cli.status != 0) out.fail("cli exited " + std::to_string(cli.status) + ": " + cli.err);
  std::vector<std::string> cli_payloads;
  std::istringstream lines(cli.out);
  for (std::string line; std::getline(lines, line);) cli_payloads.push_back(line);

  SessionManager manager;
  HttpService service(manager);
  const int port = service.bind("127.0.0.1", 0);
  if (port <= 0) {
    out.fail("cannot bind a port");
    return "no server";
  }
  std::thread server([&] { service.listen(); });
  httplib::Client client("127.0.0.1", port);
  std::vector<std::string> http_payloads;
  try {
    auto res = client.Post("/v1/datasets", json{{"manifest_path", manifest.string()}}.dump(), "application/json");
    if (!res || res->status != 200) throw std::runtime_error("dataset upload failed");
    const auto dataset_id = json::parse(res->body)["dataset_id"].get<std::string>();
    res = client.Post("/v1/sessions", json{{"dataset_id", dataset_id}}.dump(), "application/json");
    if (!res || res->status != 200) throw std::runtime_error("session creation failed");
    const auto base = "/v1/sessions/" + json::parse(res->body)["session_id"].get<std::string>();
    for (const auto& step : parse_script(script)) {
      if (step.emit) {
        const httplib::Params params(step.params.begin(), step.params.end());
        const auto path = step.view == "instances" ? base + "/instances" : base + "/views/" + step.view;
        res = client.Get(path, params, httplib::Headers{});
        if (!res || res->status != 200) throw std::runtime_error("view " + step.view + " failed");
        http_payloads.push_back(res->body);
      } else {
        res = client.Post(base + "/selection", step.action.dump(), "application/json");
        if (!res || res->status != 200) throw std::runtime_error("mutation failed at line " + std::to_string(step.line));
      }
    }
  } catch (const std::exception& e) {
    out.fail(e.what());
  }
  service.stop();
  server.join();
  std::filesystem::remove_all(dir);

  if (cli_payloads.size() != http_payloads.size()) {
    out.fail("payload counts differ: " + std::to_string(cli_payloads.size()) + " vs " +
             std::to_string(http_payloads.size()));
  }
  std::size_t bytes = 0;
  for (std::size_t k = 0; k < std::min(cli_payloads.size(), http_payloads.size()); ++k) {
    bytes += cli_payloads[k].size();
    if (cli_payloads[k] != http_payloads[k]) out.fail("payload " + std::to_string(k + 1) + " differs");
  }
  return "10 steps, " + std::to_string(http_payloads.size()) + " payloads, " + std::to_string(bytes) + " bytes";
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<std::string(Outcome&)>> criteria[] = {
      {"metric-oracle-equivalence", metric_oracle},
      {"set-algebra-properties", set_algebra},
      {"view-invariants", view_invariants},
      {"fixture6-golden", fixture_golden},
      {"query-round-trip", round_trip},
      {"scalability-100k", scalability},
      {"cli-service-parity", parity},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome outcome;
    std::string detail;
    try {
      detail = fn(outcome);
    } catch (const std::exception& e) {
      outcome.fail(std::string("exception: ") + e.what());
    }
    std::cout << (outcome.ok() ? "PASS " : "FAIL ") << name << " (" << detail << ")";
    if (!outcome.ok()) {
      std::cout << " " << outcome.failures() << " failure(s):" << outcome.notes();
      ++failed;
    }
    std::cout << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
