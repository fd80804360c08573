#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "boxer/dataset.hpp"
#include "boxer/instance_set.hpp"

namespace boxer {

class Query;

namespace ast {

struct Empty {};
struct Correct {
  std::string classifier;
};
struct Incorrect {
  std::string classifier;
};
struct Predicted {
  std::string classifier;
  std::string label;
};
struct Actual {
  std::string label;
};
/// lo <= v < hi, or lo <= v <= hi when right_closed (the last histogram bin).
struct FeatureRange {
  std::string feature;
  double lo = 0.0;
  double hi = 0.0;
  bool right_closed = false;
};
struct FeatureEquals {
  std::string feature;
  std::string category;
};
/// Instances that exactly `k` comparison classifiers label correctly.
struct CumulativeCount {
  std::size_t k = 0;
};
struct ScopeIs {
  Scope scope = Scope::All;
};
struct InstanceIds {
  std::vector<InstanceIndex> ids;
};
struct Combine {
  SetOp op = SetOp::Union;
  std::shared_ptr<const Query> left;
  std::shared_ptr<const Query> right;
};
struct Not {
  std::shared_ptr<const Query> operand;
};

}  // namespace ast

/// Immutable subset description. Nodes are shared, so copies are cheap.
class Query {
 public:
  using Node = std::variant<ast::Empty, ast::Correct, ast::Incorrect, ast::Predicted, ast::Actual,
                            ast::FeatureRange, ast::FeatureEquals, ast::CumulativeCount, ast::ScopeIs,
                            ast::InstanceIds, ast::Combine, ast::Not>;

  Query() : node_(ast::Empty{}) {}
  explicit Query(Node node) : node_(std::move(node)) {}

  const Node& node() const noexcept { return node_; }

  static Query empty() { return Query(); }
  static Query correct(std::string classifier) { return Query(ast::Correct{std::move(classifier)}); }
  static Query incorrect(std::string classifier) { return Query(ast::Incorrect{std::move(classifier)}); }
  static Query predicted(std::string classifier, std::string label) {
    return Query(ast::Predicted{std::move(classifier), std::move(label)});
  }
  static Query actual(std::string label) { return Query(ast::Actual{std::move(label)}); }
  static Query feature_range(std::string feature, double lo, double hi, bool right_closed = false) {
    return Query(ast::FeatureRange{std::move(feature), lo, hi, right_closed});
  }
  static Query feature_equals(std::string feature, std::string category) {
    return Query(ast::FeatureEquals{std::move(feature), std::move(category)});
  }
  static Query cumulative_count(std::size_t k) { return Query(ast::CumulativeCount{k}); }
  static Query scope(Scope s) { return Query(ast::ScopeIs{s}); }
  static Query instance_ids(std::vector<InstanceIndex> ids) { return Query(ast::InstanceIds{std::move(ids)}); }
  static Query combine(SetOp op, Query left, Query right) {
    return Query(ast::Combine{op, std::make_shared<const Query>(std::move(left)),
                              std::make_shared<const Query>(std::move(right))});
  }
  static Query negate(Query operand) { return Query(ast::Not{std::make_shared<const Query>(std::move(operand))}); }

 private:
  Node node_;
};

inline Query operator&&(Query a, Query b) { return Query::combine(SetOp::Intersection, std::move(a), std::move(b)); }
inline Query operator||(Query a, Query b) { return Query::combine(SetOp::Union, std::move(a), std::move(b)); }

/**
 * Canonical text form. Atoms:
 *
 *     correct(c)  incorrect(c)  pred(c)=L  actual=L  f in [lo,hi)  f in [lo,hi]
 *     f=cat  ncorrect=k  split=train|test|all  ids{0,4,9}
 *
 * combined with NOT, AND, DIFF, XOR, OR (binding in that order, tightest
 * first) and parentheses. Names that are empty, reserved words, or contain
 * whitespace or any of `()[]{}=,"\` are double-quoted with backslash escapes.
 * The empty query renders as `ids{}`.
 */
std::string describe(const Query& query);

/// Inverse of describe(); throws ParseError with the character offset in
/// detail_path. Names are not resolved here.
Query parse_query(std::string_view text);

/**
 * Instances satisfying `query`. NOT complements within the scope universe,
 * atoms match over the whole dataset; callers intersect with the scope when
 * they need a scoped subset. Throws UnknownClassifier, UnknownFeature,
 * UnknownLabel, UnknownCategory, InvalidQuery or UniverseMismatch.
 */
InstanceSet evaluate(const Query& query, const ExperimentDataset& dataset, Scope scope = Scope::All);

/// evaluate() given a precomputed scope universe.
InstanceSet evaluate(const Query& query, const ExperimentDataset& dataset, const InstanceSet& scope_universe);

/// Per-instance number of comparison classifiers that are correct.
std::vector<std::size_t> correct_counts(const ExperimentDataset& dataset);

}  // namespace boxer
