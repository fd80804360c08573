#include "boxer/selection.hpp"

#include "boxer/error.hpp"

namespace boxer {

std::string_view slot_name(Slot slot) { return slot == Slot::First ? "first" : "second"; }

std::optional<Slot> parse_slot(std::string_view text) {
  if (text == "first") return Slot::First;
  if (text == "second") return Slot::Second;
  return std::nullopt;
}

std::string_view region_name(Region region) {
  switch (region) {
    case Region::OnlyFirst: return "only_first";
    case Region::Both: return "both";
    case Region::OnlySecond: return "only_second";
    case Region::Neither: return "neither";
    case Region::Either: return "either";
    case Region::Exclusive: return "exclusive";
  }
  return "both";
}

std::optional<Region> parse_region(std::string_view text) {
  if (text == "only_first") return Region::OnlyFirst;
  if (text == "both") return Region::Both;
  if (text == "only_second") return Region::OnlySecond;
  if (text == "neither") return Region::Neither;
  if (text == "either") return Region::Either;
  if (text == "exclusive") return Region::Exclusive;
  return std::nullopt;
}

SelectionState::SelectionState(const ExperimentDataset& dataset, std::size_t history_cap)
    : dataset_(&dataset), history_cap_(history_cap), scope_universe_(scope_set(dataset, Scope::All)) {}

SelectionSlot SelectionState::make_slot(const Query& query) const {
  auto set = evaluate(query, *dataset_, scope_universe_);
  set &= scope_universe_;
  return SelectionSlot{query, std::move(set), describe(query)};
}

void SelectionState::install(Slot slot, std::optional<SelectionSlot> value) {
  auto& target = slot == Slot::First ? first_ : second_;
  if (target) {
    history_.push_back(std::move(*target));
    while (history_.size() > history_cap_) history_.pop_front();
  }
  target = std::move(value);
}

void SelectionState::set_selection(Slot slot, const Query& query) { install(slot, make_slot(query)); }

void SelectionState::recall_selection(std::size_t index, Slot slot) {
  if (index >= history_.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "history index " + std::to_string(index) + " out of range (history has " +
                                                std::to_string(history_.size()) + " entries)",
                "history_index");
  }
  auto fresh = make_slot(history_[index].query);
  history_.erase(history_.begin() + static_cast<std::ptrdiff_t>(index));
  install(slot, std::move(fresh));
}

void SelectionState::clear_selection(Slot slot) { install(slot, std::nullopt); }

void SelectionState::select_region(Region region, Slot target) { set_selection(target, region_query(region)); }

void SelectionState::set_scope(Scope scope) {
  scope_ = scope;
  scope_universe_ = scope_set(*dataset_, scope);
  if (first_) first_ = make_slot(first_->query);
  if (second_) second_ = make_slot(second_->query);
}

Query SelectionState::region_query(Region region) const {
  if (!first_ || !second_) {
    throw Error(ErrorCode::MissingSelection, "both selections must be set to combine them",
                !first_ ? "first" : "second");
  }
  const auto& a = first_->query;
  const auto& b = second_->query;
  switch (region) {
    case Region::OnlyFirst: return Query::combine(SetOp::Difference, a, b);
    case Region::Both: return Query::combine(SetOp::Intersection, a, b);
    case Region::OnlySecond: return Query::combine(SetOp::Difference, b, a);
    case Region::Neither: return Query::negate(Query::combine(SetOp::Union, a, b));
    case Region::Either: return Query::combine(SetOp::Union, a, b);
    case Region::Exclusive: return Query::combine(SetOp::SymmetricDifference, a, b);
  }
  return Query::empty();
}

RelationshipSummary SelectionState::relationship() const {
  auto only_first = region_query(Region::OnlyFirst);
  const auto& a = first_->set;
  const auto& b = second_->set;
  const auto both = a.intersection_count(b);
  RelationshipSummary out;
  out.only_first = {a.count() - both, std::move(only_first)};
  out.both = {both, region_query(Region::Both)};
  out.only_second = {b.count() - both, region_query(Region::OnlySecond)};
  out.neither = {scope_universe_.count() - (a | b).count(), region_query(Region::Neither)};
  return out;
}

}  // namespace boxer
