#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>

#include "boxer/dataset.hpp"
#include "boxer/instance_set.hpp"
#include "boxer/query.hpp"

namespace boxer {

enum class Slot { First, Second };

std::string_view slot_name(Slot slot);
std::optional<Slot> parse_slot(std::string_view text);

/// An active selection: its query, the scoped set it evaluates to, and its text form.
struct SelectionSlot {
  Query query;
  InstanceSet set;
  std::string description;
};

/// Regions of the two-selection relationship widget.
enum class Region { OnlyFirst, Both, OnlySecond, Neither, Either, Exclusive };

std::string_view region_name(Region region);
std::optional<Region> parse_region(std::string_view text);

struct RegionSummary {
  std::size_t count = 0;
  Query query;
};

struct RelationshipSummary {
  RegionSummary only_first;
  RegionSummary both;
  RegionSummary only_second;
  RegionSummary neither;
};

inline constexpr std::size_t kDefaultHistoryCap = 50;

/**
 * The two active selection slots, the scope they are evaluated in, and the
 * history of displaced slots (oldest first, capped).
 *
 * Slot sets are always intersected with the scope universe, so relationship
 * regions partition the scope. Not safe for concurrent mutation.
 */
class SelectionState {
 public:
  explicit SelectionState(const ExperimentDataset& dataset, std::size_t history_cap = kDefaultHistoryCap);

  const ExperimentDataset& dataset() const noexcept { return *dataset_; }
  Scope scope() const noexcept { return scope_; }
  const InstanceSet& scope_universe() const noexcept { return scope_universe_; }
  const std::optional<SelectionSlot>& slot(Slot s) const noexcept { return s == Slot::First ? first_ : second_; }
  const std::optional<SelectionSlot>& first() const noexcept { return first_; }
  const std::optional<SelectionSlot>& second() const noexcept { return second_; }
  const std::deque<SelectionSlot>& history() const noexcept { return history_; }
  std::size_t history_cap() const noexcept { return history_cap_; }

  /// Evaluates `query` in the current scope and installs it; the displaced slot goes to history.
  void set_selection(Slot slot, const Query& query);

  /// Moves history entry `index` (0 = oldest) into `slot`, re-evaluated in
  /// the current scope. The displaced slot is appended to history.
  void recall_selection(std::size_t index, Slot slot);

  /// Empties `slot`; a populated slot is pushed to history.
  void clear_selection(Slot slot);

  /// Replaces `target` with the region query of the current two selections.
  void select_region(Region region, Slot target = Slot::First);

  /// Changes the scope and re-evaluates both active slots.
  void set_scope(Scope scope);

  /// Throws MissingSelection unless both slots are populated.
  RelationshipSummary relationship() const;

  /// Query for one relationship region; throws MissingSelection unless both slots are populated.
  Query region_query(Region region) const;

 private:
  SelectionSlot make_slot(const Query& query) const;
  void install(Slot slot, std::optional<SelectionSlot> value);

  const ExperimentDataset* dataset_;
  std::size_t history_cap_;
  Scope scope_ = Scope::All;
  InstanceSet scope_universe_;
  std::optional<SelectionSlot> first_;
  std::optional<SelectionSlot> second_;
  std::deque<SelectionSlot> history_;
};

}  // namespace boxer
