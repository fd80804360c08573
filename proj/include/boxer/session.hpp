#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "boxer/dataset.hpp"
#include "boxer/selection.hpp"
#include "boxer/views.hpp"
#include "json.hpp"

namespace boxer {

/// Applies one mutation action to `state`:
///   {"action": "set", "slot", "query"}, {"action": "combine", "region", "slot"?},
///   {"action": "intersect", "slot"?}, {"action": "recall", "history_index", "slot"?},
///   {"action": "clear", "slot"}, {"action": "scope", "scope"}.
/// Leaves `state` unchanged when it throws.
void apply_action(SelectionState& state, const nlohmann::json& action);

/// Slot descriptions and cardinalities, relationship counts and history, tagged with `version`.
nlohmann::json selection_summary(const SelectionState& state, std::uint64_t version);

/// One exploration over a shared dataset. Mutations are serialized; views
/// run concurrently against a consistent snapshot.
class Session {
 public:
  Session(std::string id, std::string dataset_id, std::shared_ptr<const ExperimentDataset> dataset);

  const std::string& id() const noexcept { return id_; }
  const std::string& dataset_id() const noexcept { return dataset_id_; }
  std::uint64_t version() const;

  /// Applies the action and bumps the version; returns the new summary.
  nlohmann::json mutate(const nlohmann::json& action);
  nlohmann::json summary() const;
  ViewPayload view(std::string_view kind, const ViewParams& params) const;

 private:
  std::string id_;
  std::string dataset_id_;
  std::shared_ptr<const ExperimentDataset> dataset_;
  mutable std::shared_mutex mutex_;
  SelectionState state_;
  std::uint64_t version_ = 0;
};

struct DatasetInfo {
  std::string id;
  std::string source;
  std::shared_ptr<const ExperimentDataset> dataset;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const DatasetInfo& info);

/// Registry of loaded datasets and live sessions, with idle expiry.
class SessionManager {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionManager(std::chrono::seconds idle_timeout = std::chrono::hours(1),
                          std::function<Clock::time_point()> now = Clock::now);

  /// Registers a dataset under `id` (or the next `d<N>`); an existing id is an InvalidParameter.
  const DatasetInfo& add_dataset(std::shared_ptr<const ExperimentDataset> dataset, std::string source,
                                 std::string id = {});
  std::vector<DatasetInfo> datasets() const;

  /// Throws UnknownDataset.
  std::shared_ptr<Session> create_session(const std::string& dataset_id);
  /// Throws UnknownSession for unknown or expired ids; refreshes the idle clock.
  std::shared_ptr<Session> session(const std::string& id);
  std::size_t session_count() const;

 private:
  void expire_locked(Clock::time_point now);

  struct Entry {
    std::shared_ptr<Session> session;
    Clock::time_point last_used;
  };

  std::chrono::seconds idle_timeout_;
  std::function<Clock::time_point()> now_;
  mutable std::mutex mutex_;
  std::map<std::string, DatasetInfo> datasets_;
  std::map<std::string, Entry> sessions_;
  std::uint64_t next_dataset_ = 1;
  std::uint64_t next_session_ = 1;
};

}  // namespace boxer
