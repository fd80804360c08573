#include "boxer/session.hpp"

#include "boxer/error.hpp"
#include "boxer/query.hpp"

namespace boxer {

using nlohmann::json;

namespace {

std::string string_field(const json& action, const char* key) {
  const auto it = action.find(key);
  if (it == action.end()) throw Error(ErrorCode::InvalidParameter, std::string("missing field '") + key + "'", key);
  if (!it->is_string()) throw Error(ErrorCode::InvalidParameter, std::string("field '") + key + "' must be a string", key);
  return it->get<std::string>();
}

Slot slot_field(const json& action, std::optional<Slot> fallback) {
  if (!action.contains("slot") && fallback) return *fallback;
  const auto text = string_field(action, "slot");
  if (const auto slot = parse_slot(text)) return *slot;
  throw Error(ErrorCode::InvalidParameter, "slot must be 'first' or 'second', got '" + text + "'", "slot");
}

}  // namespace

void apply_action(SelectionState& state, const json& action) {
  if (!action.is_object()) throw Error(ErrorCode::InvalidParameter, "an action must be a JSON object", "action");
  const auto kind = string_field(action, "action");
  if (kind == "set") {
    const auto slot = slot_field(action, std::nullopt);
    const auto text = string_field(action, "query");
    state.set_selection(slot, parse_query(text));
  } else if (kind == "combine" || kind == "intersect") {
    Region region = Region::Both;
    if (kind == "combine") {
      const auto text = string_field(action, "region");
      const auto parsed = parse_region(text);
      if (!parsed) throw Error(ErrorCode::InvalidParameter, "unknown region '" + text + "'", "region");
      region = *parsed;
    }
    state.select_region(region, slot_field(action, Slot::First));
  } else if (kind == "recall") {
    const auto it = action.find("history_index");
    if (it == action.end() || !it->is_number_integer() || it->get<std::int64_t>() < 0) {
      throw Error(ErrorCode::InvalidParameter, "history_index must be a non-negative integer", "history_index");
    }
    state.recall_selection(it->get<std::size_t>(), slot_field(action, Slot::First));
  } else if (kind == "clear") {
    state.clear_selection(slot_field(action, std::nullopt));
  } else if (kind == "scope") {
    const auto text = string_field(action, "scope");
    const auto scope = parse_scope(text);
    if (!scope) throw Error(ErrorCode::InvalidParameter, "scope must be train, test or all", "scope");
    state.set_scope(*scope);
  } else {
    throw Error(ErrorCode::InvalidParameter, "unknown action '" + kind + "'", "action");
  }
}

json selection_summary(const SelectionState& state, std::uint64_t version) {
  auto summary = selection_view(state, version).meta;
  summary["selection_version"] = version;
  return summary;
}

Session::Session(std::string id, std::string dataset_id, std::shared_ptr<const ExperimentDataset> dataset)
    : id_(std::move(id)), dataset_id_(std::move(dataset_id)), dataset_(std::move(dataset)), state_(*dataset_) {}

std::uint64_t Session::version() const {
  std::shared_lock lock(mutex_);
  return version_;
}

json Session::mutate(const json& action) {
  std::unique_lock lock(mutex_);
  apply_action(state_, action);
  ++version_;
  return selection_summary(state_, version_);
}

json Session::summary() const {
  std::shared_lock lock(mutex_);
  return selection_summary(state_, version_);
}

ViewPayload Session::view(std::string_view kind, const ViewParams& params) const {
  std::shared_lock lock(mutex_);
  return compute_view(state_, version_, kind, params);
}

json to_json(const DatasetInfo& info) {
  const auto& ds = *info.dataset;
  json features = json::array();
  for (FeatureId f = 0; f < ds.feature_count(); ++f) {
    const auto& col = ds.feature(f);
    json jf = {{"name", col.schema.name}, {"kind", col.continuous() ? "continuous" : "categorical"}};
    if (!col.continuous()) jf["categories"] = col.categories.names();
    features.push_back(std::move(jf));
  }
  json comparison = json::array();
  for (const auto c : ds.comparison_classifiers()) comparison.push_back(ds.classifiers().name(c));
  return {{"dataset_id", info.id},
          {"source", info.source},
          {"size", ds.size()},
          {"labels", ds.labels().names()},
          {"classifiers", ds.classifiers().names()},
          {"comparison_classifiers", std::move(comparison)},
          {"gold_standard", ds.gold_standard() ? json(ds.classifiers().name(*ds.gold_standard())) : json(nullptr)},
          {"features", std::move(features)},
          {"warnings", info.warnings}};
}

SessionManager::SessionManager(std::chrono::seconds idle_timeout, std::function<Clock::time_point()> now)
    : idle_timeout_(idle_timeout), now_(std::move(now)) {}

const DatasetInfo& SessionManager::add_dataset(std::shared_ptr<const ExperimentDataset> dataset, std::string source,
                                               std::string id) {
  std::lock_guard lock(mutex_);
  if (id.empty()) {
    do {
      id = "d" + std::to_string(next_dataset_++);
    } while (datasets_.contains(id));
  } else if (datasets_.contains(id)) {
    throw Error(ErrorCode::InvalidParameter, "dataset id '" + id + "' is already loaded", "dataset_id");
  }
  DatasetInfo info{id, std::move(source), dataset, validate(*dataset).warnings};
  return datasets_.emplace(id, std::move(info)).first->second;
}

std::vector<DatasetInfo> SessionManager::datasets() const {
  std::lock_guard lock(mutex_);
  std::vector<DatasetInfo> out;
  for (const auto& [id, info] : datasets_) out.push_back(info);
  return out;
}

std::shared_ptr<Session> SessionManager::create_session(const std::string& dataset_id) {
  std::lock_guard lock(mutex_);
  const auto now = now_();
  expire_locked(now);
  const auto it = datasets_.find(dataset_id);
  if (it == datasets_.end()) {
    throw Error(ErrorCode::UnknownDataset, "unknown dataset '" + dataset_id + "'", "dataset_id");
  }
  auto id = "s" + std::to_string(next_session_++);
  auto session = std::make_shared<Session>(id, dataset_id, it->second.dataset);
  sessions_.emplace(id, Entry{session, now});
  return session;
}

std::shared_ptr<Session> SessionManager::session(const std::string& id) {
  std::lock_guard lock(mutex_);
  const auto now = now_();
  expire_locked(now);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "unknown session '" + id + "'", "session_id");
  it->second.last_used = now;
  return it->second.session;
}

std::size_t SessionManager::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void SessionManager::expire_locked(Clock::time_point now) {
  std::erase_if(sessions_, [&](const auto& item) { return now - item.second.last_used > idle_timeout_; });
}

}  // namespace boxer
