// Manifest (JSON) and CSV loading for ExperimentDataset.

#include <charconv>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "boxer/dataset.hpp"
#include "boxer/error.hpp"
#include "csv.hpp"

namespace boxer {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& message, const std::string& path) {
  throw Error(ErrorCode::SchemaViolation, message, path);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) schema_error(std::string("missing required field '") + key + "'", path + "." + key);
  return *it;
}

std::vector<std::string> string_array(const json& value, const std::string& path) {
  if (!value.is_array()) schema_error("expected an array of strings", path);
  std::vector<std::string> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_string()) schema_error("expected a string", path + "[" + std::to_string(i) + "]");
    out.push_back(value[i].get<std::string>());
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

inline const std::string& resolve_path(const std::string& path) { return path; }

template <typename Fn>
  requires std::is_invocable_r_v<std::string, Fn>
std::string resolve_path(const Fn& fn) {
  return fn();
}

/// Label and category interning with a field path for error reporting.
class ColumnDecoder {
 public:
  ColumnDecoder(const Vocabulary& labels, bool gold_mode) : labels_(labels), gold_mode_(gold_mode) {}

  /// `path` is a string or a callable producing one; it is only built on failure.
  template <typename Path>
  LabelId label(std::string_view cell, const Path& path) const {
    if (const auto id = labels_.find(cell)) return static_cast<LabelId>(*id);
    throw Error(ErrorCode::LabelOutOfVocabulary, "label '" + std::string(cell) + "' is not in the label vocabulary",
                resolve_path(path));
  }

  bool gold_mode() const { return gold_mode_; }

 private:
  const Vocabulary& labels_;
  bool gold_mode_;
};

template <typename Path>
Split parse_split(std::string_view cell, const Path& path) {
  if (cell == "train") return Split::Train;
  if (cell == "test") return Split::Test;
  schema_error("split must be 'train' or 'test', got '" + std::string(cell) + "'", resolve_path(path));
}

template <typename Path>
void set_feature_cell(FeatureColumn& col, std::size_t row, std::string_view cell, bool is_missing,
                      const Path& path) {
  if (is_missing) {
    col.missing[row] = 1;
    return;
  }
  if (col.continuous()) {
    double v = 0.0;
    if (!parse_double(cell, v)) {
      schema_error("'" + std::string(cell) + "' is not a decimal number", resolve_path(path));
    }
    col.values[row] = v;
  } else {
    const auto code = col.categories.find(cell);
    if (!code) {
      throw Error(ErrorCode::SchemaViolation,
                  "'" + std::string(cell) + "' is not a category of feature '" + col.schema.name + "'",
                  resolve_path(path));
    }
    col.codes[row] = static_cast<std::uint32_t>(*code);
  }
}

void size_feature(FeatureColumn& col, std::size_t n) {
  if (col.continuous()) {
    col.values.assign(n, 0.0);
  } else {
    col.codes.assign(n, 0);
  }
  col.missing.assign(n, 0);
}

void load_csv(DatasetColumns& out, const std::filesystem::path& csv_path, const ColumnDecoder& decode) {
  const auto buffer = read_file(csv_path);
  const auto file = csv_path.filename().string();
  csv::Reader reader(buffer);
  std::vector<std::string> header;
  if (!reader.next(header)) schema_error("CSV file is empty", file);
  for (auto& h : header) {
    while (!h.empty() && h.front() == ' ') h.erase(h.begin());
    while (!h.empty() && h.back() == ' ') h.pop_back();
  }

  auto column_of = [&](const std::string& name) -> std::size_t {
    std::size_t found = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) {
        if (found != header.size()) schema_error("duplicate CSV column '" + name + "'", file + ":1");
        found = i;
      }
    }
    if (found == header.size()) schema_error("CSV header lacks column '" + name + "'", file + ":1");
    return found;
  };

  const auto id_col = column_of("id");
  const auto split_col = column_of("split");
  const auto actual_col = column_of("actual");
  std::vector<std::size_t> feature_cols;
  for (const auto& f : out.features) feature_cols.push_back(column_of(f.schema.name));
  std::vector<std::size_t> classifier_cols;
  for (const auto& c : out.classifiers) classifier_cols.push_back(column_of(c));
  if (const auto expected = 3 + feature_cols.size() + classifier_cols.size(); expected != header.size()) {
    schema_error("CSV header has " + std::to_string(header.size()) + " columns, manifest describes " +
                     std::to_string(expected),
                 file + ":1");
  }

  for (auto& f : out.features) size_feature(f, 0);
  out.predictions.assign(out.classifiers.size(), {});

  std::vector<std::string> row;
  while (reader.next(row)) {
    const auto where = [&](std::size_t col) {
      return [&, col] { return file + ":" + std::to_string(reader.line()) + "." + header[col]; };
    };
    if (row.size() != header.size()) {
      throw Error(ErrorCode::LengthMismatch,
                  "row has " + std::to_string(row.size()) + " cells, header has " + std::to_string(header.size()),
                  file + ":" + std::to_string(reader.line()));
    }
    const std::size_t r = out.instance_ids.size();
    out.instance_ids.push_back(row[id_col]);
    out.split.push_back(parse_split(row[split_col], where(split_col)));
    out.actual.push_back(decode.gold_mode() ? 0 : decode.label(row[actual_col], where(actual_col)));
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      auto& col = out.features[f];
      if (col.continuous()) {
        col.values.push_back(0.0);
      } else {
        col.codes.push_back(0);
      }
      col.missing.push_back(0);
      const auto& cell = row[feature_cols[f]];
      set_feature_cell(col, r, cell, cell.empty(), where(feature_cols[f]));
    }
    for (std::size_t c = 0; c < classifier_cols.size(); ++c) {
      out.predictions[c].push_back(decode.label(row[classifier_cols[c]], where(classifier_cols[c])));
    }
  }
}

void load_inline(DatasetColumns& out, const json& data, const ColumnDecoder& decode) {
  const auto& ids = require(data, "id", "data");
  if (!ids.is_array()) schema_error("expected an array", "data.id");
  const std::size_t n = ids.size();
  out.instance_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = ids[i];
    if (v.is_string()) {
      out.instance_ids.push_back(v.get<std::string>());
    } else if (v.is_number_integer()) {
      out.instance_ids.push_back(std::to_string(v.get<long long>()));
    } else {
      schema_error("instance id must be a string or integer", "data.id[" + std::to_string(i) + "]");
    }
  }

  const auto splits = string_array(require(data, "split", "data"), "data.split");
  for (std::size_t i = 0; i < splits.size(); ++i) {
    out.split.push_back(parse_split(splits[i], "data.split[" + std::to_string(i) + "]"));
  }

  if (!decode.gold_mode()) {
    const auto actual = string_array(require(data, "actual", "data"), "data.actual");
    for (std::size_t i = 0; i < actual.size(); ++i) {
      out.actual.push_back(decode.label(actual[i], "data.actual[" + std::to_string(i) + "]"));
    }
  }

  const json empty = json::object();
  const auto& feature_data = out.features.empty() ? (data.contains("features") ? data["features"] : empty)
                                                  : require(data, "features", "data");
  if (!feature_data.is_object()) schema_error("expected an object keyed by feature name", "data.features");
  for (auto& col : out.features) {
    const auto path = "data.features." + col.schema.name;
    const auto it = feature_data.find(col.schema.name);
    if (it == feature_data.end()) schema_error("missing values for feature '" + col.schema.name + "'", path);
    if (!it->is_array()) schema_error("expected an array", path);
    if (it->size() != n) {
      throw Error(ErrorCode::LengthMismatch, "feature '" + col.schema.name + "' has " +
                                                 std::to_string(it->size()) + " values, expected " +
                                                 std::to_string(n),
                  path);
    }
    size_feature(col, n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = (*it)[i];
      const auto cell_path = path + "[" + std::to_string(i) + "]";
      if (v.is_null()) {
        set_feature_cell(col, i, {}, true, cell_path);
      } else if (col.continuous()) {
        if (!v.is_number()) schema_error("expected a number or null", cell_path);
        col.values[i] = v.get<double>();
      } else {
        if (!v.is_string()) schema_error("expected a category name or null", cell_path);
        set_feature_cell(col, i, v.get<std::string>(), false, cell_path);
      }
    }
  }

  const auto& preds = require(data, "predictions", "data");
  if (!preds.is_object()) schema_error("expected an object keyed by classifier name", "data.predictions");
  for (const auto& name : out.classifiers) {
    const auto path = "data.predictions." + name;
    const auto it = preds.find(name);
    if (it == preds.end()) schema_error("missing predictions for classifier '" + name + "'", path);
    const auto cells = string_array(*it, path);
    std::vector<LabelId> column;
    column.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      column.push_back(decode.label(cells[i], path + "[" + std::to_string(i) + "]"));
    }
    out.predictions.push_back(std::move(column));
  }
}

}  // namespace

ExperimentDataset load_dataset(const json& manifest, const std::filesystem::path& base_dir) {
  if (!manifest.is_object()) schema_error("manifest must be a JSON object", "$");
  DatasetColumns columns;
  columns.labels = string_array(require(manifest, "labels", "$"), "labels");
  columns.classifiers = string_array(require(manifest, "classifiers", "$"), "classifiers");
  if (const auto it = manifest.find("gold_standard"); it != manifest.end() && !it->is_null()) {
    if (!it->is_string()) schema_error("expected a classifier name", "gold_standard");
    columns.gold_standard = it->get<std::string>();
  }

  const auto& features = require(manifest, "features", "$");
  if (!features.is_array()) schema_error("expected an array", "features");
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto path = "features[" + std::to_string(f) + "]";
    const auto& spec = features[f];
    if (!spec.is_object()) schema_error("expected an object", path);
    FeatureColumn col;
    const auto& name = require(spec, "name", path);
    if (!name.is_string()) schema_error("expected a string", path + ".name");
    col.schema.name = name.get<std::string>();
    const auto& kind = require(spec, "kind", path);
    if (kind == "continuous") {
      col.schema.kind = FeatureKind::Continuous;
    } else if (kind == "categorical") {
      col.schema.kind = FeatureKind::Categorical;
    } else {
      schema_error("kind must be 'continuous' or 'categorical'", path + ".kind");
    }
    if (const auto it = spec.find("categories"); it != spec.end()) {
      col.schema.categories = string_array(*it, path + ".categories");
    }
    if (const auto it = spec.find("missing_allowed"); it != spec.end()) {
      if (!it->is_boolean()) schema_error("expected a boolean", path + ".missing_allowed");
      col.schema.missing_allowed = it->get<bool>();
    }
    if (col.schema.kind == FeatureKind::Categorical) {
      if (col.schema.categories.empty()) {
        schema_error("categorical feature lists no categories", path + ".categories");
      }
      col.categories = Vocabulary(col.schema.categories, path + ".categories");
    } else if (!col.schema.categories.empty()) {
      schema_error("continuous feature must not list categories", path + ".categories");
    }
    columns.features.push_back(std::move(col));
  }

  const Vocabulary labels(columns.labels, "labels");
  const ColumnDecoder decode(labels, columns.gold_standard.has_value());
  const auto& data = require(manifest, "data", "$");
  if (data.is_string()) {
    load_csv(columns, base_dir / data.get<std::string>(), decode);
  } else if (data.is_object() && data.contains("csv")) {
    if (!data["csv"].is_string()) schema_error("expected a file path", "data.csv");
    load_csv(columns, base_dir / data["csv"].get<std::string>(), decode);
  } else if (data.is_object()) {
    load_inline(columns, data, decode);
  } else {
    schema_error("data must be a CSV path or an object of inline columns", "data");
  }
  return ExperimentDataset(std::move(columns));
}

ExperimentDataset load_dataset(const std::filesystem::path& manifest_path) {
  const auto text = read_file(manifest_path);
  json manifest;
  try {
    manifest = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("manifest is not valid JSON: ") + e.what(),
                manifest_path.filename().string());
  }
  return load_dataset(manifest, manifest_path.parent_path());
}

}  // namespace boxer
