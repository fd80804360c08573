#include "boxer/synth.hpp"

#include <charconv>
#include <fstream>
#include <random>

#include "boxer/error.hpp"
#include "csv.hpp"
#include "json.hpp"

namespace boxer {

namespace {

/// Uniform double in [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Integer in [0, n); the modulo bias is negligible for the small n used here.
std::uint32_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::uint32_t>(rng() % n); }

std::string padded(const char* prefix, std::size_t i, std::size_t count) {
  auto digits = std::to_string(count > 0 ? count - 1 : 0).size();
  auto s = std::to_string(i);
  return prefix + std::string(digits - std::min(digits, s.size()), '0') + s;
}

double accuracy_of(const SynthParams& p, std::size_t c) {
  if (c < p.accuracy.size()) return p.accuracy[c];
  if (p.classifiers == 1) return 0.75;
  return 0.55 + 0.4 * static_cast<double>(c) / static_cast<double>(p.classifiers - 1);
}

std::size_t continuous_count(const SynthParams& p) { return (2 * p.features + 2) / 3; }

}  // namespace

DatasetColumns synth_columns(const SynthParams& p) {
  if (p.instances == 0) throw Error(ErrorCode::InvalidSize, "instances must be at least 1", "instances");
  if (p.classifiers == 0) throw Error(ErrorCode::InvalidSize, "classifiers must be at least 1", "classifiers");
  if (p.labels < 2) throw Error(ErrorCode::InvalidSize, "labels must be at least 2", "labels");
  if (p.categories == 0) throw Error(ErrorCode::InvalidSize, "categories must be at least 1", "categories");
  if (!(p.test_fraction >= 0.0 && p.test_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidSize, "test_fraction must lie in [0, 1]", "test_fraction");
  }
  if (p.accuracy.size() > p.classifiers) {
    throw Error(ErrorCode::InvalidSize, "more accuracy levels than classifiers", "accuracy");
  }
  for (std::size_t c = 0; c < p.accuracy.size(); ++c) {
    if (!(p.accuracy[c] >= 0.0 && p.accuracy[c] <= 1.0)) {
      throw Error(ErrorCode::InvalidSize, "accuracy levels must lie in [0, 1]", "accuracy[" + std::to_string(c) + "]");
    }
  }

  std::mt19937_64 rng(p.seed);
  const auto n = p.instances;
  DatasetColumns cols;
  for (std::size_t l = 0; l < p.labels; ++l) cols.labels.push_back(padded("L", l, p.labels));
  for (std::size_t c = 0; c < p.classifiers; ++c) cols.classifiers.push_back(padded("clf", c, p.classifiers));

  cols.instance_ids.reserve(n);
  cols.split.reserve(n);
  cols.actual.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cols.instance_ids.push_back(padded("i", i, n));
    cols.split.push_back(unit(rng) < p.test_fraction ? Split::Test : Split::Train);
    cols.actual.push_back(below(rng, p.labels));
  }

  std::vector<std::string> categories;
  for (std::size_t k = 0; k < p.categories; ++k) categories.push_back(padded("k", k, p.categories));
  const auto n_continuous = continuous_count(p);
  for (std::size_t f = 0; f < p.features; ++f) {
    const bool continuous = f < n_continuous;
    FeatureSchema schema{continuous ? padded("x", f, p.features) : padded("g", f, p.features),
                         continuous ? FeatureKind::Continuous : FeatureKind::Categorical,
                         continuous ? std::vector<std::string>{} : categories, false};
    FeatureColumn col{schema, Vocabulary(schema.categories, "categories"), {}, {}, {}};
    col.missing.assign(n, 0);
    if (continuous) {
      col.values.resize(n);
      // three decimals keep the CSV compact and exactly round-trippable
      for (auto& v : col.values) v = static_cast<double>(below(rng, 100000)) / 1000.0;
      col.codes.assign(n, 0);
    } else {
      col.values.assign(n, 0.0);
      col.codes.resize(n);
      for (auto& code : col.codes) code = below(rng, p.categories);
    }
    cols.features.push_back(std::move(col));
  }

  for (std::size_t c = 0; c < p.classifiers; ++c) {
    const double acc = accuracy_of(p, c);
    std::vector<LabelId> pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      const bool correct = unit(rng) < acc;
      if (correct) {
        pred[i] = cols.actual[i];
      } else {
        const auto other = below(rng, p.labels - 1);
        pred[i] = other >= cols.actual[i] ? other + 1 : other;
      }
    }
    cols.predictions.push_back(std::move(pred));
  }
  return cols;
}

void write_synth(const std::filesystem::path& directory, const SynthParams& params) {
  const auto cols = synth_columns(params);
  std::filesystem::create_directories(directory);

  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : cols.features) {
    nlohmann::json jf = {{"name", f.schema.name},
                         {"kind", f.schema.kind == FeatureKind::Continuous ? "continuous" : "categorical"},
                         {"missing_allowed", false}};
    if (f.schema.kind == FeatureKind::Categorical) jf["categories"] = f.schema.categories;
    features.push_back(std::move(jf));
  }
  const nlohmann::json manifest = {{"labels", cols.labels},
                                   {"classifiers", cols.classifiers},
                                   {"features", std::move(features)},
                                   {"data", "data.csv"}};
  {
    std::ofstream out(directory / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) throw Error(ErrorCode::MissingFile, "cannot write manifest", (directory / "manifest.json").string());
  }

  std::ofstream out(directory / "data.csv", std::ios::binary);
  out << "id,split,actual";
  for (const auto& f : cols.features) out << ',' << csv::escape(f.schema.name);
  for (const auto& c : cols.classifiers) out << ',' << csv::escape(c);
  out << '\n';
  std::string row;
  char num[32];
  for (std::size_t i = 0; i < cols.actual.size(); ++i) {
    row.clear();
    row += cols.instance_ids[i];
    row += cols.split[i] == Split::Train ? ",train," : ",test,";
    row += cols.labels[cols.actual[i]];
    for (const auto& f : cols.features) {
      row += ',';
      if (f.schema.kind == FeatureKind::Continuous) {
        const auto [ptr, ec] = std::to_chars(num, num + sizeof num, f.values[i]);
        row.append(num, ptr);
      } else {
        row += f.schema.categories[f.codes[i]];
      }
    }
    for (const auto& pred : cols.predictions) {
      row += ',';
      row += cols.labels[pred[i]];
    }
    row += '\n';
    out << row;
  }
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write data", (directory / "data.csv").string());
}

}  // namespace boxer
