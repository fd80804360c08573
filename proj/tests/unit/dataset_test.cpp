#include "boxer/dataset.hpp"

#include <fstream>

#include "boxer/error.hpp"
#include "doctest.h"
#include "support/test_support.hpp"

using namespace boxer;
using nlohmann::json;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("boxer_dataset_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

json fixture_manifest() {
  return json::parse(R"({
    "labels": ["A", "B", "C"],
    "classifiers": ["c1", "c2"],
    "features": [{"name": "score", "kind": "continuous"},
                 {"name": "color", "kind": "categorical", "categories": ["red", "green", "blue"]}],
    "data": "data.csv"})");
}

const char* kFixtureCsv =
    "id,split,actual,score,color,c1,c2\n"
    "i0,train,A,0.1,red,A,A\n"
    "i1,train,A,0.2,green,B,A\n"
    "i2,train,B,0.35,blue,B,B\n"
    "i3,train,B,0.5,red,B,A\n"
    "i4,test,C,0.9,green,C,C\n"
    "i5,test,C,1.0,blue,A,C\n";

ErrorCode load_error(const json& manifest, const std::string& csv, std::string* path = nullptr) {
  const auto dir = scratch_dir("err");
  write(dir / "data.csv", csv);
  try {
    load_dataset(manifest, dir);
  } catch (const Error& e) {
    if (path) *path = e.detail_path();
    return e.code();
  }
  FAIL("expected a load error");
  return ErrorCode::InvalidParameter;
}

}  // namespace

TEST_CASE("fixture loads field by field") {
  const auto& ds = testing::fixture6();
  CHECK(ds.size() == 6);
  CHECK(ds.classifier_count() == 2);
  CHECK(ds.label_count() == 3);
  CHECK(ds.feature_count() == 2);
  CHECK(ds.instance_ids() == std::vector<std::string>{"i0", "i1", "i2", "i3", "i4", "i5"});
  const std::vector<LabelId> actual{0, 0, 1, 1, 2, 2};
  CHECK(std::equal(actual.begin(), actual.end(), ds.actual().begin(), ds.actual().end()));
  const std::vector<LabelId> c1{0, 1, 1, 1, 2, 0};
  CHECK(std::equal(c1.begin(), c1.end(), ds.predictions(0).begin(), ds.predictions(0).end()));
  const auto& score = ds.feature(ds.require_feature("score"));
  CHECK(score.values == std::vector<double>{0.1, 0.2, 0.35, 0.5, 0.9, 1.0});
  const auto& color = ds.feature(ds.require_feature("color"));
  CHECK(color.codes == std::vector<std::uint32_t>{0, 1, 2, 0, 1, 2});
  CHECK_FALSE(ds.gold_standard().has_value());
  CHECK(ds.comparison_classifiers().size() == 2);
}

TEST_CASE("fixture validates clean and reloads identically") {
  CHECK(validate(testing::fixture6()).warnings.empty());
  CHECK(load_dataset(testing::fixture6_manifest()) == testing::fixture6());
}

TEST_CASE("minimal inline manifest") {
  const auto manifest = json::parse(R"({
    "labels": ["no", "yes"], "classifiers": ["m"],
    "features": [{"name": "x", "kind": "continuous"}],
    "data": {"id": [1, 2], "split": ["train", "test"], "actual": ["no", "yes"],
             "features": {"x": [0.5, null]}, "predictions": {"m": ["no", "no"]}}})");
  const auto ds = load_dataset(manifest, ".");
  CHECK(ds.size() == 2);
  CHECK(ds.classifier_count() == 1);
  CHECK(ds.label_count() == 2);
  CHECK(ds.instance_ids() == std::vector<std::string>{"1", "2"});
  CHECK(ds.feature(0).missing[1] == 1);
  const auto warnings = validate(ds).warnings;
  CHECK(std::find(warnings.begin(), warnings.end(), "feature 'x' has 1 missing values") != warnings.end());
}

TEST_CASE("scope sets partition the universe") {
  const auto& ds = testing::fixture6();
  CHECK(scope_set(ds, Scope::All).count() == 6);
  CHECK(scope_set(ds, Scope::Test).to_vector() == std::vector<InstanceIndex>{4, 5});
  CHECK((scope_set(ds, Scope::Train) | scope_set(ds, Scope::Test)) == scope_set(ds, Scope::All));
  CHECK((scope_set(ds, Scope::Train) & scope_set(ds, Scope::Test)).empty());
  CHECK(parse_scope("train") == Scope::Train);
  CHECK_FALSE(parse_scope("training").has_value());
}

TEST_CASE("validation warnings") {
  const auto dir = scratch_dir("warn");
  write(dir / "data.csv",
        "id,split,actual,score,color,c1,c2\n"
        "i0,test,A,1,red,A,A\n"
        "i1,test,B,1,red,B,A\n");
  const auto ds = load_dataset(fixture_manifest(), dir);
  const auto w = validate(ds).warnings;
  auto has = [&](const std::string& s) { return std::find(w.begin(), w.end(), s) != w.end(); };
  CHECK(has("empty train split"));
  CHECK(has("constant feature 'score'"));
  CHECK(has("constant feature 'color'"));
  CHECK(has("label 'C' never occurs as an actual label"));
  CHECK_FALSE(has("empty test split"));
}

TEST_CASE("load errors carry codes and paths") {
  const auto manifest = fixture_manifest();
  std::string path;

  CHECK(load_error(manifest, "id,split,actual,score,color,c1,c2\ni0,train,A,0.1,red,A\n", &path) ==
        ErrorCode::LengthMismatch);
  CHECK(path == "data.csv:2");
  CHECK(load_error(manifest, "id,split,actual,score,color,c1,c2\ni0,train,A,0.1,red,A,Z\n", &path) ==
        ErrorCode::LabelOutOfVocabulary);
  CHECK(path.find("c2") != std::string::npos);
  CHECK(load_error(manifest, "id,split,actual,score,color,c1,c2\ni0,train,A,0.1,red,A,A\ni0,test,A,1,red,A,A\n") ==
        ErrorCode::DuplicateInstanceId);
  CHECK(load_error(manifest, "id,split,actual,score,color,c1,c2\ni0,dev,A,0.1,red,A,A\n") ==
        ErrorCode::SchemaViolation);
  CHECK(load_error(manifest, "id,split,actual,score,color,c1,c2\ni0,train,A,abc,red,A,A\n") ==
        ErrorCode::SchemaViolation);
  CHECK(load_error(manifest, "id,split,actual,score,color,c1,c2\ni0,train,A,0.1,pink,A,A\n") ==
        ErrorCode::SchemaViolation);
  CHECK(load_error(manifest, "id,split,actual,score,c1,c2\ni0,train,A,0.1,A,A\n") == ErrorCode::SchemaViolation);

  auto one_label = manifest;
  one_label["labels"] = {"A"};
  CHECK(load_error(one_label, kFixtureCsv) == ErrorCode::LabelOutOfVocabulary);

  auto dup_label = manifest;
  dup_label["labels"] = {"A", "B", "A"};
  CHECK(load_error(dup_label, kFixtureCsv) == ErrorCode::SchemaViolation);

  auto bad_kind = manifest;
  bad_kind["features"][0]["kind"] = "ordinal";
  CHECK(load_error(bad_kind, kFixtureCsv, &path) == ErrorCode::SchemaViolation);
  CHECK(path.rfind("features[0]", 0) == 0);

  auto no_categories = manifest;
  no_categories["features"][1].erase("categories");
  CHECK(load_error(no_categories, kFixtureCsv) == ErrorCode::SchemaViolation);

  auto strict = manifest;
  strict["features"][0]["missing_allowed"] = false;
  CHECK(load_error(strict, "id,split,actual,score,color,c1,c2\ni0,train,A,,red,A,A\n") == ErrorCode::SchemaViolation);

  CHECK_THROWS_AS(load_dataset(std::filesystem::path("/nonexistent/manifest.json")), Error);
  try {
    load_dataset(std::filesystem::path("/nonexistent/manifest.json"));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingFile);
  }
  auto missing_csv = manifest;
  missing_csv["data"] = "nope.csv";
  try {
    load_dataset(missing_csv, scratch_dir("missing"));
    FAIL("expected MissingFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingFile);
  }
}

TEST_CASE("inline column lengths are checked") {
  auto manifest = json::parse(R"({
    "labels": ["no", "yes"], "classifiers": ["m"], "features": [],
    "data": {"id": ["a", "b"], "split": ["train", "test"], "actual": ["no", "yes"],
             "predictions": {"m": ["no"]}}})");
  try {
    load_dataset(manifest, ".");
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
    CHECK(e.detail_path() == "predictions.m");
  }
}

TEST_CASE("gold standard replaces actual") {
  auto manifest = fixture_manifest();
  manifest["gold_standard"] = "c2";
  const auto dir = scratch_dir("gold");
  // the actual column is ignored in gold mode, even when it holds junk
  write(dir / "data.csv",
        "id,split,actual,score,color,c1,c2\n"
        "i0,train,,0.1,red,A,A\n"
        "i1,train,,0.2,green,B,A\n"
        "i2,test,,0.3,blue,B,C\n");
  const auto ds = load_dataset(manifest, dir);
  CHECK(ds.gold_standard() == ClassifierId{1});
  CHECK(ds.comparison_classifiers().size() == 1);
  CHECK(ds.comparison_classifiers()[0] == 0);
  const std::vector<LabelId> expect{0, 0, 2};
  CHECK(std::equal(expect.begin(), expect.end(), ds.actual().begin(), ds.actual().end()));

  auto unknown = fixture_manifest();
  unknown["gold_standard"] = "c9";
  CHECK(load_error(unknown, kFixtureCsv) == ErrorCode::SchemaViolation);
}

TEST_CASE("quoted CSV cells") {
  auto manifest = fixture_manifest();
  manifest["labels"] = {"A", "B, or not", "C"};
  const auto dir = scratch_dir("quoted");
  write(dir / "data.csv",
        "id,split,actual,score,color,c1,c2\r\n"
        "\"i,0\",train,\"B, or not\",0.1,red,A,A\r\n"
        "\r\n"
        "i1,test,A,2,\"green\",C,A\r\n");
  const auto ds = load_dataset(manifest, dir);
  CHECK(ds.size() == 2);
  CHECK(ds.instance_ids()[0] == "i,0");
  CHECK(ds.actual()[0] == 1);
}

TEST_CASE("name lookups") {
  const auto& ds = testing::fixture6();
  CHECK(ds.require_classifier("c2") == 1);
  CHECK(ds.require_label("C") == 2);
  try {
    ds.require_classifier("c3");
    FAIL("expected UnknownClassifier");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownClassifier);
  }
  CHECK_THROWS_AS(ds.require_feature("size"), Error);
  CHECK_THROWS_AS(ds.require_label("D"), Error);
}
