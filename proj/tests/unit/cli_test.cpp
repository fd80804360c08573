#include <algorithm>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support/process.hpp"
#include "support/test_support.hpp"

using nlohmann::json;

namespace {

using boxer::testing::run_cli;
using boxer::testing::slurp;

std::filesystem::path scratch() { return boxer::testing::scratch_dir("boxer_cli_test"); }

std::string fixture() { return "--dataset \"" + boxer::testing::fixture6_manifest().string() + "\""; }

std::string golden(const std::string& name) { return slurp(boxer::testing::source_dir() / "tests/golden" / name); }

/// Writes the fixture manifest next to a replacement data file.
std::filesystem::path with_data(const std::string& name, const std::string& csv) {
  const auto dir = scratch() / name;
  std::filesystem::create_directories(dir);
  std::filesystem::copy_file(boxer::testing::fixture6_manifest(), dir / "manifest.json",
                             std::filesystem::copy_options::overwrite_existing);
  std::ofstream(dir / "data.csv", std::ios::binary) << csv;
  return dir / "manifest.json";
}

}  // namespace

TEST_CASE("validate") {
  auto r = run_cli("validate " + fixture());
  CHECK(r.status == 0);
  CHECK(r.out == "ok: 6 instances, 2 classifiers, 3 labels, 2 features\n");
  r = run_cli("validate \"" + boxer::testing::fixture6_manifest().string() + "\"");
  CHECK(r.status == 0);
}

TEST_CASE("view output matches the goldens") {
  auto r = run_cli(fixture() + " view cumulative");
  CHECK(r.status == 0);
  CHECK(r.out == golden("cumulative.json"));
  r = run_cli(fixture() + " --format csv view metrics");
  CHECK(r.status == 0);
  CHECK(r.out == golden("metrics.csv"));
  r = run_cli("view selection_performance --first \"incorrect(c1)\" " + fixture() + " --format csv");
  CHECK(r.status == 0);
  CHECK(r.out == golden("selection_performance.csv"));
}

TEST_CASE("scripts") {
  const auto script = boxer::testing::source_dir() / "tests/golden/fixture6.script";
  auto r = run_cli(fixture() + " script \"" + script.string() + "\"");
  CHECK(r.status == 0);
  CHECK(r.out == golden("fixture6.script.out"));

  r = run_cli(fixture() + " script - < \"" + script.string() + "\"");
  CHECK(r.out == golden("fixture6.script.out"));

  const auto bad = scratch() / "bad.script";
  std::ofstream(bad) << "set first correct(c1)\nemit metrics\nset second actual=Q\n";
  r = run_cli(fixture() + " script \"" + bad.string() + "\"");
  CHECK(r.status == 1);
  CHECK(r.err.find("error: UnknownLabel") == 0);
  CHECK(r.err.find("step 3 (line 3)") != std::string::npos);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
}

TEST_CASE("dataset errors exit nonzero with a code") {
  auto r = run_cli("validate --dataset /nonexistent/manifest.json");
  CHECK(r.status == 1);
  CHECK(r.err.find("error: MissingFile") == 0);

  const auto truncated = with_data("truncated", "id,split,actual,score,color,c1,c2\ni0,train,A,0.1,red,A,A\ni1,train,A,0.2\n");
  r = run_cli("validate \"" + truncated.string() + "\"");
  CHECK(r.status == 1);
  CHECK(r.err.find("error: LengthMismatch") == 0);
  CHECK(r.err.find("data.csv:3") != std::string::npos);

  const auto unknown = with_data("unknown", "id,split,actual,score,color,c1,c2\ni0,train,A,0.1,red,A,D\n");
  r = run_cli("validate \"" + unknown.string() + "\"");
  CHECK(r.status == 1);
  CHECK(r.err.find("error: LabelOutOfVocabulary") == 0);

  const auto skewed = with_data("skewed", "id,split,actual,score,color,c1,c2\ni0,train,A,0.1,red,A,A\n");
  r = run_cli("validate \"" + skewed.string() + "\"");
  CHECK(r.status == 0);
  CHECK(r.out.find("warning: ") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run_cli(fixture() + " view scatter").status != 0);
  CHECK(run_cli(fixture() + " view histogram").status == 1);
  auto r = run_cli(fixture() + " --first \"correct(c1\" view metrics");
  CHECK(r.status == 1);
  CHECK(r.err.find("error: ParseError") == 0);
  CHECK(run_cli(fixture() + " --format csv view cumulative").status == 1);
  CHECK(run_cli("view metrics").status == 1);
}

TEST_CASE("synth then load") {
  const auto dir = scratch() / "synth";
  std::filesystem::remove_all(dir);
  auto r = run_cli("--seed 7 synth --out \"" + dir.string() + "\" -n 500 -m 4 -l 3 -f 3 --accuracy 1.0,0.5");
  REQUIRE(r.status == 0);
  r = run_cli("validate \"" + (dir / "manifest.json").string() + "\"");
  CHECK(r.out.rfind("ok: 500 instances, 4 classifiers, 3 labels, 3 features\n", 0) == 0);
  const auto first = slurp(dir / "data.csv");
  run_cli("--seed 7 synth --out \"" + dir.string() + "\" -n 500 -m 4 -l 3 -f 3 --accuracy 1.0,0.5");
  CHECK(slurp(dir / "data.csv") == first);
  r = run_cli("--dataset \"" + (dir / "manifest.json").string() + "\" view metrics");
  const auto payload = json::parse(r.out);
  CHECK(payload["rows"][0]["metrics"]["accuracy"] == 1.0);
  CHECK(run_cli("synth --out \"" + dir.string() + "\" -l 1").status == 1);
}

TEST_CASE("fairness walk-through on the recidivism sample") {
  const auto dir = boxer::testing::source_dir() / "data/recidivism";
  const auto r = run_cli("--dataset \"" + (dir / "manifest.json").string() + "\" script \"" +
                         (dir / "fairness.script").string() + "\"");
  REQUIRE(r.status == 0);
  std::istringstream lines(r.out);
  std::vector<json> payloads;
  for (std::string line; std::getline(lines, line);) payloads.push_back(json::parse(line));
  REQUIRE(payloads.size() == 3);
  CHECK(payloads[0]["view"] == "histogram");
  CHECK(payloads[1]["view"] == "selection_performance");
  CHECK(payloads[1]["rows"].size() == 3);
  CHECK(payloads[2]["selection_version"] == 3);
}
