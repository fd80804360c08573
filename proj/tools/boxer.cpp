// boxer: validate datasets, emit view payloads, replay selection scripts,
// generate synthetic experiments and serve the HTTP API.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "boxer/error.hpp"
#include "boxer/http_service.hpp"
#include "boxer/script.hpp"
#include "boxer/session.hpp"
#include "boxer/synth.hpp"

namespace {

using boxer::Error;
using boxer::ErrorCode;
using nlohmann::json;

struct Globals {
  std::string dataset;
  std::string scope;
  std::string first;
  std::string second;
  std::string format = "json";
  std::uint64_t seed = 1;
};

int report(const Error& e) {
  std::cerr << "error: " << e.code_name() << ": " << e.what();
  if (!e.detail_path().empty()) std::cerr << " [" << e.detail_path() << "]";
  std::cerr << '\n';
  return 1;
}

std::shared_ptr<const boxer::ExperimentDataset> load(const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::InvalidParameter, "--dataset is required", "--dataset");
  return std::make_shared<const boxer::ExperimentDataset>(boxer::load_dataset(std::filesystem::path(path)));
}

std::string fixed4(const json& v) {
  if (v.is_null()) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v.get<double>());
  return buf;
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return quoted(v.get<std::string>());
  if (v.is_number_float()) return fixed4(v);
  return v.dump();
}

/// Flattens the tabular views; other payloads have no CSV form.
std::string to_csv(const json& payload) {
  std::ostringstream out;
  const auto view = payload.at("view").get<std::string>();
  if (view == "metrics" || view == "parallel_metrics") {
    const bool ranked = view == "parallel_metrics";
    if (ranked) out << "rank,";
    out << "classifier";
    for (const auto& k : payload.at("metric_kinds")) out << ',' << k.get<std::string>();
    out << '\n';
    std::vector<json> rows(payload.at("rows").begin(), payload.at("rows").end());
    if (ranked) {
      std::stable_sort(rows.begin(), rows.end(),
                       [](const json& a, const json& b) { return a.at("rank").get<int>() < b.at("rank").get<int>(); });
    }
    for (const auto& row : rows) {
      if (ranked) out << row.at("rank").get<int>() << ',';
      out << cell(row.at("classifier"));
      for (const auto& k : payload.at("metric_kinds")) out << ',' << fixed4(row.at("metrics").at(k.get<std::string>()));
      out << '\n';
    }
  } else if (view == "selection_performance") {
    out << "classifier,first,first_size,second,second_size\n";
    for (const auto& row : payload.at("rows")) {
      out << cell(row.at("classifier"));
      for (const char* slot : {"first", "second"}) {
        if (row.contains(slot)) {
          out << ',' << fixed4(row.at(slot).at("value")) << ',' << row.at(slot).at("size").get<std::uint64_t>();
        } else {
          out << ",,";
        }
      }
      out << '\n';
    }
  } else if (view == "instances") {
    out << "index,id,in_first,in_second,split,actual";
    for (const auto& c : payload.at("classifiers")) out << ',' << cell(c);
    for (const auto& f : payload.at("features")) out << ',' << cell(f);
    out << '\n';
    for (const auto& row : payload.at("rows")) {
      out << row.at("index").get<std::uint64_t>() << ',' << cell(row.at("id")) << ','
          << (row.at("in_first").get<bool>() ? 1 : 0) << ',' << (row.at("in_second").get<bool>() ? 1 : 0) << ','
          << cell(row.at("split")) << ',' << cell(row.at("actual"));
      for (const auto& p : row.at("predictions")) out << ',' << cell(p);
      for (const auto& v : row.at("features")) out << ',' << cell(v);
      out << '\n';
    }
  } else {
    throw Error(ErrorCode::InvalidParameter, "--format csv applies to metrics, parallel_metrics, "
                                             "selection_performance and instances only", "--format");
  }
  return out.str();
}

void emit(const boxer::ViewPayload& payload, const std::string& format) {
  const auto doc = boxer::to_json(payload);
  if (format == "csv") {
    std::cout << to_csv(doc);
  } else {
    std::cout << boxer::to_text(doc) << '\n';
  }
}

boxer::ViewParams parse_params(const std::vector<std::string>& items) {
  boxer::ViewParams params;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::InvalidParameter, "view parameters take the form key=value, got '" + item + "'", item);
    }
    if (!params.emplace(item.substr(0, eq), item.substr(eq + 1)).second) {
      throw Error(ErrorCode::InvalidParameter, "parameter '" + item.substr(0, eq) + "' given twice", item);
    }
  }
  return params;
}

/// Applies the global --scope/--first/--second flags in that order.
void apply_globals(boxer::Session& session, const Globals& g) {
  if (!g.scope.empty()) session.mutate({{"action", "scope"}, {"scope", g.scope}});
  if (!g.first.empty()) session.mutate({{"action", "set"}, {"slot", "first"}, {"query", g.first}});
  if (!g.second.empty()) session.mutate({{"action", "set"}, {"slot", "second"}, {"query", g.second}});
}

int cmd_validate(const Globals& g, const std::string& manifest) {
  const auto ds = load(manifest.empty() ? g.dataset : manifest);
  std::cout << "ok: " << ds->size() << " instances, " << ds->classifier_count() << " classifiers, "
            << ds->label_count() << " labels, " << ds->feature_count() << " features\n";
  for (const auto& w : boxer::validate(*ds).warnings) std::cout << "warning: " << w << '\n';
  return 0;
}

int cmd_view(const Globals& g, const std::string& kind, const std::vector<std::string>& items) {
  const auto params = parse_params(items);
  boxer::Session session("cli", "cli", load(g.dataset));
  apply_globals(session, g);
  emit(session.view(kind, params), g.format);
  return 0;
}

int cmd_script(const Globals& g, const std::string& file) {
  std::string text;
  if (file == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open script '" + file + "'", file);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto steps = boxer::parse_script(text);
  boxer::Session session("cli", "cli", load(g.dataset));
  apply_globals(session, g);
  boxer::run_script(session, steps, [&](const boxer::ViewPayload& p) {
    emit(p, g.format);
    std::cout.flush();
  });
  return 0;
}

int cmd_serve(const Globals& g, const std::string& host, int port) {
  boxer::SessionManager manager;
  if (!g.dataset.empty()) {
    const auto& info = manager.add_dataset(load(g.dataset), g.dataset);
    std::cerr << "loaded " << g.dataset << " as " << info.id << '\n';
  }
  boxer::HttpService service(manager);
  const int bound = service.bind(host, port);
  if (bound < 0) throw Error(ErrorCode::InvalidParameter, "cannot bind " + host + ":" + std::to_string(port), "--port");
  std::cout << "listening on http://" << host << ':' << bound << "/v1/" << std::endl;
  return service.listen() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explore and compare classifier outputs through linked subset views."};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--dataset", g.dataset, "Dataset manifest (JSON)");
  app.add_option("--scope", g.scope, "Universe: train, test or all");
  app.add_option("--first", g.first, "Query text for the first selection");
  app.add_option("--second", g.second, "Query text for the second selection");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", g.seed, "Random seed for synth");

  auto* validate = app.add_subcommand("validate", "Load a manifest and report warnings");
  std::string manifest;
  validate->add_option("manifest", manifest, "Manifest path (defaults to --dataset)");

  auto* view = app.add_subcommand("view", "Print one view payload");
  std::string kind;
  std::vector<std::string> items;
  view->add_option("kind", kind, "View kind")->required()->check(CLI::IsMember(boxer::view_kinds()));
  view->add_option("params", items, "View parameters as key=value");

  auto* script = app.add_subcommand("script", "Replay a selection script, printing one payload per emit");
  std::string script_file;
  script->add_option("file", script_file, "Script path, or - for standard input")->required();

  auto* synth = app.add_subcommand("synth", "Write a synthetic experiment (manifest.json + data.csv)");
  boxer::SynthParams sp;
  std::string out_dir;
  synth->add_option("--out", out_dir, "Output directory")->required();
  synth->add_option("-n,--instances", sp.instances, "Instance count")->capture_default_str();
  synth->add_option("-m,--classifiers", sp.classifiers, "Classifier count")->capture_default_str();
  synth->add_option("-l,--labels", sp.labels, "Label count")->capture_default_str();
  synth->add_option("-f,--features", sp.features, "Feature count")->capture_default_str();
  synth->add_option("--categories", sp.categories, "Categories per categorical feature")->capture_default_str();
  synth->add_option("--test-fraction", sp.test_fraction, "Share of instances in the test split")
      ->capture_default_str();
  synth->add_option("--accuracy", sp.accuracy, "Per-classifier accuracy levels")->delimiter(',');

  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(g, manifest);
    if (*view) return cmd_view(g, kind, items);
    if (*script) return cmd_script(g, script_file);
    if (*synth) {
      sp.seed = g.seed;
      boxer::write_synth(out_dir, sp);
      return 0;
    }
    if (*serve) return cmd_serve(g, host, port);
  } catch (const Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
