#pragma once

// Command-line front end: synth, build-dataset, train, eval, gradcheck,
// threshold-fit and report.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ned/checkpoint.hpp"
#include "ned/dataset.hpp"
#include "ned/errors.hpp"
#include "ned/model_check.hpp"
#include "ned/models.hpp"
#include "ned/synthetic.hpp"
#include "ned/training.hpp"

namespace ned {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitFormat = 4,
  kExitData = 5,
  kExitNumeric = 6,
};

inline int exit_code_for(const Error& e) {
  const std::string c = e.category();
  if (c == "io") return kExitIo;
  if (c == "format") return kExitFormat;
  if (c == "numeric") return kExitNumeric;
  return kExitData;
}

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(what) {}
  const char* category() const noexcept override { return "usage"; }
};

struct CliOptions {
  std::string arch = "rnn-triplets";
  std::string embeddings;
  std::size_t embedding_dim = 300;
  std::string dataset;
  std::string graphs;
  std::string aliases;
  std::string out;
  std::string checkpoint;
  std::string split_name = "test";
  std::string split = "0.8,0.1,0.1";
  std::uint64_t seed = 0;
  std::size_t epochs = 50;
  std::size_t batch_size = 10;
  double step = 1e-4;
  std::size_t hops = 2;
  std::size_t runs = 1;
  std::size_t patience = 10;
  std::size_t width = 0;  // 0 keeps the default layer sizes
  std::size_t triplet_width = 0;
  std::size_t gcn_layers = 4;
  std::string aggregation = "outgoing";
  std::size_t records = 500;
  bool distinct_nodes = false;
  double context_noise = 0.5;
  bool strict = false;
  bool json = false;
  std::vector<std::string> reports;
};

namespace detail {

inline SplitSpec parse_split(const std::string& text, std::uint64_t seed) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError("--split needs three comma-separated values, got '" + text + "'");
  SplitSpec spec;
  spec.seed = seed;
  try {
    if (text.find('.') != std::string::npos)
      spec.sizes = SplitRatios{std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])};
    else
      spec.sizes = SplitCounts{std::stoul(parts[0]), std::stoul(parts[1]), std::stoul(parts[2])};
  } catch (const std::logic_error&) {
    throw UsageError("--split values must be numbers, got '" + text + "'");
  }
  return spec;
}

inline Arch require_arch(const std::string& tag) {
  auto a = parse_arch(tag);
  if (!a) {
    std::string known;
    for (Arch x : kAllArchs) known += (known.empty() ? "" : ", ") + std::string(arch_tag(x));
    throw UsageError("unknown architecture '" + tag + "' (expected one of: " + known + ")");
  }
  return *a;
}

inline ModelConfig model_config(const CliOptions& o) {
  ModelConfig c = o.width ? ModelConfig::reduced(require_arch(o.arch), o.embedding_dim, o.width) : ModelConfig{};
  c.arch = require_arch(o.arch);
  c.embedding_dim = o.embedding_dim;
  c.triplet_width = o.triplet_width;
  c.gcn_layers = o.gcn_layers;
  if (o.aggregation == "outgoing")
    c.aggregation = GcnAggregation::Outgoing;
  else if (o.aggregation == "incoming")
    c.aggregation = GcnAggregation::Incoming;
  else
    throw UsageError("--aggregation must be 'outgoing' or 'incoming'");
  c.validate();
  return c;
}

inline TrainConfig train_config(const CliOptions& o) {
  TrainConfig t;
  t.batch_size = o.batch_size;
  t.step_size = o.step;
  t.epochs = o.epochs;
  t.seed = o.seed;
  t.patience = o.patience;
  t.hops = o.hops;
  t.validate();
  return t;
}

inline void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

struct PreparedData {
  std::vector<EncodedExample> train, dev, test;
  std::size_t skipped_records = 0;
};

/// Reads a built dataset directory (records.jsonl + manifest.json) and encodes
/// its examples.
inline PreparedData prepare_data(const CliOptions& o, const EmbeddingStore& store, std::size_t triplet_width) {
  require(o.dataset, "--dataset");
  require(o.graphs, "--graphs");
  const auto loaded = load_records(o.dataset + "/records.jsonl", {o.strict, false});
  const SplitManifest manifest = manifest_from_json(read_json_file(o.dataset + "/manifest.json"));
  const GraphStore graphs = GraphStore::load(o.graphs);
  PreparedData data;
  auto fill = [&](const std::vector<std::size_t>& idx, std::vector<EncodedExample>& out) {
    for (std::size_t r : idx) {
      if (r >= loaded.records.size()) throw FormatError("manifest references record " + std::to_string(r));
      try {
        auto [pos, neg] = expand_to_examples(loaded.records[r], r, graphs, o.hops);
        out.push_back(encode_example(pos, store, triplet_width));
        out.back().id = 2 * r;
        out.push_back(encode_example(neg, store, triplet_width));
        out.back().id = 2 * r + 1;
      } catch (const MentionNotFound&) {
        ++data.skipped_records;
      } catch (const ContractError&) {
        ++data.skipped_records;
      }
    }
  };
  fill(manifest.train, data.train);
  fill(manifest.dev, data.dev);
  fill(manifest.test, data.test);
  return data;
}

inline EmbeddingStore load_embeddings(const CliOptions& o, std::ostream& err) {
  require(o.embeddings, "--embeddings");
  EmbeddingStore store = EmbeddingStore::load(o.embeddings, o.embedding_dim);
  if (store.malformed_rows()) err << "warning: skipped " << store.malformed_rows() << " malformed embedding rows\n";
  return store;
}

inline std::string format_metrics(const ClassMetrics& m) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(1);
  s << "P " << m.precision << "  R " << m.recall << "  F1 " << m.f1;
  return s.str();
}

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_synth(const CliOptions& o, std::ostream& out) {
  require(o.out, "--out");
  SyntheticOptions so;
  so.records = o.records;
  so.dimension = o.embedding_dim;
  so.seed = o.seed;
  so.shared_nodes = !o.distinct_nodes;
  so.context_noise = o.context_noise;
  std::filesystem::create_directories(o.out);
  const SyntheticCorpus corpus = make_synthetic_corpus(so);
  corpus.write(o.out);
  if (o.json)
    out << nlohmann::json{{"records", corpus.records.size()}, {"items", corpus.graphs.size()},
                          {"vocabulary", corpus.embeddings.size()}, {"out", o.out}}
               .dump()
        << '\n';
  else
    out << "wrote " << corpus.records.size() << " records, " << corpus.graphs.size() << " items, "
        << corpus.embeddings.size() << " vocabulary rows to " << o.out << '\n';
  return kExitOk;
}

inline int cmd_build_dataset(const CliOptions& o, std::ostream& out) {
  require(o.dataset, "--dataset");
  require(o.graphs, "--graphs");
  require(o.out, "--out");
  const GraphStore graphs = GraphStore::load(o.graphs);
  std::optional<AliasIndex> pool;
  if (!o.aliases.empty()) pool = AliasIndex::load(o.aliases);
  const auto loaded = load_records(o.dataset, {o.strict, pool.has_value()});
  const BuiltDataset built = build_dataset(loaded, graphs, pool ? &*pool : nullptr, o.hops, parse_split(o.split, o.seed));
  std::filesystem::create_directories(o.out);
  write_records(o.out + "/records.jsonl", built.records);
  nlohmann::json manifest = manifest_to_json(built.manifest);
  manifest["seed"] = o.seed;
  manifest["hops"] = o.hops;
  write_text(o.out + "/manifest.json", manifest.dump(2) + "\n");
  const nlohmann::json report = built.report.to_json();
  write_text(o.out + "/report.json", report.dump(2) + "\n");
  if (o.json) {
    out << report.dump() << '\n';
  } else {
    out << "records read: " << built.report.records_read << " (invalid lines " << built.report.invalid_lines
        << ")\nkept: " << built.report.kept << '\n';
    for (const auto& [reason, n] : built.report.dropped) out << "dropped " << reason << ": " << n << '\n';
    out << "examples train/dev/test: " << built.report.train << '/' << built.report.dev << '/' << built.report.test
        << '\n';
  }
  return kExitOk;
}

inline int cmd_train(const CliOptions& o, std::ostream& out, std::ostream& err) {
  require(o.out, "--out");
  const ModelConfig config = model_config(o);
  const TrainConfig tc = train_config(o);
  if (o.runs == 0) throw UsageError("--runs must be at least 1");
  const EmbeddingStore store = load_embeddings(o, err);
  const PreparedData data = prepare_data(o, store, config.triplet_width);
  if (data.skipped_records) err << "warning: skipped " << data.skipped_records << " records\n";
  std::filesystem::create_directories(o.out);

  std::vector<std::unique_ptr<std::ofstream>> logs;
  RunHooks hooks;
  hooks.log = [&](std::size_t run) -> std::ostream* {
    const std::string name = run == 0 ? "/train_log.jsonl" : "/train_log.run" + std::to_string(run) + ".jsonl";
    logs.push_back(std::make_unique<std::ofstream>(o.out + name));
    if (!*logs.back()) throw IoError("cannot write '" + o.out + name + "'");
    return logs.back().get();
  };
  hooks.finished = [&](std::size_t run, const TrainResult& tr) {
    const std::string name = run == 0 ? "/checkpoint.json" : "/checkpoint.run" + std::to_string(run) + ".json";
    save_checkpoint(tr.best, o.out + name);
  };
  const EvalReport report = multi_run(config, tc, o.runs, data.train, data.dev, data.test, hooks);
  write_text(o.out + "/report.json", report.to_json().dump(2) + "\n");
  if (o.json) {
    out << report.to_json().dump() << '\n';
  } else {
    out << arch_tag(config.arch) << ": " << o.runs << " run(s)\n"
        << "  dev   " << format_metrics(report.dev) << "\n  test  " << format_metrics(report.test)
        << "\n  spread " << report.spread << "\n  checkpoint " << o.out << "/checkpoint.json\n";
  }
  return kExitOk;
}

inline int cmd_eval(const CliOptions& o, std::ostream& out, std::ostream& err) {
  require(o.checkpoint, "--checkpoint");
  const Model model = load_checkpoint(o.checkpoint);
  CliOptions with_dim = o;
  with_dim.embedding_dim = model.config().embedding_dim;
  const EmbeddingStore store = load_embeddings(with_dim, err);
  const PreparedData data = prepare_data(o, store, model.config().triplet_width);
  const std::vector<EncodedExample>* split = o.split_name == "train" ? &data.train
                                             : o.split_name == "dev" ? &data.dev
                                             : o.split_name == "test" ? &data.test
                                                                      : nullptr;
  if (!split) throw UsageError("--split-name must be train, dev or test");
  const EvalResult r = evaluate(model, *split);
  if (o.json) {
    nlohmann::json j = r.to_json();
    j["arch"] = arch_tag(model.config().arch);
    j["split"] = o.split_name;
    out << j.dump() << '\n';
  } else {
    out << arch_tag(model.config().arch) << " on " << o.split_name << " (" << split->size()
        << " examples): " << format_metrics(r.consistent) << '\n';
  }
  return kExitOk;
}

inline int cmd_gradcheck(const CliOptions& o, std::ostream& out) {
  std::vector<Arch> archs;
  if (o.arch == "all")
    archs.assign(kAllArchs.begin(), kAllArchs.end());
  else
    archs.push_back(require_arch(o.arch));
  const std::size_t width = o.width ? o.width : 4;
  const std::size_t dim = o.embedding_dim == 300 ? 8 : o.embedding_dim;
  GradCheckOptions opts;
  opts.max_elements = SIZE_MAX;
  bool all_passed = true;
  nlohmann::json results = nlohmann::json::array();
  for (Arch a : archs) {
    ModelConfig c = ModelConfig::reduced(a, dim, width);
    c.gcn_layers = o.gcn_layers;
    for (const auto& r : check_model_gradients(c, o.seed, opts)) {
      all_passed = all_passed && r.passed;
      if (o.json) {
        results.push_back({{"arch", arch_tag(a)}, {"tensor", r.name}, {"passed", r.passed},
                           {"max_relative_error", r.max_relative_error}, {"checked", r.checked},
                           {"exercised", r.exercised}, {"skipped", r.skipped}, {"diagnostic", r.diagnostic}});
      } else {
        out << (r.passed ? "PASS " : "FAIL ") << arch_tag(a) << ' ' << r.name << " max_rel_err "
            << r.max_relative_error << " checked " << r.checked << " exercised " << r.exercised << " skipped "
            << r.skipped;
        if (!r.diagnostic.empty()) out << " (" << r.diagnostic << ')';
        out << '\n';
      }
    }
  }
  if (o.json) out << results.dump() << '\n';
  return all_passed ? kExitOk : kExitCheckFailed;
}

inline int cmd_threshold_fit(const CliOptions& o, std::ostream& out, std::ostream& err) {
  CliOptions vd = o;
  vd.arch = "vector-distance";
  const ModelConfig config = model_config(vd);
  const EmbeddingStore store = load_embeddings(o, err);
  const PreparedData data = prepare_data(o, store, 0);
  Model model(config);
  const ThresholdFit fit = fit_threshold(model, data.train);
  model.set_threshold(fit.threshold);
  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    save_checkpoint(model, o.out + "/checkpoint.json");
  }
  const ClassMetrics dev = evaluate(model, data.dev).consistent;
  if (o.json)
    out << nlohmann::json{{"threshold", fit.threshold}, {"train_f1", round1(100.0 * fit.f1)},
                          {"dev", metrics_json(dev)}}
               .dump()
        << '\n';
  else
    out << "threshold " << fit.threshold << " (train F1 " << round1(100.0 * fit.f1) << ")\n"
        << "dev " << format_metrics(dev) << '\n';
  return kExitOk;
}

inline int cmd_report(const CliOptions& o, std::ostream& out) {
  if (o.reports.empty()) throw UsageError("report needs at least one report file");
  std::vector<EvalReport> reports;
  for (const auto& path : o.reports) reports.push_back(EvalReport::from_json(read_json_file(path)));
  if (o.json) {
    nlohmann::json j{{"models", nlohmann::json::array()}, {"error_estimate", error_estimate(reports)}};
    for (const auto& r : reports) j["models"].push_back(r.to_json());
    out << j.dump() << '\n';
  } else {
    out << render_table(reports);
  }
  return kExitOk;
}

/// Applies keys of a flat JSON config to options not given on the command line.
inline void apply_config_file(const std::string& path, CLI::App& sub, CliOptions& o) {
  const nlohmann::json j = read_json_file(path);
  if (!j.is_object()) throw FormatError("config '" + path + "' must be a JSON object");
  const std::map<std::string, std::function<void(const nlohmann::json&)>> setters = {
      {"arch", [&](const auto& v) { o.arch = v.template get<std::string>(); }},
      {"embeddings", [&](const auto& v) { o.embeddings = v.template get<std::string>(); }},
      {"embedding-dim", [&](const auto& v) { o.embedding_dim = v.template get<std::size_t>(); }},
      {"dataset", [&](const auto& v) { o.dataset = v.template get<std::string>(); }},
      {"graphs", [&](const auto& v) { o.graphs = v.template get<std::string>(); }},
      {"aliases", [&](const auto& v) { o.aliases = v.template get<std::string>(); }},
      {"out", [&](const auto& v) { o.out = v.template get<std::string>(); }},
      {"checkpoint", [&](const auto& v) { o.checkpoint = v.template get<std::string>(); }},
      {"split", [&](const auto& v) { o.split = v.template get<std::string>(); }},
      {"split-name", [&](const auto& v) { o.split_name = v.template get<std::string>(); }},
      {"seed", [&](const auto& v) { o.seed = v.template get<std::uint64_t>(); }},
      {"epochs", [&](const auto& v) { o.epochs = v.template get<std::size_t>(); }},
      {"batch-size", [&](const auto& v) { o.batch_size = v.template get<std::size_t>(); }},
      {"step", [&](const auto& v) { o.step = v.template get<double>(); }},
      {"hops", [&](const auto& v) { o.hops = v.template get<std::size_t>(); }},
      {"runs", [&](const auto& v) { o.runs = v.template get<std::size_t>(); }},
      {"patience", [&](const auto& v) { o.patience = v.template get<std::size_t>(); }},
      {"width", [&](const auto& v) { o.width = v.template get<std::size_t>(); }},
      {"triplet-width", [&](const auto& v) { o.triplet_width = v.template get<std::size_t>(); }},
      {"gcn-layers", [&](const auto& v) { o.gcn_layers = v.template get<std::size_t>(); }},
      {"aggregation", [&](const auto& v) { o.aggregation = v.template get<std::string>(); }},
      {"records", [&](const auto& v) { o.records = v.template get<std::size_t>(); }},
      {"distinct-nodes", [&](const auto& v) { o.distinct_nodes = v.template get<bool>(); }},
      {"context-noise", [&](const auto& v) { o.context_noise = v.template get<double>(); }},
      {"strict", [&](const auto& v) { o.strict = v.template get<bool>(); }},
      {"json", [&](const auto& v) { o.json = v.template get<bool>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw FormatError("config '" + path + "': unknown key '" + key + "'");
    CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
    }
    if (opt && opt->count() > 0) continue;
    try {
      it->second(value);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("config '" + path + "': key '" + key + "': " + e.what());
    }
  }
}

}  // namespace detail

/// Runs one CLI invocation and returns its exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliOptions o;
  std::string config_path;
  CLI::App app{"Entity-consistency models over knowledge-graph neighborhoods", "ned"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* s) {
    s->add_option("--config", config_path, "Flat JSON file of option values; flags override it");
    s->add_flag("--json", o.json, "Machine-readable output");
    s->add_option("--seed", o.seed, "Random seed");
  };
  auto data_flags = [&](CLI::App* s) {
    s->add_option("--embeddings", o.embeddings, "Word-vector text file");
    s->add_option("--embedding-dim", o.embedding_dim, "Embedding dimension");
    s->add_option("--dataset", o.dataset, "Built dataset directory");
    s->add_option("--graphs", o.graphs, "Graph store JSONL");
    s->add_option("--hops", o.hops, "Hop cut around the central item");
    s->add_flag("--strict", o.strict, "Reject records with unknown keys");
  };
  auto model_flags = [&](CLI::App* s) {
    s->add_option("--arch", o.arch, "Architecture tag");
    s->add_option("--width", o.width, "Set every layer width to this value (0 keeps defaults)");
    s->add_option("--triplet-width", o.triplet_width, "Triplet input width (0 = 3 x embedding dim)");
    s->add_option("--gcn-layers", o.gcn_layers, "GCN layer count");
    s->add_option("--aggregation", o.aggregation, "GCN aggregation: outgoing or incoming");
  };

  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic corpus");
  common(synth);
  synth->add_option("--out", o.out, "Output directory");
  synth->add_option("--records", o.records, "Record count");
  synth->add_option("--embedding-dim", o.embedding_dim, "Vocabulary vector dimension");
  synth->add_flag("--distinct-nodes", o.distinct_nodes, "Give the two items of a name different node sets");
  synth->add_option("--context-noise", o.context_noise, "Context word noise around type vectors (negative = independent)");

  CLI::App* build = app.add_subcommand("build-dataset", "Pair records with graphs and split them");
  common(build);
  build->add_option("--dataset", o.dataset, "Records JSONL");
  build->add_option("--graphs", o.graphs, "Graph store JSONL");
  build->add_option("--aliases", o.aliases, "Alias index JSONL used to pick missing negatives");
  build->add_option("--out", o.out, "Output directory");
  build->add_option("--hops", o.hops, "Hop cut around the central item");
  build->add_option("--split", o.split, "train,dev,test as ratios (0.8,0.1,0.1) or record counts");
  build->add_flag("--strict", o.strict, "Reject records with unknown keys");

  CLI::App* trn = app.add_subcommand("train", "Train a model and write checkpoint, log and report");
  common(trn);
  data_flags(trn);
  model_flags(trn);
  trn->add_option("--out", o.out, "Output directory");
  trn->add_option("--epochs", o.epochs, "Maximum epochs");
  trn->add_option("--batch-size", o.batch_size, "Examples per batch");
  trn->add_option("--step", o.step, "Adam step size");
  trn->add_option("--runs", o.runs, "Independent runs with seeds seed, seed+1, ...");
  trn->add_option("--patience", o.patience, "Early-stopping patience in epochs (0 disables)");

  CLI::App* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  common(ev);
  data_flags(ev);
  ev->add_option("--checkpoint", o.checkpoint, "Checkpoint JSON");
  ev->add_option("--split-name", o.split_name, "train, dev or test");

  CLI::App* gc = app.add_subcommand("gradcheck", "Finite-difference check of every parameter tensor");
  common(gc);
  gc->add_option("--arch", o.arch, "Architecture tag or 'all'");
  gc->add_option("--width", o.width, "Layer width (default 4)");
  gc->add_option("--embedding-dim", o.embedding_dim, "Embedding dimension (default 8)");
  gc->add_option("--gcn-layers", o.gcn_layers, "GCN layer count");

  CLI::App* tf = app.add_subcommand("threshold-fit", "Fit the vector-distance threshold on the train split");
  common(tf);
  data_flags(tf);
  tf->add_option("--out", o.out, "Directory for the fitted checkpoint");

  CLI::App* rep = app.add_subcommand("report", "Render train reports as a results table");
  common(rep);
  rep->add_option("reports", o.reports, "report.json files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error[usage]: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    if (!config_path.empty()) detail::apply_config_file(config_path, *active, o);
    if (active == synth) return detail::cmd_synth(o, out);
    if (active == build) return detail::cmd_build_dataset(o, out);
    if (active == trn) return detail::cmd_train(o, out, err);
    if (active == ev) return detail::cmd_eval(o, out, err);
    if (active == gc) return detail::cmd_gradcheck(o, out);
    if (active == tf) return detail::cmd_threshold_fit(o, out, err);
    return detail::cmd_report(o, out);
  } catch (const Error& e) {
    const int code = std::string(e.category()) == "usage" ? kExitUsage : exit_code_for(e);
    err << "error[" << e.category() << "]: " << e.what() << '\n';
    if (o.json) out << nlohmann::json{{"error", {{"category", e.category()}, {"message", e.what()}}}}.dump() << '\n';
    return code;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error[io]: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace ned
