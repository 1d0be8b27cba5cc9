#pragma once

// Disambiguation records, negative selection, expansion into balanced labeled
// examples and record-level splits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ned/embedding.hpp"
#include "ned/errors.hpp"
#include "ned/features.hpp"
#include "ned/graph.hpp"
#include "ned/random.hpp"
#include "ned/text_encoder.hpp"

namespace ned {

struct DisambRecord {
  std::string text;
  std::string entity;
  std::string correct_id;
  std::string wrong_id;  // may be empty until a negative is selected
};

inline nlohmann::json record_to_json(const DisambRecord& r) {
  return {{"string", r.text}, {"text", r.entity}, {"correct_id", r.correct_id}, {"wrong_id", r.wrong_id}};
}

struct LoadOptions {
  bool strict = false;              // reject lines with unknown keys
  bool allow_missing_wrong = false;  // keep records whose wrong id is absent
};

struct LoadResult {
  std::vector<DisambRecord> records;
  std::size_t invalid_lines = 0;
  std::vector<std::size_t> invalid_line_numbers;
};

namespace detail {

inline std::optional<DisambRecord> parse_record(const std::string& line, const LoadOptions& opts) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  if (!j.is_object()) return std::nullopt;
  static const std::set<std::string> kKeys = {"string", "text", "correct_id", "wrong_id"};
  if (opts.strict)
    for (const auto& item : j.items())
      if (!kKeys.contains(item.key())) return std::nullopt;
  auto field = [&](const char* key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
  };
  DisambRecord r;
  auto text = field("string");
  auto entity = field("text");
  auto correct = field("correct_id");
  auto wrong = field("wrong_id");
  if (!text || !entity || !correct || text->empty() || entity->empty() || correct->empty()) return std::nullopt;
  if (!wrong || wrong->empty()) {
    if (!opts.allow_missing_wrong) return std::nullopt;
    wrong = std::string();
  }
  if (*wrong == *correct) return std::nullopt;
  return DisambRecord{std::move(*text), std::move(*entity), std::move(*correct), std::move(*wrong)};
}

}  // namespace detail

/// One record per valid JSON line; invalid lines are counted and skipped.
inline LoadResult load_records(const std::string& path, const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records '" + path + "'");
  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (auto r = detail::parse_record(line, opts)) {
      result.records.push_back(std::move(*r));
    } else {
      ++result.invalid_lines;
      result.invalid_line_numbers.push_back(line_no);
    }
  }
  return result;
}

inline void write_records(const std::string& path, const std::vector<DisambRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write records '" + path + "'");
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Candidate pool

/// Case-folded label/alias -> item ids.
class AliasIndex {
 public:
  void add(const std::string& name, const std::string& id) {
    const auto key = fold(name);
    if (key.empty()) return;
    auto& ids = index_[key];
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }

  /// Every item's label and aliases from a graph store.
  static AliasIndex from_store(const GraphStore& store) {
    AliasIndex idx;
    for (const auto& [id, item] : store.items()) {
      idx.add(item.label, id);
      for (const auto& a : item.aliases) idx.add(a, id);
    }
    return idx;
  }

  /// JSON lines of {"label": ..., "ids": [...]}.
  static AliasIndex load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open alias index '" + path + "'");
    AliasIndex idx;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        const auto label = j.at("label").get<std::string>();
        for (const auto& id : j.at("ids")) idx.add(label, id.get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("alias index: ") + e.what(), line_no);
      }
    }
    return idx;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write alias index '" + path + "'");
    for (const auto& [label, ids] : index_) out << nlohmann::json{{"label", label}, {"ids", ids}}.dump() << '\n';
  }

  const std::vector<std::string>& candidates(const std::string& name) const {
    static const std::vector<std::string> kNone;
    auto it = index_.find(fold(name));
    return it == index_.end() ? kNone : it->second;
  }

  std::size_t size() const { return index_.size(); }

 private:
  static std::string fold(const std::string& s) {
    const auto tokens = tokenize(s, true);
    std::string out;
    for (const auto& t : tokens) {
      if (!out.empty()) out += ' ';
      out += t;
    }
    return out;
  }

  std::map<std::string, std::vector<std::string>> index_;
};

/// The lexicographically smallest item sharing the entity's name or alias that
/// is not the correct item and has at least one triplet.
inline std::string select_negative(const std::string& entity, const std::string& correct_id, const AliasIndex& pool,
                                   const GraphStore& store) {
  std::optional<std::string> best;
  for (const auto& id : pool.candidates(entity)) {
    if (id == correct_id || !store.contains(id) || store.item(id).triplets.empty()) continue;
    if (!best || id < *best) best = id;
  }
  if (!best) throw NoNegative("no eligible negative for '" + entity + "'");
  return *best;
}

// ---------------------------------------------------------------------------
// Examples

struct DisambExample {
  std::vector<std::string> tokens;
  MentionMask mask;
  KnowledgeGraph graph;
  int label = 0;  // 1 = consistent
  std::size_t record = 0;
};

/// Positive (correct item) and negative (wrong item) examples of one record.
/// Throws MentionNotFound, ContractError for a missing or triplet-free graph.
inline std::pair<DisambExample, DisambExample> expand_to_examples(const DisambRecord& record, std::size_t index,
                                                                  const GraphStore& graphs, std::size_t hops) {
  auto tokens = tokenize(record.text, false);
  if (tokens.empty()) throw ContractError("record text has no tokens");
  auto mask = locate_mention(tokens, record.entity);
  auto make = [&](const std::string& id, int label) {
    KnowledgeGraph g = truncate_khop(graphs.graph(id), hops);
    if (g.edge_count() == 0) throw ContractError("graph of '" + id + "' has no triplets within " +
                                                 std::to_string(hops) + " hops");
    return DisambExample{tokens, mask, std::move(g), label, index};
  };
  if (record.wrong_id.empty()) throw ContractError("record has no wrong id");
  auto positive = make(record.correct_id, 1);
  auto negative = make(record.wrong_id, 0);
  return {std::move(positive), std::move(negative)};
}

inline EncodedExample encode_example(const DisambExample& ex, const EmbeddingStore& store,
                                     std::size_t triplet_width = 0) {
  EncodedExample e;
  e.text = encode_text_features(ex.tokens, ex.mask, store);
  e.graph = encode_graph_features(ex.graph, store, triplet_width);
  e.label = ex.label;
  return e;
}

// ---------------------------------------------------------------------------
// Splits

struct SplitCounts {
  std::size_t train = 0, dev = 0, test = 0;
};
struct SplitRatios {
  double train = 0.8, dev = 0.1, test = 0.1;
};

struct SplitSpec {
  std::variant<SplitCounts, SplitRatios> sizes = SplitRatios{};
  std::uint64_t seed = 0;
};

/// Record indices per split.
struct SplitManifest {
  std::vector<std::size_t> train, dev, test;
};

inline SplitCounts resolve_counts(const SplitSpec& spec, std::size_t n) {
  if (const auto* c = std::get_if<SplitCounts>(&spec.sizes)) {
    if (c->train + c->dev + c->test > n)
      throw ContractError("split counts " + std::to_string(c->train + c->dev + c->test) + " exceed " +
                          std::to_string(n) + " records");
    return *c;
  }
  const auto& r = std::get<SplitRatios>(spec.sizes);
  if (r.train < 0 || r.dev < 0 || r.test < 0) throw ContractError("split ratios must be non-negative");
  const double total = r.train + r.dev + r.test;
  if (total > 1.0 + 1e-9) throw ContractError("split ratios sum to more than 1");
  const double nd = static_cast<double>(n);
  SplitCounts c{static_cast<std::size_t>(std::floor(r.train * nd)), static_cast<std::size_t>(std::floor(r.dev * nd)),
                0};
  c.test = std::abs(total - 1.0) <= 1e-9 ? n - c.train - c.dev : static_cast<std::size_t>(std::floor(r.test * nd));
  return c;
}

/// Seeded shuffle of the record indices, cut into disjoint train/dev/test.
inline SplitManifest split(const std::vector<std::size_t>& records, const SplitSpec& spec) {
  const SplitCounts c = resolve_counts(spec, records.size());
  std::vector<std::size_t> order = records;
  Rng rng(spec.seed);
  rng.shuffle(order);
  SplitManifest m;
  auto take = [&](std::size_t begin, std::size_t count) {
    return std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                    order.begin() + static_cast<std::ptrdiff_t>(begin + count));
  };
  m.train = take(0, c.train);
  m.dev = take(c.train, c.dev);
  m.test = take(c.train + c.dev, c.test);
  return m;
}

/// Splits already-expanded examples, keeping both examples of a record together.
struct ExampleSplits {
  std::vector<DisambExample> train, dev, test;
};

inline ExampleSplits split(const std::vector<DisambExample>& examples, const SplitSpec& spec) {
  std::vector<std::size_t> records;
  for (const auto& e : examples) records.push_back(e.record);
  std::sort(records.begin(), records.end());
  records.erase(std::unique(records.begin(), records.end()), records.end());
  const SplitManifest m = split(records, spec);
  std::map<std::size_t, int> where;
  for (auto r : m.train) where[r] = 0;
  for (auto r : m.dev) where[r] = 1;
  for (auto r : m.test) where[r] = 2;
  ExampleSplits out;
  for (const auto& e : examples) {
    auto it = where.find(e.record);
    if (it == where.end()) continue;
    (it->second == 0 ? out.train : it->second == 1 ? out.dev : out.test).push_back(e);
  }
  return out;
}

inline nlohmann::json manifest_to_json(const SplitManifest& m) {
  return {{"train", m.train}, {"dev", m.dev}, {"test", m.test}};
}

inline SplitManifest manifest_from_json(const nlohmann::json& j) {
  try {
    return {j.at("train").get<std::vector<std::size_t>>(), j.at("dev").get<std::vector<std::size_t>>(),
            j.at("test").get<std::vector<std::size_t>>()};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("split manifest: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Build

struct BuildReport {
  std::size_t records_read = 0;
  std::size_t invalid_lines = 0;
  std::size_t kept = 0;
  std::map<std::string, std::size_t> dropped;  // reason -> count
  std::size_t train = 0, dev = 0, test = 0;    // examples

  nlohmann::json to_json() const {
    return {{"records_read", records_read}, {"invalid_lines", invalid_lines},
            {"kept", kept},                 {"dropped", dropped},
            {"examples", {{"train", train}, {"dev", dev}, {"test", test}}}};
  }
};

struct BuiltDataset {
  std::vector<DisambRecord> records;  // kept records, wrong ids resolved
  SplitManifest manifest;             // indices into `records`
  BuildReport report;
};

/// Resolves negatives where missing, drops unusable records with a reason and
/// splits the survivors.
inline BuiltDataset build_dataset(const LoadResult& loaded, const GraphStore& graphs, const AliasIndex* pool,
                                  std::size_t hops, const SplitSpec& spec) {
  BuiltDataset out;
  out.report.records_read = loaded.records.size() + loaded.invalid_lines;
  out.report.invalid_lines = loaded.invalid_lines;
  for (const auto& raw : loaded.records) {
    DisambRecord r = raw;
    try {
      if (r.wrong_id.empty()) {
        if (!pool) throw NoNegative("record has no wrong id and no alias index was given");
        r.wrong_id = select_negative(r.entity, r.correct_id, *pool, graphs);
      }
      if (!graphs.contains(r.correct_id) || !graphs.contains(r.wrong_id)) {
        ++out.report.dropped["missing_graph"];
        continue;
      }
      expand_to_examples(r, out.records.size(), graphs, hops);
    } catch (const MentionNotFound&) {
      ++out.report.dropped["mention_not_found"];
      continue;
    } catch (const NoNegative&) {
      ++out.report.dropped["no_negative"];
      continue;
    } catch (const ContractError&) {
      ++out.report.dropped["trivial_graph"];
      continue;
    }
    out.records.push_back(std::move(r));
  }
  out.report.kept = out.records.size();
  std::vector<std::size_t> idx(out.records.size());
  std::iota(idx.begin(), idx.end(), 0);
  out.manifest = split(idx, spec);
  out.report.train = 2 * out.manifest.train.size();
  out.report.dev = 2 * out.manifest.dev.size();
  out.report.test = 2 * out.manifest.test.size();
  return out;
}

}  // namespace ned
