#pragma once

// Generated disambiguation corpora with a random vocabulary. Every record has
// an ambiguous name shared by two items of different types; the text carries
// context words of the correct item's type.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "ned/dataset.hpp"
#include "ned/embedding.hpp"
#include "ned/errors.hpp"
#include "ned/graph.hpp"
#include "ned/random.hpp"

namespace ned {

struct SyntheticOptions {
  std::size_t records = 500;
  std::size_t dimension = 16;
  std::size_t types = 6;
  std::size_t context_words_per_type = 3;
  std::size_t noise_words = 30;
  std::size_t fillers_per_item = 2;
  std::size_t text_length = 7;
  std::size_t context_in_text = 2;
  /// Relative noise of context word vectors around their type word's vector.
  /// Negative values draw them independently.
  double context_noise = 0.5;
  /// Distinct ambiguous names; records cycle through them. 0 gives every
  /// record its own name.
  std::size_t names = 0;
  /// When true both items of a name carry the same node set: each states its
  /// own type with "instance of" and the other with "different from". When
  /// false each item mentions only its own type.
  bool shared_nodes = true;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  EmbeddingStore embeddings;
  GraphStore graphs;
  AliasIndex aliases;
  std::vector<DisambRecord> records;

  void write(const std::string& dir) const;
};

namespace detail {

inline std::vector<double> random_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  const double s = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double& x : v) x = rng.normal() * s;
  return v;
}

}  // namespace detail

inline SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& o) {
  if (o.types < 2) throw ContractError("synthetic corpus needs at least two types");
  if (o.text_length < o.context_in_text + 1) throw ContractError("synthetic text too short for its context words");
  Rng rng(o.seed);
  SyntheticCorpus c{EmbeddingStore(o.dimension, true), {}, {}, {}};

  auto word = [&](const std::string& w) {
    if (!c.embeddings.contains(w)) c.embeddings.insert(w, detail::random_vector(rng, o.dimension));
    return w;
  };

  const std::vector<std::string> relations = {word("instance") + " " + word("of"),
                                              word("different") + " " + word("from")};
  const std::vector<std::string> filler_relations = {word("related") + " " + word("to"),
                                                     word("part") + " " + word("of"),
                                                     word("located") + " " + word("in")};
  std::vector<std::string> type_labels;
  std::vector<std::vector<std::string>> context(o.types);
  for (std::size_t t = 0; t < o.types; ++t) {
    type_labels.push_back(word("type" + std::to_string(t)));
    const std::vector<double> centre = c.embeddings.lookup(type_labels.back());
    for (std::size_t k = 0; k < o.context_words_per_type; ++k) {
      const std::string w = "ctx" + std::to_string(t) + "w" + std::to_string(k);
      std::vector<double> v = detail::random_vector(rng, o.dimension);
      if (o.context_noise >= 0.0)
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = centre[i] + o.context_noise * v[i];
      c.embeddings.insert(w, std::move(v));
      context[t].push_back(w);
    }
  }
  std::vector<std::string> noise;
  for (std::size_t k = 0; k < o.noise_words; ++k) noise.push_back(word("noise" + std::to_string(k)));
  std::vector<std::string> fillers;
  for (std::size_t k = 0; k < 4 * o.noise_words; ++k) fillers.push_back(word("thing" + std::to_string(k)));

  for (std::size_t r = 0; r < o.records; ++r) {
    const std::string name = word("name" + std::to_string(o.names ? r % o.names : r));
    const std::size_t ta = rng.below(o.types);
    std::size_t tb = rng.below(o.types - 1);
    if (tb >= ta) ++tb;

    std::vector<std::array<std::string, 3>> shared;
    for (std::size_t k = 0; k < o.fillers_per_item; ++k)
      shared.push_back({name, filler_relations[rng.below(filler_relations.size())],
                        fillers[rng.below(fillers.size())]});

    auto make_item = [&](std::size_t own, std::size_t other, const std::string& id) {
      ItemRecord item{id, name, {}, shared};
      item.triplets.push_back({name, relations[0], type_labels[own]});
      if (o.shared_nodes) item.triplets.push_back({name, relations[1], type_labels[other]});
      rng.shuffle(item.triplets);
      return item;
    };
    const std::string id_a = "Q" + std::to_string(2 * r + 1);
    const std::string id_b = "Q" + std::to_string(2 * r + 2);
    c.graphs.add(make_item(ta, tb, id_a));
    c.graphs.add(make_item(tb, ta, id_b));
    c.aliases.add(name, id_a);
    c.aliases.add(name, id_b);

    const bool a_correct = rng.bernoulli(0.5);
    const std::size_t correct_type = a_correct ? ta : tb;
    std::vector<std::string> words;
    for (std::size_t k = 0; k < o.context_in_text; ++k)
      words.push_back(context[correct_type][rng.below(context[correct_type].size())]);
    while (words.size() + 1 < o.text_length) words.push_back(noise[rng.below(noise.size())]);
    rng.shuffle(words);
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size() + 1)), name);
    std::string text;
    for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
    c.records.push_back({text, name, a_correct ? id_a : id_b, a_correct ? id_b : id_a});
  }
  return c;
}

inline void SyntheticCorpus::write(const std::string& dir) const {
  {
    std::ofstream out(dir + "/embeddings.txt");
    if (!out) throw IoError("cannot write '" + dir + "/embeddings.txt'");
    out.precision(17);
    for (const auto& [token, vec] : embeddings.entries()) {
      out << token;
      for (double x : vec) out << ' ' << x;
      out << '\n';
    }
  }
  {
    std::ofstream out(dir + "/graphs.jsonl");
    if (!out) throw IoError("cannot write '" + dir + "/graphs.jsonl'");
    for (const auto& [id, item] : graphs.items()) out << nlohmann::json(item).dump() << '\n';
  }
  aliases.save(dir + "/aliases.jsonl");
  write_records(dir + "/records.jsonl", records);
}

}  // namespace ned
