#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ned/dataset.hpp"
#include "ned/embedding.hpp"
#include "ned/features.hpp"
#include "ned/gradcheck.hpp"
#include "ned/graph.hpp"
#include "ned/models.hpp"
#include "ned/random.hpp"
#include "ned/text_encoder.hpp"

namespace ned {

/// Five-token sentence and a three-edge graph over a random vocabulary.
struct ToyProblem {
  EmbeddingStore store;
  EncodedExample example;
};

inline ToyProblem make_toy_problem(std::size_t dimension, std::uint64_t seed) {
  Rng rng(seed);
  ToyProblem p{EmbeddingStore(dimension), {}};
  for (const char* w : {"the", "comic", "hero", "captain", "marvel", "appears", "character", "instance", "of",
                        "creator", "publisher", "fawcett"}) {
    std::vector<double> v(dimension);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    p.store.insert(w, std::move(v));
  }
  KnowledgeGraph g("Captain Marvel", "Captain Marvel");
  g.add_node("character", "character");
  g.add_node("Fawcett", "Fawcett");
  g.add_edge("Captain Marvel", "instance of", "character");
  g.add_edge("Captain Marvel", "publisher", "Fawcett");
  g.add_edge("character", "creator", "Fawcett");
  const std::vector<std::string> tokens = {"The", "comic", "hero", "Captain", "Marvel"};
  p.example.text = encode_text_features(tokens, locate_mention(tokens, "Captain Marvel"), p.store);
  p.example.graph = encode_graph_features(g, p.store);
  p.example.label = 1;
  return p;
}

/// Gradient check of the example loss against every parameter tensor, with
/// every bias redrawn from (0.1, 0.5). The
/// parameter-free distance baseline is checked against its input features.
inline std::vector<GradCheckReport> check_model_gradients(const ModelConfig& config, std::uint64_t seed,
                                                          GradCheckOptions opts = {}) {
  ToyProblem toy = make_toy_problem(config.embedding_dim, seed);
  Rng rng(seed + 1);
  Model model = Model::initialized(config, rng);
  for (auto& [name, t] : model.params().entries())
    if (t.rank() == 1)
      for (double& b : t.mutable_values()) b = rng.uniform(0.1, 0.5);
  EncodedExample& ex = toy.example;

  if (config.arch == Arch::VectorDistance) {
    Tensor text = Tensor::from(ex.text.token_vectors.shape(),
                               {ex.text.token_vectors.values().begin(), ex.text.token_vectors.values().end()}, true);
    Tensor nodes = Tensor::from(ex.graph.nodes.shape(),
                                {ex.graph.nodes.values().begin(), ex.graph.nodes.values().end()}, true);
    auto f = [&] { return centroid_distance(reduce_mean(text, 0), encode_centroid(nodes)); };
    return grad_check_all(f, {{"text.tokens", text}, {"graph.nodes", nodes}}, opts);
  }

  std::vector<NamedTensor> inputs;
  for (const auto& [name, t] : model.params().entries()) inputs.push_back({name, t});
  auto f = [&] { return binary_cross_entropy(model.probability(ex, Mode::Eval), ex.label); };
  return grad_check_all(f, inputs, opts);
}

}  // namespace ned
