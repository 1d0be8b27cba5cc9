#pragma once

// Constant model inputs derived once per example: token vectors, mention mask,
// node/edge centroids, triplet rows and the reified adjacency.

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ned/embedding.hpp"
#include "ned/graph.hpp"
#include "ned/tensor.hpp"
#include "ned/text_encoder.hpp"

namespace ned {

struct TextFeatures {
  std::vector<std::string> tokens;
  Tensor token_vectors;  // n x D
  MentionMask mask;
  Tensor centroid;  // D, mean of all token vectors
};

struct GraphFeatures {
  Tensor nodes;  // n x D in BFS order
  std::size_t central = 0;
  Tensor triplets;  // m x W, absent when the graph has no edges
  std::size_t triplet_count = 0;
  Tensor reified_nodes;  // (n + m) x D in BFS order of the reified graph
  AdjacencyMatrix reified_adjacency;
  std::size_t reified_central = 0;
};

struct EncodedExample {
  TextFeatures text;
  GraphFeatures graph;
  int label = 0;  // 1 = consistent
  std::size_t id = 0;
};

inline TextFeatures encode_text_features(std::vector<std::string> tokens, MentionMask mask,
                                         const EmbeddingStore& store) {
  TextFeatures f;
  f.token_vectors = store.embed_tokens(tokens);
  f.centroid = reduce_mean(f.token_vectors, 0);
  f.tokens = std::move(tokens);
  f.mask = std::move(mask);
  return f;
}

namespace detail {

inline Tensor label_matrix(const KnowledgeGraph& g, const std::vector<std::string>& order,
                           const EmbeddingStore& store) {
  std::vector<double> values;
  values.reserve(order.size() * store.dimension());
  for (const auto& id : order) {
    const auto v = store.embed_label(g.label(id));
    values.insert(values.end(), v.begin(), v.end());
  }
  return Tensor::matrix(order.size(), store.dimension(), std::move(values));
}

}  // namespace detail

/// `triplet_width` of 0 means 3 x D; a larger width zero-pads each row.
inline GraphFeatures encode_graph_features(const KnowledgeGraph& g, const EmbeddingStore& store,
                                           std::size_t triplet_width = 0) {
  const std::size_t d = store.dimension();
  if (triplet_width == 0) triplet_width = 3 * d;
  if (triplet_width < 3 * d)
    throw ContractError("triplet width " + std::to_string(triplet_width) + " is below 3 x " + std::to_string(d));

  GraphFeatures f;
  const auto order = g.bfs_order();
  f.nodes = detail::label_matrix(g, order, store);
  f.central = 0;

  const auto trips = triplets(g);
  f.triplet_count = trips.size();
  if (!trips.empty()) {
    std::unordered_map<std::string, std::vector<double>> cache;
    auto vec = [&](const std::string& label) -> const std::vector<double>& {
      auto it = cache.find(label);
      if (it == cache.end()) it = cache.emplace(label, store.embed_label(label)).first;
      return it->second;
    };
    std::vector<double> values;
    values.reserve(trips.size() * triplet_width);
    for (const auto& t : trips) {
      for (const auto* part : {&vec(g.label(t.source)), &vec(t.relation), &vec(g.label(t.target))})
        values.insert(values.end(), part->begin(), part->end());
      values.insert(values.end(), triplet_width - 3 * d, 0.0);
    }
    f.triplets = Tensor::matrix(trips.size(), triplet_width, std::move(values));
  }

  const KnowledgeGraph reified = reify(g);
  f.reified_adjacency = adjacency(reified);
  f.reified_nodes = detail::label_matrix(reified, f.reified_adjacency.order, store);
  f.reified_central = 0;
  return f;
}

}  // namespace ned
