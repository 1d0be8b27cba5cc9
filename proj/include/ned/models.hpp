#pragma once

// The nine consistency models: five baselines and four graph encoders, all
// sharing the text encoder and the classification head where applicable.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ned/errors.hpp"
#include "ned/features.hpp"
#include "ned/layers.hpp"
#include "ned/random.hpp"
#include "ned/tensor.hpp"
#include "ned/text_encoder.hpp"

namespace ned {

enum class Arch {
  VectorDistance,
  FeedforwardAverages,
  Centroid,
  LinearAttention,
  RnnNodes,
  RnnTriplets,
  RnnTripletsAttention,
  Gcn,
  GcnAttention,
};

inline constexpr std::array<Arch, 9> kAllArchs = {
    Arch::VectorDistance, Arch::FeedforwardAverages, Arch::Centroid,
    Arch::LinearAttention, Arch::RnnNodes, Arch::RnnTriplets,
    Arch::RnnTripletsAttention, Arch::Gcn, Arch::GcnAttention};

inline constexpr std::string_view arch_tag(Arch a) {
  switch (a) {
    case Arch::VectorDistance: return "vector-distance";
    case Arch::FeedforwardAverages: return "feedforward-averages";
    case Arch::Centroid: return "centroid";
    case Arch::LinearAttention: return "linear-attention";
    case Arch::RnnNodes: return "rnn-nodes";
    case Arch::RnnTriplets: return "rnn-triplets";
    case Arch::RnnTripletsAttention: return "rnn-triplets-attention";
    case Arch::Gcn: return "gcn";
    case Arch::GcnAttention: return "gcn-attention";
  }
  return "?";
}

/// Row label used in rendered result tables.
inline constexpr std::string_view arch_description(Arch a) {
  switch (a) {
    case Arch::VectorDistance: return "Vector distance baseline";
    case Arch::FeedforwardAverages: return "Feedforward of averages";
    case Arch::Centroid: return "Text LSTM + Centroid";
    case Arch::LinearAttention: return "Text LSTM + Linear attention";
    case Arch::RnnNodes: return "Text LSTM + RNN of nodes";
    case Arch::RnnTriplets: return "Text LSTM + RNN of triplets";
    case Arch::RnnTripletsAttention: return "Text LSTM + RNN of triplets with attention";
    case Arch::Gcn: return "Text LSTM + GCN";
    case Arch::GcnAttention: return "Text LSTM + GCN with attention";
  }
  return "?";
}

inline std::optional<Arch> parse_arch(std::string_view tag) {
  for (Arch a : kAllArchs)
    if (arch_tag(a) == tag) return a;
  return std::nullopt;
}

inline bool uses_text_encoder(Arch a) { return a != Arch::VectorDistance && a != Arch::FeedforwardAverages; }
inline bool is_trainable(Arch a) { return a != Arch::VectorDistance; }
inline bool uses_gcn(Arch a) { return a == Arch::Gcn || a == Arch::GcnAttention; }

/// Whether a GCN node gathers messages from the nodes it points to or from
/// the nodes pointing at it.
enum class GcnAggregation { Outgoing, Incoming };

enum class Mode { Train, Eval };

inline constexpr std::size_t kOutputSize = 2;
inline constexpr std::size_t kConsistentClass = 1;

struct ModelConfig {
  Arch arch = Arch::RnnTriplets;
  std::size_t embedding_dim = 300;
  std::size_t text_projection = 50;
  std::size_t text_memory = 100;
  std::size_t text_dim = 150;
  std::size_t hidden = 250;
  std::size_t graph_dim = 250;
  std::size_t graph_projection = 50;
  std::size_t graph_memory = 100;
  std::size_t attention_dim = 250;
  std::size_t gcn_dim = 250;
  std::size_t gcn_layers = 4;
  std::size_t triplet_width = 0;  // 0 = 3 x embedding_dim
  double keep_prob = 0.9;
  GcnAggregation aggregation = GcnAggregation::Outgoing;
  std::optional<double> distance_threshold;

  /// Same architecture with every internal width set to `width`.
  static ModelConfig reduced(Arch arch, std::size_t embedding, std::size_t width) {
    ModelConfig c;
    c.arch = arch;
    c.embedding_dim = embedding;
    c.text_projection = c.text_memory = c.text_dim = width;
    c.hidden = c.graph_dim = c.graph_projection = c.graph_memory = width;
    c.attention_dim = c.gcn_dim = width;
    return c;
  }

  std::size_t triplet_input() const { return triplet_width ? triplet_width : 3 * embedding_dim; }

  TextEncoderDims text_dims() const { return {embedding_dim, text_projection, text_memory, text_dim}; }

  /// Width of y_graph for this architecture.
  std::size_t graph_output() const {
    switch (arch) {
      case Arch::VectorDistance:
      case Arch::FeedforwardAverages:
      case Arch::Centroid:
      case Arch::LinearAttention: return embedding_dim;
      case Arch::RnnTripletsAttention: return 2 * graph_memory;
      default: return graph_dim;
    }
  }

  std::size_t text_output() const { return arch == Arch::FeedforwardAverages ? embedding_dim : text_dim; }

  void validate() const {
    for (std::size_t d : {embedding_dim, text_projection, text_memory, text_dim, hidden, graph_dim,
                          graph_projection, graph_memory, attention_dim, gcn_dim, gcn_layers})
      if (d == 0) throw ContractError("model dimensions must be positive");
    if (triplet_width != 0 && triplet_width < 3 * embedding_dim)
      throw ContractError("triplet width must be 0 or at least 3 x embedding dim");
    if (!(keep_prob > 0.0 && keep_prob <= 1.0)) throw ContractError("keep probability must lie in (0, 1]");
    if (distance_threshold && arch != Arch::VectorDistance)
      throw ContractError("distance threshold only applies to vector-distance");
  }
};

// ---------------------------------------------------------------------------
// Parameter groups

struct HeadParams {
  Dense hidden;
  Dense out;

  static HeadParams create(ParamSet& p, std::size_t in, std::size_t hidden) {
    return {Dense::create(p, "head.hidden", in, hidden), Dense::create(p, "head.out", hidden, kOutputSize)};
  }
};

/// Scalar attention score relu(W_items item + W_text y_text + b) per item.
struct ScoreParams {
  Tensor item_weights;  // item_dim x 1
  Tensor text_weights;  // text_dim x 1
  Tensor bias;          // 1

  static ScoreParams create(ParamSet& p, const std::string& prefix, std::size_t item_dim, std::size_t text_dim) {
    return {p.add(prefix + ".items", {item_dim, 1}), p.add(prefix + ".text", {text_dim, 1}),
            p.add(prefix + ".bias", {1})};
  }
};

struct RnnGraphParams {
  std::optional<Dense> pre;  // triplet models only
  BiLstm rnn;
  std::optional<Dense> out;  // absent for the attention variant
  std::optional<ScoreParams> attention;
};

struct GcnAttentionLayer {
  Tensor graph_weights;  // layer_in x d
  Tensor text_weights;   // text_dim x d
  Tensor bias;           // d, shared by every node column
};

struct GcnParams {
  std::vector<Dense> layers;
  std::vector<GcnAttentionLayer> attention;  // empty for the plain GCN
  Dense readout;
};

// ---------------------------------------------------------------------------
// Encoders

struct AttentionResult {
  Tensor y_graph;
  Tensor weights;  // softmax-normalized
};

/// Euclidean distance between the text and graph centroids.
inline Tensor centroid_distance(const Tensor& text_centroid, const Tensor& graph_centroid) {
  if (text_centroid.numel() != graph_centroid.numel())
    throw ShapeError("centroid_distance: " + shape_str(text_centroid.shape()) + " vs " +
                     shape_str(graph_centroid.shape()));
  return l2_norm(sub(text_centroid, graph_centroid));
}

/// Consistent iff the centroid distance is strictly below `threshold`.
inline bool baseline_vector_distance(const Tensor& text_centroid, const Tensor& graph_centroid, double threshold) {
  return centroid_distance(text_centroid, graph_centroid).item() < threshold;
}

inline Tensor encode_centroid(const Tensor& node_vectors) { return reduce_mean(node_vectors, 0); }

namespace detail {

// (1/N) sum_i softmax(c)_i item_i with c_i = relu(W_items item_i + W_text y_text + b)
inline AttentionResult attend(const ScoreParams& p, const Tensor& items, const Tensor& y_text) {
  const std::size_t n = items.dim(0);
  const Tensor text_term = add(matmul(y_text, p.text_weights), p.bias);
  const Tensor scores = relu(add(matmul(items, p.item_weights), text_term));
  const Tensor weights = softmax(reshape(scores, {n}));
  return {scale(weighted_sum(weights, items), 1.0 / static_cast<double>(n)), weights};
}

}  // namespace detail

inline AttentionResult encode_linear_attention(const ScoreParams& p, const Tensor& node_vectors,
                                               const Tensor& y_text) {
  if (node_vectors.rank() != 2) throw ShapeError("linear attention: node vectors must be n x d");
  return detail::attend(p, node_vectors, y_text);
}

inline Tensor encode_rnn_nodes(const RnnGraphParams& p, const Tensor& node_vectors) {
  if (!node_vectors || node_vectors.rank() != 2 || node_vectors.dim(0) == 0)
    throw ContractError("rnn of nodes needs at least one node");
  return (*p.out)(run_bilstm(p.rnn, node_vectors).final_state);
}

inline Tensor encode_rnn_triplets(const RnnGraphParams& p, const Tensor& triplet_vectors) {
  if (!triplet_vectors) throw ContractError("rnn of triplets needs at least one triplet");
  return (*p.out)(run_bilstm(p.rnn, (*p.pre)(triplet_vectors)).final_state);
}

inline AttentionResult encode_rnn_triplets_attention(const RnnGraphParams& p, const Tensor& triplet_vectors,
                                                     const Tensor& y_text) {
  if (!triplet_vectors) throw ContractError("rnn of triplets needs at least one triplet");
  const Tensor z = run_bilstm(p.rnn, (*p.pre)(triplet_vectors)).outputs;
  return detail::attend(*p.attention, z, y_text);
}

/// I + A (or I + A^T for incoming aggregation) as a constant matrix; in
/// training mode each edge survives independently with probability `keep`.
inline Tensor propagation_mask(const AdjacencyMatrix& a, GcnAggregation aggregation, Mode mode, double keep,
                               Rng* rng) {
  const std::size_t n = a.size();
  std::vector<double> m(n * n, 0.0);
  const bool drop = mode == Mode::Train && keep < 1.0;
  if (drop && !rng) throw ContractError("edge dropout needs a random generator");
  for (std::size_t v = 0; v < n; ++v) {
    m[v * n + v] = 1.0;
    for (std::size_t u = 0; u < n; ++u) {
      const bool edge = aggregation == GcnAggregation::Outgoing ? a(v, u) : a(u, v);
      if (!edge) continue;
      if (drop && !rng->bernoulli(keep)) continue;
      m[v * n + u] += 1.0;
    }
  }
  return Tensor::matrix(n, n, std::move(m));
}

/// h_v' = relu(sum_{u in N(v)} (W h_u + b)) for each layer, read out at the
/// central node.
inline Tensor encode_gcn(const GcnParams& p, const Tensor& node_vectors, const Tensor& mask, std::size_t central) {
  Tensor h = node_vectors;
  for (const Dense& layer : p.layers) h = relu(matmul(mask, layer(h)));
  return p.readout(row(h, central));
}

struct GcnAttentionResult {
  Tensor y_graph;
  std::vector<Tensor> alphas;  // one n x n matrix per layer
  std::vector<Tensor> scores;  // softmax(E) before masking
};

/// GCN whose messages are weighted by alpha = mask (.) softmax(B^T B), with
/// B = relu(W_graph H + W_text Q + C) recomputed from each layer's input.
inline GcnAttentionResult encode_gcn_attention(const GcnParams& p, const Tensor& node_vectors, const Tensor& mask,
                                               std::size_t central, const Tensor& y_text) {
  GcnAttentionResult result;
  Tensor h = node_vectors;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    const GcnAttentionLayer& att = p.attention[k];
    const Tensor text_term = add(matmul(y_text, att.text_weights), att.bias);
    const Tensor b_t = relu(add(matmul(h, att.graph_weights), text_term));  // n x d, row u = column u of B
    const Tensor scores = softmax(matmul(b_t, transpose(b_t)));
    const Tensor alpha = mul(scores, mask);
    h = relu(matmul(alpha, p.layers[k](h)));
    result.scores.push_back(scores);
    result.alphas.push_back(alpha);
  }
  result.y_graph = p.readout(row(h, central));
  return result;
}

inline Tensor head_logits(const HeadParams& head, const Tensor& y_text, const Tensor& y_graph) {
  return head.out(relu(head.hidden(concat({y_text, y_graph}))));
}

/// Probability of the "consistent" class as a scalar tensor.
inline Tensor classify(const HeadParams& head, const Tensor& y_text, const Tensor& y_graph) {
  return element(softmax(head_logits(head, y_text, y_graph)), kConsistentClass);
}

/// Logits of the feedforward-of-averages baseline.
inline Tensor encode_feedforward_averages(const HeadParams& head, const Tensor& text_centroid,
                                          const Tensor& graph_centroid) {
  return head_logits(head, text_centroid, graph_centroid);
}

// ---------------------------------------------------------------------------

/// One architecture's parameters plus its forward pass. Move-only: the layer
/// structs alias tensors owned through the ParamSet, use clone() to copy.
class Model {
 public:
  explicit Model(ModelConfig config) : config_(std::move(config)) {
    config_.validate();
    build();
  }

  static Model initialized(ModelConfig config, Rng& rng) {
    Model m(std::move(config));
    m.params_.initialize(rng);
    return m;
  }

  Model(Model&&) = default;
  Model& operator=(Model&&) = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  Model clone() const {
    Model m(config_);
    m.copy_values_from(*this);
    return m;
  }

  void copy_values_from(const Model& other) {
    if (other.params_.size() != params_.size()) throw ContractError("copy_values_from: parameter sets differ");
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto dst = params_.entries()[i].second.mutable_values();
      auto src = other.params_.entries()[i].second.values();
      std::copy(src.begin(), src.end(), dst.begin());
    }
    config_.distance_threshold = other.config_.distance_threshold;
  }

  const ModelConfig& config() const { return config_; }
  Arch arch() const { return config_.arch; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  void set_threshold(double d) {
    if (config_.arch != Arch::VectorDistance) throw ContractError("only vector-distance has a threshold");
    config_.distance_threshold = d;
  }

  const TextEncoderParams& text_params() const { return *text_; }
  const HeadParams& head_params() const { return *head_; }
  const RnnGraphParams& rnn_params() const { return *rnn_; }
  const GcnParams& gcn_params() const { return *gcn_; }
  const ScoreParams& node_attention_params() const { return *node_attention_; }

  Tensor encode_text(const EncodedExample& ex) const {
    return ned::encode_text(*text_, ex.text.token_vectors, ex.text.mask);
  }

  /// y_graph for the graph-encoding architectures.
  Tensor encode_graph(const EncodedExample& ex, const Tensor& y_text, Mode mode, Rng* rng) const {
    const GraphFeatures& g = ex.graph;
    switch (config_.arch) {
      case Arch::Centroid: return encode_centroid(g.nodes);
      case Arch::LinearAttention: return encode_linear_attention(*node_attention_, g.nodes, y_text).y_graph;
      case Arch::RnnNodes: return encode_rnn_nodes(*rnn_, g.nodes);
      case Arch::RnnTriplets: return encode_rnn_triplets(*rnn_, g.triplets);
      case Arch::RnnTripletsAttention: return encode_rnn_triplets_attention(*rnn_, g.triplets, y_text).y_graph;
      case Arch::Gcn:
        return encode_gcn(*gcn_, g.reified_nodes, gcn_mask(g, mode, rng), g.reified_central);
      case Arch::GcnAttention:
        return encode_gcn_attention(*gcn_, g.reified_nodes, gcn_mask(g, mode, rng), g.reified_central, y_text)
            .y_graph;
      default: throw ContractError(std::string(arch_tag(config_.arch)) + " has no graph encoder");
    }
  }

  Tensor gcn_mask(const GraphFeatures& g, Mode mode, Rng* rng) const {
    return propagation_mask(g.reified_adjacency, config_.aggregation, mode, config_.keep_prob, rng);
  }

  /// Logits over {inconsistent, consistent}.
  Tensor logits(const EncodedExample& ex, Mode mode = Mode::Eval, Rng* rng = nullptr) const {
    if (config_.arch == Arch::VectorDistance) throw ContractError("vector-distance has no logits");
    if (config_.arch == Arch::FeedforwardAverages)
      return encode_feedforward_averages(*head_, ex.text.centroid, encode_centroid(ex.graph.nodes));
    const Tensor y_text = encode_text(ex);
    return head_logits(*head_, y_text, encode_graph(ex, y_text, mode, rng));
  }

  Tensor probability(const EncodedExample& ex, Mode mode = Mode::Eval, Rng* rng = nullptr) const {
    return element(softmax(logits(ex, mode, rng)), kConsistentClass);
  }

  double distance(const EncodedExample& ex) const {
    return centroid_distance(ex.text.centroid, encode_centroid(ex.graph.nodes)).item();
  }

  bool predict(const EncodedExample& ex) const {
    if (config_.arch == Arch::VectorDistance) {
      if (!config_.distance_threshold) throw ContractError("vector-distance model has no fitted threshold");
      return distance(ex) < *config_.distance_threshold;
    }
    return probability(ex).item() >= 0.5;
  }

 private:
  void build() {
    const ModelConfig& c = config_;
    if (uses_text_encoder(c.arch)) text_ = TextEncoderParams::create(params_, c.text_dims());
    switch (c.arch) {
      case Arch::VectorDistance:
      case Arch::FeedforwardAverages:
      case Arch::Centroid: break;
      case Arch::LinearAttention:
        node_attention_ = ScoreParams::create(params_, "attention", c.embedding_dim, c.text_dim);
        break;
      case Arch::RnnNodes: {
        RnnGraphParams p{std::nullopt, BiLstm::create(params_, "graph.lstm", c.embedding_dim, c.graph_memory),
                         std::nullopt, std::nullopt};
        p.out = Dense::create(params_, "graph.out", 2 * c.graph_memory, c.graph_dim);
        rnn_ = std::move(p);
        break;
      }
      case Arch::RnnTriplets:
      case Arch::RnnTripletsAttention: {
        RnnGraphParams p;
        p.pre = Dense::create(params_, "graph.pre", c.triplet_input(), c.graph_projection);
        p.rnn = BiLstm::create(params_, "graph.lstm", c.graph_projection, c.graph_memory);
        if (c.arch == Arch::RnnTriplets)
          p.out = Dense::create(params_, "graph.out", 2 * c.graph_memory, c.graph_dim);
        else
          p.attention = ScoreParams::create(params_, "attention", 2 * c.graph_memory, c.text_dim);
        rnn_ = std::move(p);
        break;
      }
      case Arch::Gcn:
      case Arch::GcnAttention: {
        GcnParams p;
        for (std::size_t k = 0; k < c.gcn_layers; ++k) {
          const std::size_t in = k == 0 ? c.embedding_dim : c.gcn_dim;
          const std::string prefix = "gcn.layer" + std::to_string(k);
          p.layers.push_back(Dense::create(params_, prefix, in, c.gcn_dim));
          if (c.arch == Arch::GcnAttention)
            p.attention.push_back({params_.add(prefix + ".att_graph", {in, c.attention_dim}),
                                   params_.add(prefix + ".att_text", {c.text_dim, c.attention_dim}),
                                   params_.add(prefix + ".att_bias", {c.attention_dim})});
        }
        p.readout = Dense::create(params_, "gcn.readout", c.gcn_dim, c.graph_dim);
        gcn_ = std::move(p);
        break;
      }
    }
    if (is_trainable(c.arch)) head_ = HeadParams::create(params_, c.text_output() + c.graph_output(), c.hidden);
  }

  ModelConfig config_;
  ParamSet params_;
  std::optional<TextEncoderParams> text_;
  std::optional<HeadParams> head_;
  std::optional<ScoreParams> node_attention_;
  std::optional<RnnGraphParams> rnn_;
  std::optional<GcnParams> gcn_;
};

}  // namespace ned
