#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ned/embedding.hpp"
#include "ned/errors.hpp"
#include "ned/layers.hpp"
#include "ned/tensor.hpp"

namespace ned {

/// Binary per-token weights marking where the mentioned entity sits.
struct MentionMask {
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::size_t ones() const {
    std::size_t n = 0;
    for (double w : weights) n += w != 0.0;
    return n;
  }
};

/// Marks the first contiguous, case-insensitive occurrence of the entity's
/// tokens. Throws MentionNotFound when there is none.
inline MentionMask locate_mention(const std::vector<std::string>& tokens, std::string_view entity) {
  if (tokens.empty()) throw ContractError("locate_mention: empty token list");
  const auto needle = tokenize(entity, true);
  if (needle.empty()) throw MentionNotFound("entity '" + std::string(entity) + "' has no tokens");
  std::vector<std::string> haystack;
  haystack.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto folded = tokenize(t, true);
    haystack.push_back(folded.empty() ? std::string() : folded.front());
  }
  for (std::size_t start = 0; start + needle.size() <= haystack.size(); ++start) {
    bool match = true;
    for (std::size_t j = 0; match && j < needle.size(); ++j) match = haystack[start + j] == needle[j];
    if (match) {
      MentionMask mask{std::vector<double>(tokens.size(), 0.0)};
      for (std::size_t j = 0; j < needle.size(); ++j) mask.weights[start + j] = 1.0;
      return mask;
    }
  }
  throw MentionNotFound("entity '" + std::string(entity) + "' not found in text");
}

struct TextEncoderDims {
  std::size_t embedding = 300;
  std::size_t projection = 50;  // dense layer before the recurrent encoder
  std::size_t memory = 100;     // per direction
  std::size_t output = 150;     // y_text
};

/// Dense pre-projection, bidirectional LSTM, masked average and a ReLU
/// projection down to the text context vector.
struct TextEncoderParams {
  Dense pre;
  BiLstm rnn;
  Dense post;

  static TextEncoderParams create(ParamSet& params, const TextEncoderDims& d) {
    return {Dense::create(params, "text.pre", d.embedding, d.projection),
            BiLstm::create(params, "text.lstm", d.projection, d.memory),
            Dense::create(params, "text.post", 2 * d.memory, d.output)};
  }
};

/// Masked average of the recurrent outputs, normalized by sentence length,
/// before the output projection.
inline Tensor masked_text_average(const TextEncoderParams& p, const Tensor& token_vectors, const MentionMask& mask) {
  if (token_vectors.rank() != 2) throw ShapeError("encode_text: token vectors must be n x d");
  const std::size_t n = token_vectors.dim(0);
  if (mask.size() != n)
    throw ContractError("encode_text: mask has " + std::to_string(mask.size()) + " weights for " +
                        std::to_string(n) + " tokens");
  if (mask.ones() == 0) throw ContractError("encode_text: mention mask is all zero");
  const BiLstmResult rnn = run_bilstm(p.rnn, p.pre(token_vectors));
  std::vector<double> w(mask.weights);
  for (double& x : w) x /= static_cast<double>(n);
  return weighted_sum(Tensor::vector(std::move(w)), rnn.outputs);
}

inline Tensor encode_text(const TextEncoderParams& p, const Tensor& token_vectors, const MentionMask& mask) {
  return relu(p.post(masked_text_average(p, token_vectors, mask)));
}

}  // namespace ned
