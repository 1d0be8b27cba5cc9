#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ned/errors.hpp"
#include "ned/random.hpp"
#include "ned/tensor.hpp"

namespace ned {

/// Ordered, named collection of trainable tensors. Layer structs hold aliases
/// of the same tensors, so overwriting values here updates the model.
class ParamSet {
 public:
  Tensor add(const std::string& name, Shape shape) {
    if (find(name)) throw ContractError("duplicate parameter '" + name + "'");
    Tensor t = Tensor::zeros(std::move(shape), true);
    entries_.emplace_back(name, t);
    return t;
  }

  const Tensor* find(const std::string& name) const {
    for (const auto& [n, t] : entries_)
      if (n == name) return &t;
    return nullptr;
  }

  const Tensor& at(const std::string& name) const {
    const Tensor* t = find(name);
    if (!t) throw ContractError("no parameter named '" + name + "'");
    return *t;
  }

  std::vector<std::pair<std::string, Tensor>>& entries() { return entries_; }
  const std::vector<std::pair<std::string, Tensor>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.second.numel();
    return n;
  }

  void zero_grad() {
    for (auto& e : entries_) e.second.zero_grad();
  }

  /// Matrices get uniform values in +-sqrt(6 / (fan_in + fan_out)); vectors
  /// (biases) start at zero.
  void initialize(Rng& rng) {
    for (auto& [name, t] : entries_) {
      auto v = t.mutable_values();
      if (t.rank() == 2) {
        const double limit = std::sqrt(6.0 / static_cast<double>(t.dim(0) + t.dim(1)));
        for (double& x : v) x = rng.uniform(-limit, limit);
      } else {
        std::fill(v.begin(), v.end(), 0.0);
      }
    }
  }

  void fill(double value) {
    for (auto& e : entries_) {
      auto v = e.second.mutable_values();
      std::fill(v.begin(), v.end(), value);
    }
  }

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

/// y = x W + b, with W stored in x out.
struct Dense {
  Tensor kernel;
  Tensor bias;

  static Dense create(ParamSet& params, const std::string& prefix, std::size_t in, std::size_t out) {
    return {params.add(prefix + ".kernel", {in, out}), params.add(prefix + ".bias", {out})};
  }

  Tensor operator()(const Tensor& x) const { return add(matmul(x, kernel), bias); }
  std::size_t in_dim() const { return kernel.dim(0); }
  std::size_t out_dim() const { return kernel.dim(1); }
};

/// Standard LSTM cell: gates i, f, g, o packed along the last axis of a
/// 4*hidden-wide pre-activation.
struct LstmCell {
  Tensor kernel;     // in x 4H
  Tensor recurrent;  // H x 4H
  Tensor bias;       // 4H

  static LstmCell create(ParamSet& params, const std::string& prefix, std::size_t in, std::size_t hidden) {
    return {params.add(prefix + ".kernel", {in, 4 * hidden}),
            params.add(prefix + ".recurrent", {hidden, 4 * hidden}), params.add(prefix + ".bias", {4 * hidden})};
  }

  std::size_t hidden() const { return recurrent.dim(0); }
};

struct BiLstm {
  LstmCell forward;
  LstmCell backward;

  static BiLstm create(ParamSet& params, const std::string& prefix, std::size_t in, std::size_t hidden) {
    return {LstmCell::create(params, prefix + ".fw", in, hidden),
            LstmCell::create(params, prefix + ".bw", in, hidden)};
  }

  std::size_t hidden() const { return forward.hidden(); }
};

struct BiLstmResult {
  Tensor outputs;      // n x 2H, row t = [forward h_t ; backward h_t]
  Tensor final_state;  // 2H = [forward h_{n-1} ; backward h_0]
};

namespace detail {

// Runs one direction over precomputed input projections (n x 4H). Returns the
// hidden state for each position in sequence order.
inline std::vector<Tensor> run_lstm(const LstmCell& cell, const Tensor& projected, bool reverse) {
  const std::size_t n = projected.dim(0);
  const std::size_t h = cell.hidden();
  Tensor state = Tensor::zeros({h});
  Tensor memory = Tensor::zeros({h});
  std::vector<Tensor> outputs(n);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    const Tensor z = add(row(projected, t), matmul(state, cell.recurrent));
    const Tensor in_gate = sigmoid(slice_last(z, 0, h));
    const Tensor forget_gate = sigmoid(slice_last(z, h, 2 * h));
    const Tensor candidate = tanh(slice_last(z, 2 * h, 3 * h));
    const Tensor out_gate = sigmoid(slice_last(z, 3 * h, 4 * h));
    memory = add(mul(forget_gate, memory), mul(in_gate, candidate));
    state = mul(out_gate, tanh(memory));
    outputs[t] = state;
  }
  return outputs;
}

}  // namespace detail

/// Bidirectional LSTM over the rows of `inputs` (n x in) with zero initial
/// states in both directions.
inline BiLstmResult run_bilstm(const BiLstm& rnn, const Tensor& inputs) {
  if (inputs.rank() != 2 || inputs.dim(0) == 0)
    throw ShapeError("run_bilstm: expected a non-empty n x d matrix, got " + shape_str(inputs.shape()));
  const Tensor fw_proj = add(matmul(inputs, rnn.forward.kernel), rnn.forward.bias);
  const Tensor bw_proj = add(matmul(inputs, rnn.backward.kernel), rnn.backward.bias);
  const auto fw = detail::run_lstm(rnn.forward, fw_proj, false);
  const auto bw = detail::run_lstm(rnn.backward, bw_proj, true);
  std::vector<Tensor> rows;
  rows.reserve(fw.size());
  for (std::size_t t = 0; t < fw.size(); ++t) rows.push_back(concat({fw[t], bw[t]}));
  return {stack_rows(rows), concat({fw.back(), bw.front()})};
}

}  // namespace ned
