#pragma once

// Dense row-major tensors with define-by-run reverse-mode differentiation.
//
// Every operation returns a fresh Tensor whose node remembers its parents and
// a closure that pushes the output gradient back into them. Calling
// `backward(loss)` walks that graph once in reverse topological order. The
// graph lives exactly as long as the tensors referencing it, so each forward
// pass builds its own tape.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ned/errors.hpp"

namespace ned {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // sized like value iff requires_grad
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  bool is_leaf() const { return parents.empty(); }
  void ensure_grad() {
    if (requires_grad && grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

// Records the activation pattern of every kink (relu, clamp) evaluated while
// installed. Finite-difference checks compare patterns to detect when a
// perturbation crossed a nondifferentiable point.
struct KinkRecorder {
  std::vector<std::uint8_t> pattern;
  double min_margin = INFINITY;

  void record(double margin) {
    pattern.push_back(margin > 0.0 ? 1 : 0);
    min_margin = std::min(min_margin, std::abs(margin));
  }
};

inline thread_local KinkRecorder* active_kink_recorder = nullptr;

inline void note_kink(double margin) {
  if (active_kink_recorder) active_kink_recorder->record(margin);
}

}  // namespace detail

/// RAII guard installing a KinkRecorder on the current thread.
class ScopedKinkRecorder {
 public:
  ScopedKinkRecorder() : previous_(detail::active_kink_recorder) {
    detail::active_kink_recorder = &recorder_;
  }
  ~ScopedKinkRecorder() { detail::active_kink_recorder = previous_; }
  ScopedKinkRecorder(const ScopedKinkRecorder&) = delete;
  ScopedKinkRecorder& operator=(const ScopedKinkRecorder&) = delete;

  const detail::KinkRecorder& result() const { return recorder_; }

 private:
  detail::KinkRecorder recorder_;
  detail::KinkRecorder* previous_;
};

/// Shared handle to a tensor node. Copies alias the same storage, which is how
/// parameter structs and the ParamSet refer to one set of weights.
class Tensor {
 public:
  Tensor() = default;

  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false) {
    for (std::size_t d : shape)
      if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
    if (shape.empty()) throw ShapeError("tensor needs at least one dimension");
    if (shape_size(shape) != values.size())
      throw ShapeError("value count " + std::to_string(values.size()) + " does not match shape " +
                       shape_str(shape));
    auto node = std::make_shared<detail::Node>();
    node->shape = std::move(shape);
    node->value = std::move(values);
    node->requires_grad = requires_grad;
    node->ensure_grad();
    return Tensor(std::move(node));
  }

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    const std::size_t n = shape_size(shape);
    return from(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
  }

  static Tensor scalar(double v, bool requires_grad = false) { return from({1}, {v}, requires_grad); }

  static Tensor vector(std::vector<double> v, bool requires_grad = false) {
    const std::size_t n = v.size();
    return from({n}, std::move(v), requires_grad);
  }

  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> v,
                       bool requires_grad = false) {
    return from({rows, cols}, std::move(v), requires_grad);
  }

  explicit operator bool() const { return static_cast<bool>(node_); }

  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t numel() const { return node_->value.size(); }

  std::span<const double> values() const { return node_->value; }
  std::span<double> mutable_values() { return node_->value; }
  double operator[](std::size_t i) const { return node_->value[i]; }
  double at(std::size_t r, std::size_t c) const { return node_->value[r * node_->shape.back() + c]; }

  double item() const {
    if (numel() != 1) throw ShapeError("item() on tensor of shape " + shape_str(shape()));
    return node_->value[0];
  }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return node_->requires_grad && node_->grad.size() == numel(); }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() {
    node_->ensure_grad();
    return node_->grad;
  }

  void zero_grad() {
    if (node_->requires_grad) node_->grad.assign(numel(), 0.0);
  }

  bool is_leaf() const { return node_->is_leaf(); }

  /// Copy of the values with no history.
  Tensor detach() const { return from(shape(), node_->value, false); }

  bool same_node(const Tensor& other) const { return node_ == other.node_; }

  // Internal: operation implementations build nodes directly.
  const std::shared_ptr<detail::Node>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

namespace detail {

inline Tensor make_result(Shape shape, std::vector<double> value,
                          std::initializer_list<Tensor> inputs) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  for (const Tensor& t : inputs) {
    if (t.requires_grad()) node->requires_grad = true;
  }
  if (node->requires_grad) {
    for (const Tensor& t : inputs) node->parents.push_back(t.node());
  }
  return Tensor(std::move(node));
}

inline Tensor make_result(Shape shape, std::vector<double> value, const std::vector<Tensor>& inputs) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  for (const Tensor& t : inputs)
    if (t.requires_grad()) node->requires_grad = true;
  if (node->requires_grad)
    for (const Tensor& t : inputs) node->parents.push_back(t.node());
  return Tensor(std::move(node));
}

// Attaches the gradient closure only when the result participates in the tape.
template <typename F>
void on_backward(Tensor& out, F&& fn) {
  if (out.requires_grad()) out.node()->backward = std::forward<F>(fn);
}

inline void accumulate(Node& target, std::size_t i, double g) {
  if (!target.requires_grad) return;
  target.ensure_grad();
  target.grad[i] += g;
}

inline void require_nonempty(const Tensor& t, const char* op) {
  if (!t) throw ContractError(std::string(op) + ": null tensor");
}

enum class Broadcast { None, Left, Right };

inline Broadcast broadcast_kind(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::None;
  if (b.rank() == 1 && a.shape().back() == b.numel()) return Broadcast::Right;
  if (a.rank() == 1 && b.shape().back() == a.numel()) return Broadcast::Left;
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a.shape()) + " and " +
                   shape_str(b.shape()));
}

template <typename Fwd, typename DA, typename DB>
Tensor binary(const Tensor& a, const Tensor& b, const char* op, Fwd fwd, DA da, DB db) {
  require_nonempty(a, op);
  require_nonempty(b, op);
  const Broadcast kind = broadcast_kind(a, b, op);
  const Tensor& big = kind == Broadcast::Left ? b : a;
  const std::size_t n = big.numel();
  const std::size_t na = a.numel();
  const std::size_t nb = b.numel();
  std::vector<double> out(n);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(av[i % na], bv[i % nb]);
  Tensor result = make_result(big.shape(), std::move(out), {a, b});
  on_backward(result, [an = a.node(), bn = b.node(), n, na, nb, da, db](Node& self) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = an->value[i % na];
      const double y = bn->value[i % nb];
      const double g = self.grad[i];
      if (an->requires_grad) accumulate(*an, i % na, g * da(x, y));
      if (bn->requires_grad) accumulate(*bn, i % nb, g * db(x, y));
    }
  });
  return result;
}

template <typename Fwd, typename Deriv>
Tensor unary(const Tensor& a, const char* op, Fwd fwd, Deriv deriv) {
  require_nonempty(a, op);
  const std::size_t n = a.numel();
  std::vector<double> out(n);
  auto av = a.values();
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(av[i]);
  Tensor result = make_result(a.shape(), std::move(out), {a});
  on_backward(result, [an = a.node(), n, deriv](Node& self) {
    for (std::size_t i = 0; i < n; ++i)
      accumulate(*an, i, self.grad[i] * deriv(an->value[i], self.value[i]));
  });
  return result;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise

/// Elementwise sum. `b` may also be a bias vector matching the last axis of
/// `a` (or vice versa).
inline Tensor add(const Tensor& a, const Tensor& b) {
  return detail::binary(
      a, b, "add", [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  return detail::binary(
      a, b, "sub", [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
  return detail::binary(
      a, b, "mul", [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

inline Tensor scale(const Tensor& a, double factor) {
  return detail::unary(
      a, "scale", [factor](double x) { return x * factor; },
      [factor](double, double) { return factor; });
}

/// max(x, 0); the derivative at exactly 0 is 0.
inline Tensor relu(const Tensor& a) {
  return detail::unary(
      a, "relu",
      [](double x) {
        detail::note_kink(x);
        return x > 0.0 || std::isnan(x) ? x : 0.0;
      },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

inline Tensor sigmoid(const Tensor& a) {
  return detail::unary(
      a, "sigmoid",
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

inline Tensor tanh(const Tensor& a) {
  return detail::unary(
      a, "tanh", [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

// ---------------------------------------------------------------------------
// Linear algebra

/// Matrix product. A rank-1 left operand is a row vector and a rank-1 right
/// operand a column vector; the corresponding axis is dropped from the result.
inline Tensor matmul(const Tensor& a, const Tensor& b) {
  detail::require_nonempty(a, "matmul");
  detail::require_nonempty(b, "matmul");
  if (a.rank() > 2 || b.rank() > 2)
    throw ShapeError("matmul: operands must be rank 1 or 2, got " + shape_str(a.shape()) + " and " +
                     shape_str(b.shape()));
  const bool a_vec = a.rank() == 1;
  const bool b_vec = b.rank() == 1;
  const std::size_t m = a_vec ? 1 : a.dim(0);
  const std::size_t k = a_vec ? a.dim(0) : a.dim(1);
  const std::size_t kb = b.dim(0);
  const std::size_t n = b_vec ? 1 : b.dim(1);
  if (k != kb)
    throw ShapeError("matmul: inner dimensions differ for " + shape_str(a.shape()) + " x " +
                     shape_str(b.shape()));

  std::vector<double> out(m * n, 0.0);
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double x = av[i * k + p];
      if (x == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += x * bv[p * n + j];
    }

  Shape shape;
  if (!a_vec) shape.push_back(m);
  if (!b_vec) shape.push_back(n);
  if (shape.empty()) shape.push_back(1);

  Tensor result = detail::make_result(std::move(shape), std::move(out), {a, b});
  detail::on_backward(result, [an = a.node(), bn = b.node(), m, k, n](detail::Node& self) {
    const auto& g = self.grad;
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * bn->value[p * n + j];
          an->grad[i * k + p] += s;
        }
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double x = an->value[i * k + p];
          if (x == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) bn->grad[p * n + j] += x * g[i * n + j];
        }
    }
  });
  return result;
}

inline Tensor transpose(const Tensor& a) {
  detail::require_nonempty(a, "transpose");
  if (a.rank() != 2) throw ShapeError("transpose: expected a matrix, got " + shape_str(a.shape()));
  const std::size_t r = a.dim(0);
  const std::size_t c = a.dim(1);
  std::vector<double> out(r * c);
  auto av = a.values();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  Tensor result = detail::make_result({c, r}, std::move(out), {a});
  detail::on_backward(result, [an = a.node(), r, c](detail::Node& self) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) detail::accumulate(*an, i * c + j, self.grad[j * r + i]);
  });
  return result;
}

// ---------------------------------------------------------------------------
// Shape manipulation

inline Tensor reshape(const Tensor& a, Shape shape) {
  detail::require_nonempty(a, "reshape");
  if (shape_size(shape) != a.numel())
    throw ShapeError("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
  std::vector<double> out(a.values().begin(), a.values().end());
  const std::size_t n = a.numel();
  Tensor result = detail::make_result(std::move(shape), std::move(out), {a});
  detail::on_backward(result, [an = a.node(), n](detail::Node& self) {
    for (std::size_t i = 0; i < n; ++i) detail::accumulate(*an, i, self.grad[i]);
  });
  return result;
}

/// Concatenate along `axis`; all other dimensions must agree.
inline Tensor concat(const std::vector<Tensor>& parts, std::size_t axis = 0) {
  if (parts.empty()) throw ContractError("concat: no tensors given");
  const Shape& first = parts.front().shape();
  if (axis >= first.size())
    throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for " + shape_str(first));
  std::size_t outer = 1;
  std::size_t inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= first[d];
  for (std::size_t d = axis + 1; d < first.size(); ++d) inner *= first[d];

  std::size_t total_axis = 0;
  for (const Tensor& t : parts) {
    detail::require_nonempty(t, "concat");
    const Shape& s = t.shape();
    bool ok = s.size() == first.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d)
      if (d != axis && s[d] != first[d]) ok = false;
    if (!ok)
      throw ShapeError("concat: " + shape_str(s) + " does not align with " + shape_str(first) +
                       " on axis " + std::to_string(axis));
    total_axis += s[axis];
  }

  Shape shape = first;
  shape[axis] = total_axis;
  std::vector<double> out(shape_size(shape));
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const Tensor& t : parts) {
    offsets.push_back(offset);
    const std::size_t width = t.dim(axis) * inner;
    auto v = t.values();
    for (std::size_t o = 0; o < outer; ++o)
      std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(o * width), width,
                  out.begin() + static_cast<std::ptrdiff_t>(o * total_axis * inner + offset * inner));
    offset += t.dim(axis);
  }

  Tensor result = detail::make_result(std::move(shape), std::move(out), parts);
  std::vector<std::shared_ptr<detail::Node>> nodes;
  for (const Tensor& t : parts) nodes.push_back(t.node());
  detail::on_backward(result, [nodes, offsets, outer, inner, total_axis, axis](detail::Node& self) {
    for (std::size_t p = 0; p < nodes.size(); ++p) {
      auto& src = *nodes[p];
      if (!src.requires_grad) continue;
      src.ensure_grad();
      const std::size_t width = src.shape[axis] * inner;
      for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < width; ++i)
          src.grad[o * width + i] += self.grad[o * total_axis * inner + offsets[p] * inner + i];
    }
  });
  return result;
}

/// Row `index` of a matrix, as a vector.
inline Tensor row(const Tensor& a, std::size_t index) {
  detail::require_nonempty(a, "row");
  if (a.rank() != 2) throw ShapeError("row: expected a matrix, got " + shape_str(a.shape()));
  if (index >= a.dim(0))
    throw ShapeError("row: index " + std::to_string(index) + " out of range for " + shape_str(a.shape()));
  const std::size_t c = a.dim(1);
  std::vector<double> out(a.values().begin() + static_cast<std::ptrdiff_t>(index * c),
                          a.values().begin() + static_cast<std::ptrdiff_t>((index + 1) * c));
  Tensor result = detail::make_result({c}, std::move(out), {a});
  detail::on_backward(result, [an = a.node(), index, c](detail::Node& self) {
    for (std::size_t j = 0; j < c; ++j) detail::accumulate(*an, index * c + j, self.grad[j]);
  });
  return result;
}

/// Stack equally sized vectors into an n x d matrix.
inline Tensor stack_rows(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw ContractError("stack_rows: no rows given");
  std::vector<Tensor> as_rows;
  as_rows.reserve(rows.size());
  for (const Tensor& r : rows) {
    if (r.rank() != 1) throw ShapeError("stack_rows: expected vectors, got " + shape_str(r.shape()));
    as_rows.push_back(reshape(r, {1, r.numel()}));
  }
  return concat(as_rows, 0);
}

/// Elements [begin, end) along the last axis.
inline Tensor slice_last(const Tensor& a, std::size_t begin, std::size_t end) {
  detail::require_nonempty(a, "slice");
  const std::size_t last = a.shape().back();
  if (begin >= end || end > last)
    throw ShapeError("slice: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") invalid for " + shape_str(a.shape()));
  const std::size_t outer = a.numel() / last;
  const std::size_t width = end - begin;
  std::vector<double> out(outer * width);
  auto av = a.values();
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t j = 0; j < width; ++j) out[o * width + j] = av[o * last + begin + j];
  Shape shape = a.shape();
  shape.back() = width;
  Tensor result = detail::make_result(std::move(shape), std::move(out), {a});
  detail::on_backward(result, [an = a.node(), outer, width, last, begin](detail::Node& self) {
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t j = 0; j < width; ++j)
        detail::accumulate(*an, o * last + begin + j, self.grad[o * width + j]);
  });
  return result;
}

/// Single element as a scalar tensor.
inline Tensor element(const Tensor& a, std::size_t index) {
  detail::require_nonempty(a, "element");
  if (index >= a.numel()) throw ShapeError("element: index out of range for " + shape_str(a.shape()));
  Tensor result = detail::make_result({1}, {a[index]}, {a});
  detail::on_backward(result, [an = a.node(), index](detail::Node& self) {
    detail::accumulate(*an, index, self.grad[0]);
  });
  return result;
}

// ---------------------------------------------------------------------------
// Reductions

inline Tensor sum(const Tensor& a) {
  detail::require_nonempty(a, "sum");
  auto v = a.values();
  Tensor result = detail::make_result({1}, {std::accumulate(v.begin(), v.end(), 0.0)}, {a});
  detail::on_backward(result, [an = a.node()](detail::Node& self) {
    for (std::size_t i = 0; i < an->value.size(); ++i) detail::accumulate(*an, i, self.grad[0]);
  });
  return result;
}

inline Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.numel())); }

/// Mean along `axis`, which is removed from the shape (a vector reduces to a
/// one-element tensor).
inline Tensor reduce_mean(const Tensor& a, std::size_t axis) {
  detail::require_nonempty(a, "reduce_mean");
  const Shape& s = a.shape();
  if (axis >= s.size())
    throw ShapeError("reduce_mean: axis " + std::to_string(axis) + " out of range for " + shape_str(s));
  std::size_t outer = 1;
  std::size_t inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= s[d];
  for (std::size_t d = axis + 1; d < s.size(); ++d) inner *= s[d];
  const std::size_t len = s[axis];
  std::vector<double> out(outer * inner, 0.0);
  auto v = a.values();
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t l = 0; l < len; ++l)
      for (std::size_t i = 0; i < inner; ++i) out[o * inner + i] += v[(o * len + l) * inner + i];
  const double inv = 1.0 / static_cast<double>(len);
  for (double& x : out) x *= inv;

  Shape shape;
  for (std::size_t d = 0; d < s.size(); ++d)
    if (d != axis) shape.push_back(s[d]);
  if (shape.empty()) shape.push_back(1);
  Tensor result = detail::make_result(std::move(shape), std::move(out), {a});
  detail::on_backward(result, [an = a.node(), outer, inner, len, inv](detail::Node& self) {
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t l = 0; l < len; ++l)
        for (std::size_t i = 0; i < inner; ++i)
          detail::accumulate(*an, (o * len + l) * inner + i, self.grad[o * inner + i] * inv);
  });
  return result;
}

/// Softmax over the last axis, stabilized by subtracting each slice's max.
inline Tensor softmax(const Tensor& a) {
  detail::require_nonempty(a, "softmax");
  const std::size_t n = a.shape().back();
  const std::size_t outer = a.numel() / n;
  std::vector<double> out(a.numel());
  auto v = a.values();
  for (std::size_t o = 0; o < outer; ++o) {
    const double* x = v.data() + o * n;
    double* y = out.data() + o * n;
    const double mx = *std::max_element(x, x + n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += (y[j] = std::exp(x[j] - mx));
    for (std::size_t j = 0; j < n; ++j) y[j] /= total;
  }
  Tensor result = detail::make_result(a.shape(), std::move(out), {a});
  detail::on_backward(result, [an = a.node(), n, outer](detail::Node& self) {
    if (!an->requires_grad) return;
    an->ensure_grad();
    for (std::size_t o = 0; o < outer; ++o) {
      const double* y = self.value.data() + o * n;
      const double* g = self.grad.data() + o * n;
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += g[j] * y[j];
      for (std::size_t j = 0; j < n; ++j) an->grad[o * n + j] += y[j] * (g[j] - dot);
    }
  });
  return result;
}

/// sum_i weights[i] * items[i, :]
inline Tensor weighted_sum(const Tensor& weights, const Tensor& items) {
  if (weights.rank() != 1 || items.rank() != 2 || weights.numel() != items.dim(0))
    throw ShapeError("weighted_sum: weights " + shape_str(weights.shape()) + " do not index items " +
                     shape_str(items.shape()));
  return matmul(weights, items);
}

/// Euclidean norm as a scalar tensor.
inline Tensor l2_norm(const Tensor& a) {
  detail::require_nonempty(a, "l2_norm");
  double sq = 0.0;
  for (double x : a.values()) sq += x * x;
  const double norm = std::sqrt(sq);
  Tensor result = detail::make_result({1}, {norm}, {a});
  detail::on_backward(result, [an = a.node(), norm](detail::Node& self) {
    if (norm == 0.0) return;
    for (std::size_t i = 0; i < an->value.size(); ++i)
      detail::accumulate(*an, i, self.grad[0] * an->value[i] / norm);
  });
  return result;
}

/// Binary cross-entropy of probability `p` (scalar) against label 0/1, with p
/// clamped to [1e-7, 1 - 1e-7]. Clamped inputs receive zero gradient.
inline Tensor binary_cross_entropy(const Tensor& p, int label) {
  constexpr double kFloor = 1e-7;
  const double raw = p.item();
  detail::note_kink(raw - kFloor);
  detail::note_kink((1.0 - kFloor) - raw);
  const double q = std::clamp(raw, kFloor, 1.0 - kFloor);
  const double y = label ? 1.0 : 0.0;
  const double loss = -(y * std::log(q) + (1.0 - y) * std::log(1.0 - q));
  Tensor result = detail::make_result({1}, {loss}, {p});
  const bool clamped = raw < kFloor || raw > 1.0 - kFloor;
  detail::on_backward(result, [pn = p.node(), q, y, clamped](detail::Node& self) {
    if (clamped) return;
    detail::accumulate(*pn, 0, self.grad[0] * (-y / q + (1.0 - y) / (1.0 - q)));
  });
  return result;
}

// ---------------------------------------------------------------------------
// Backward pass

namespace detail {

inline std::vector<Node*> topological_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{root, 0}};
  seen.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;  // parents before children
}

}  // namespace detail

/// Accumulates d(loss)/d(t) into every requires_grad leaf reachable from the
/// scalar `loss`. Leaf gradients add up across calls; intermediate gradients
/// are reset on each call.
inline void backward(const Tensor& loss) {
  if (!loss) throw ContractError("backward: null loss");
  if (loss.numel() != 1)
    throw ContractError("backward: loss must be scalar, got " + shape_str(loss.shape()));
  if (!loss.requires_grad()) return;
  auto order = detail::topological_order(loss.node().get());
  for (detail::Node* n : order)
    if (!n->is_leaf()) n->grad.assign(n->value.size(), 0.0);
  loss.node()->ensure_grad();
  loss.node()->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backward) (*it)->backward(**it);
}

/// True if `leaf` participates in the computation of `out`.
inline bool depends_on(const Tensor& out, const Tensor& leaf) {
  if (!out.requires_grad() || !leaf.requires_grad()) return false;
  for (detail::Node* n : detail::topological_order(out.node().get()))
    if (n == leaf.node().get()) return true;
  return false;
}

}  // namespace ned
