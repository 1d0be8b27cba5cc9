#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ned/errors.hpp"
#include "ned/tensor.hpp"

namespace ned {

struct AdamOptions {
  double step_size = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-parameter Adam state. Moments start at zero and are sized on first use.
struct AdamState {
  AdamOptions options;
  std::size_t step = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
};

/// One bias-corrected Adam step using `param`'s accumulated gradient.
///
/// Coordinates whose gradient is exactly zero keep their value; their moments
/// still decay. This makes an all-zero gradient a no-op on the parameter.
inline void adam_update(Tensor& param, AdamState& state) {
  if (!param.has_grad()) throw ContractError("adam_update: parameter has no gradient buffer");
  const std::size_t n = param.numel();
  if (state.first_moment.empty()) {
    state.first_moment.assign(n, 0.0);
    state.second_moment.assign(n, 0.0);
  }
  if (state.first_moment.size() != n) throw ShapeError("adam_update: state does not match parameter");

  const AdamOptions& o = state.options;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);

  auto values = param.mutable_values();
  auto grad = param.grad();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = o.beta1 * m + (1.0 - o.beta1) * g;
    v = o.beta2 * v + (1.0 - o.beta2) * g * g;
    if (g == 0.0) continue;
    const double m_hat = m / correction1;
    const double v_hat = v / correction2;
    values[i] -= o.step_size * m_hat / (std::sqrt(v_hat) + o.epsilon);
  }
}

}  // namespace ned
