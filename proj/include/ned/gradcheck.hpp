#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ned/errors.hpp"
#include "ned/tensor.hpp"

namespace ned {

struct GradCheckOptions {
  double tolerance = 1e-3;
  double step = 1e-4;  // central-difference half width
  // denominator floor; smaller gradients compare on an absolute scale
  double floor = 1e-5;
  std::size_t max_elements = 100;
};

struct GradCheckReport {
  std::string name;
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // coordinates whose perturbation crosses a kink
  std::size_t exercised = 0;  // checked coordinates with a gradient above the floor
  bool passed = false;
  std::string diagnostic;
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

namespace detail {

struct Evaluation {
  double value;
  std::vector<std::uint8_t> kinks;
};

inline Evaluation evaluate_recorded(const std::function<Tensor()>& f) {
  ScopedKinkRecorder recorder;
  const Tensor out = f();
  if (!out || out.numel() != 1) throw ContractError("grad_check: function must return a scalar");
  return {out.item(), recorder.result().pattern};
}

}  // namespace detail

/// Compares backward() gradients of scalar `f` against central differences for
/// every listed tensor. `f` must rebuild its computation from the tensors'
/// current values on every call.
inline std::vector<GradCheckReport> grad_check_all(const std::function<Tensor()>& f,
                                                   std::vector<NamedTensor> inputs,
                                                   const GradCheckOptions& options = {}) {
  for (auto& in : inputs) {
    if (!in.tensor.requires_grad())
      throw ContractError("grad_check: '" + in.name + "' does not require grad");
    if (in.tensor.numel() > options.max_elements)
      throw ContractError("grad_check: '" + in.name + "' has " + std::to_string(in.tensor.numel()) +
                          " elements, limit is " + std::to_string(options.max_elements));
    in.tensor.zero_grad();
  }

  std::vector<GradCheckReport> reports(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) reports[i].name = inputs[i].name;

  std::vector<std::uint8_t> base_kinks;
  {
    ScopedKinkRecorder recorder;
    const Tensor loss = f();
    if (!std::isfinite(loss.item())) {
      for (auto& r : reports) r.diagnostic = "non-finite function value at the base point";
      return reports;
    }
    base_kinks = recorder.result().pattern;
    backward(loss);
  }

  for (std::size_t p = 0; p < inputs.size(); ++p) {
    Tensor& x = inputs[p].tensor;
    GradCheckReport& report = reports[p];
    const std::vector<double> analytic(x.grad().begin(), x.grad().end());
    auto values = x.mutable_values();
    bool finite = true;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + options.step;
      const auto plus = detail::evaluate_recorded(f);
      values[i] = saved - options.step;
      const auto minus = detail::evaluate_recorded(f);
      values[i] = saved;

      if (!std::isfinite(plus.value) || !std::isfinite(minus.value) || !std::isfinite(analytic[i])) {
        finite = false;
        report.diagnostic = "non-finite value at coordinate " + std::to_string(i);
        break;
      }
      if (plus.kinks != base_kinks || minus.kinks != base_kinks) {
        ++report.skipped;
        continue;
      }
      const double numeric = (plus.value - minus.value) / (2.0 * options.step);
      const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), options.floor});
      const double rel = std::abs(numeric - analytic[i]) / denom;
      ++report.checked;
      if (std::max(std::abs(numeric), std::abs(analytic[i])) > options.floor) ++report.exercised;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_index = i;
      }
    }
    report.passed = finite && report.max_relative_error <= options.tolerance;
  }
  return reports;
}

/// Single-tensor form of grad_check_all.
inline GradCheckReport grad_check(const std::function<Tensor()>& f, const Tensor& x,
                                  const GradCheckOptions& options = {}) {
  return grad_check_all(f, {{"x", x}}, options).front();
}

}  // namespace ned
