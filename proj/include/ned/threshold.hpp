#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "ned/errors.hpp"

namespace ned {

struct LabeledDistance {
  double distance = 0.0;
  bool consistent = false;
};

struct ThresholdFit {
  double threshold = 0.0;
  double f1 = 0.0;  // fraction in [0, 1], consistent class
  std::size_t true_positives = 0;
  std::size_t predicted_positives = 0;
};

/// F1 of the consistent class when everything strictly below `threshold` is
/// predicted consistent. Linear scan, used as a reference and for evaluation.
inline double threshold_f1(const std::vector<LabeledDistance>& points, double threshold) {
  std::size_t tp = 0, predicted = 0, actual = 0;
  for (const auto& p : points) {
    actual += p.consistent;
    if (p.distance < threshold) {
      ++predicted;
      tp += p.consistent;
    }
  }
  const std::size_t denom = predicted + actual;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

/// Sweeps the midpoints between consecutive sorted distances and returns the
/// one with the highest consistent-class F1, preferring the smallest threshold
/// on ties. Equal neighbours yield their shared value as the candidate.
inline ThresholdFit fit_distance_threshold(std::vector<LabeledDistance> points) {
  std::size_t positives = 0;
  for (const auto& p : points) positives += p.consistent;
  if (positives == 0 || positives == points.size())
    throw ContractError("fit_distance_threshold needs at least one consistent and one inconsistent pair");

  std::sort(points.begin(), points.end(),
            [](const LabeledDistance& a, const LabeledDistance& b) { return a.distance < b.distance; });

  // prefix[i] = consistent count among the first i sorted points
  std::vector<std::size_t> prefix(points.size() + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) prefix[i + 1] = prefix[i] + points[i].consistent;

  bool have = false;
  ThresholdFit best;
  std::size_t group_start = 0;  // first index holding points[i].distance
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (i > 0 && points[i].distance != points[i - 1].distance) group_start = i;
    const double lo = points[i].distance;
    const double hi = points[i + 1].distance;
    double candidate;
    std::size_t below;
    if (lo == hi) {
      candidate = lo;
      below = group_start;
    } else {
      candidate = lo + (hi - lo) / 2.0;
      below = i + 1;
    }
    const std::size_t tp = prefix[below];
    // compare 2tp / (below + positives) exactly
    bool better = !have;
    if (have) {
      const std::uint64_t lhs = static_cast<std::uint64_t>(tp) * (best.predicted_positives + positives);
      const std::uint64_t rhs = static_cast<std::uint64_t>(best.true_positives) * (below + positives);
      better = lhs > rhs || (lhs == rhs && candidate < best.threshold);
    }
    if (better) {
      have = true;
      best.threshold = candidate;
      best.true_positives = tp;
      best.predicted_positives = below;
    }
  }
  best.f1 = 2.0 * static_cast<double>(best.true_positives) /
            static_cast<double>(best.predicted_positives + positives);
  return best;
}

}  // namespace ned
