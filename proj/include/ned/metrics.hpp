#pragma once

#include <cmath>
#include <cstddef>

#include <nlohmann/json.hpp>

namespace ned {

/// Rounds a percentage to one decimal, the precision results are printed at.
inline double round1(double x) { return std::round(x * 10.0) / 10.0; }

struct ClassMetrics {
  double precision = 0.0;  // percentages, one decimal
  double recall = 0.0;
  double f1 = 0.0;
};

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  void add(bool predicted_consistent, bool consistent) {
    if (predicted_consistent)
      ++(consistent ? tp : fp);
    else
      ++(consistent ? fn : tn);
  }

  std::size_t total() const { return tp + fp + fn + tn; }
  double accuracy() const { return total() ? static_cast<double>(tp + tn) / static_cast<double>(total()) : 0.0; }

  /// P, R from counts; F1 from the printed (rounded) P and R.
  static ClassMetrics metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
    ClassMetrics m;
    if (tp + fp) m.precision = round1(100.0 * static_cast<double>(tp) / static_cast<double>(tp + fp));
    if (tp + fn) m.recall = round1(100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn));
    if (m.precision + m.recall > 0) m.f1 = round1(2.0 * m.precision * m.recall / (m.precision + m.recall));
    return m;
  }

  ClassMetrics consistent() const { return metrics(tp, fp, fn); }
  ClassMetrics inconsistent() const { return metrics(tn, fn, fp); }
};

inline nlohmann::json metrics_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline ClassMetrics class_metrics_from_json(const nlohmann::json& j) {
  return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>()};
}

}  // namespace ned
