#pragma once

// Training loop, evaluation and the multi-run protocol.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ned/adam.hpp"
#include "ned/errors.hpp"
#include "ned/features.hpp"
#include "ned/metrics.hpp"
#include "ned/models.hpp"
#include "ned/random.hpp"
#include "ned/tensor.hpp"
#include "ned/threshold.hpp"

namespace ned {

struct TrainConfig {
  std::size_t batch_size = 10;
  double step_size = 1e-4;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  std::size_t patience = 10;  // epochs without dev improvement; 0 disables
  std::size_t hops = 2;

  void validate() const {
    if (batch_size == 0) throw ContractError("batch size must be at least 1");
    if (!(step_size > 0.0) || !std::isfinite(step_size)) throw ContractError("step size must be positive");
    if (epochs == 0) throw ContractError("epoch count must be at least 1");
  }
};

/// Mean binary cross-entropy of a batch of consistent-class probabilities.
inline Tensor batch_loss(const std::vector<Tensor>& probabilities, const std::vector<int>& labels) {
  if (probabilities.empty() || probabilities.size() != labels.size())
    throw ContractError("batch_loss: need one label per probability");
  std::vector<Tensor> losses;
  losses.reserve(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i)
    losses.push_back(binary_cross_entropy(probabilities[i], labels[i]));
  return mean(concat(losses));
}

/// Epoch order: a seeded permutation cut into consecutive batches. The last
/// batch keeps the remainder.
inline std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size)
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + batch_size)));
  return batches;
}

struct EvalResult {
  Confusion confusion;
  ClassMetrics consistent;
  ClassMetrics inconsistent;

  nlohmann::json to_json() const {
    return {{"consistent", metrics_json(consistent)},
            {"inconsistent", metrics_json(inconsistent)},
            {"accuracy", round1(100.0 * confusion.accuracy())},
            {"examples", confusion.total()}};
  }
};

inline EvalResult evaluate(const Model& model, const std::vector<EncodedExample>& examples) {
  EvalResult r;
  for (const auto& ex : examples) r.confusion.add(model.predict(ex), ex.label == 1);
  r.consistent = r.confusion.consistent();
  r.inconsistent = r.confusion.inconsistent();
  return r;
}

inline ThresholdFit fit_threshold(const Model& model, const std::vector<EncodedExample>& examples) {
  std::vector<LabeledDistance> points;
  points.reserve(examples.size());
  for (const auto& ex : examples) points.push_back({model.distance(ex), ex.label == 1});
  return fit_distance_threshold(std::move(points));
}

struct EpochLog {
  std::size_t epoch = 0;
  std::optional<double> train_loss;
  ClassMetrics dev;

  std::string to_line() const {
    nlohmann::ordered_json j;
    j["epoch"] = epoch;
    j["train_loss"] = train_loss ? nlohmann::ordered_json(*train_loss) : nlohmann::ordered_json(nullptr);
    j["dev_precision"] = dev.precision;
    j["dev_recall"] = dev.recall;
    j["dev_f1"] = dev.f1;
    return j.dump();
  }
};

struct TrainResult {
  Model best;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  ClassMetrics best_dev;
};

namespace detail {

struct TrainRngs {
  Rng init, order, dropout;

  explicit TrainRngs(std::uint64_t seed) : init(0), order(0), dropout(0) {
    Rng master(seed);
    init = Rng(master.next());
    order = Rng(master.next());
    dropout = Rng(master.next());
  }
};

inline std::string batch_ids(const std::vector<EncodedExample>& data, const std::vector<std::size_t>& batch) {
  std::string s;
  for (std::size_t i : batch) {
    if (!s.empty()) s += ", ";
    s += std::to_string(data[i].id);
  }
  return s;
}

}  // namespace detail

/// Trains from a fresh seeded initialization. Each log line is also written to
/// `log_out` as it is produced. The returned model is the epoch with the best
/// dev F1 (first such epoch on ties).
inline TrainResult train(const ModelConfig& config, const TrainConfig& tc, const std::vector<EncodedExample>& data,
                         const std::vector<EncodedExample>& dev, std::ostream* log_out = nullptr) {
  tc.validate();
  if (data.empty()) throw ContractError("training set is empty");
  if (dev.empty()) throw ContractError("dev set is empty");
  detail::TrainRngs rngs(tc.seed);
  Model model = Model::initialized(config, rngs.init);

  auto emit = [&](TrainResult& r, const EpochLog& entry) {
    r.log.push_back(entry);
    if (log_out) *log_out << entry.to_line() << '\n' << std::flush;
  };

  if (!is_trainable(config.arch)) {
    model.set_threshold(fit_threshold(model, data).threshold);
    TrainResult r{model.clone(), {}, 1, evaluate(model, dev).consistent};
    emit(r, {1, std::nullopt, r.best_dev});
    return r;
  }

  std::vector<AdamState> states(model.params().size());
  for (auto& s : states) s.options.step_size = tc.step_size;

  TrainResult result{model.clone(), {}, 0, {}};
  double best_f1 = -1.0;
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (const auto& batch : make_batches(data.size(), tc.batch_size, rngs.order)) {
      model.params().zero_grad();
      std::vector<Tensor> probs;
      std::vector<int> labels;
      for (std::size_t i : batch) {
        probs.push_back(model.probability(data[i], Mode::Train, &rngs.dropout));
        labels.push_back(data[i].label);
      }
      const Tensor loss = batch_loss(probs, labels);
      if (!std::isfinite(loss.item()))
        throw NumericError("non-finite loss in epoch " + std::to_string(epoch) + ", batch examples [" +
                           detail::batch_ids(data, batch) + "]");
      backward(loss);
      auto& entries = model.params().entries();
      for (std::size_t p = 0; p < entries.size(); ++p) adam_update(entries[p].second, states[p]);
      loss_sum += loss.item() * static_cast<double>(batch.size());
    }
    const ClassMetrics dev_metrics = evaluate(model, dev).consistent;
    emit(result, {epoch, loss_sum / static_cast<double>(data.size()), dev_metrics});
    if (dev_metrics.f1 > best_f1) {
      best_f1 = dev_metrics.f1;
      result.best_epoch = epoch;
      result.best_dev = dev_metrics;
      result.best.copy_values_from(model);
      since_best = 0;
    } else if (tc.patience && ++since_best >= tc.patience) {
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Multi-run protocol

struct RunResult {
  std::uint64_t seed = 0;
  std::size_t best_epoch = 0;
  ClassMetrics dev, test;
};

struct EvalReport {
  Arch arch = Arch::RnnTriplets;
  std::vector<RunResult> runs;
  ClassMetrics dev, test;  // means over runs
  double spread = 0.0;     // max - min test F1

  nlohmann::json to_json() const {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : runs)
      rs.push_back({{"seed", r.seed}, {"best_epoch", r.best_epoch}, {"dev", metrics_json(r.dev)},
                    {"test", metrics_json(r.test)}});
    return {{"arch", arch_tag(arch)}, {"run_count", runs.size()}, {"runs", rs},
            {"dev", metrics_json(dev)}, {"test", metrics_json(test)}, {"spread", spread}};
  }

  static EvalReport from_json(const nlohmann::json& j) {
    try {
      EvalReport r;
      const auto tag = j.at("arch").get<std::string>();
      const auto arch = parse_arch(tag);
      if (!arch) throw FormatError("unknown architecture '" + tag + "' in report");
      r.arch = *arch;
      for (const auto& run : j.at("runs"))
        r.runs.push_back({run.at("seed").get<std::uint64_t>(), run.at("best_epoch").get<std::size_t>(),
                          class_metrics_from_json(run.at("dev")), class_metrics_from_json(run.at("test"))});
      r.dev = class_metrics_from_json(j.at("dev"));
      r.test = class_metrics_from_json(j.at("test"));
      r.spread = j.at("spread").get<double>();
      return r;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("report: ") + e.what());
    }
  }
};

inline ClassMetrics mean_metrics(const std::vector<ClassMetrics>& ms) {
  ClassMetrics out;
  if (ms.empty()) return out;
  for (const auto& m : ms) {
    out.precision += m.precision;
    out.recall += m.recall;
  }
  const double n = static_cast<double>(ms.size());
  out.precision = round1(out.precision / n);
  out.recall = round1(out.recall / n);
  if (out.precision + out.recall > 0) out.f1 = round1(2.0 * out.precision * out.recall / (out.precision + out.recall));
  return out;
}

struct RunHooks {
  std::function<std::ostream*(std::size_t run)> log;
  std::function<void(std::size_t run, const TrainResult&)> finished;
};

/// Trains `runs` times with seeds seed, seed + 1, ... and averages.
inline EvalReport multi_run(const ModelConfig& config, const TrainConfig& tc, std::size_t runs,
                            const std::vector<EncodedExample>& data, const std::vector<EncodedExample>& dev,
                            const std::vector<EncodedExample>& test, const RunHooks& hooks = {}) {
  if (runs == 0) throw ContractError("run count must be at least 1");
  EvalReport report;
  report.arch = config.arch;
  std::vector<ClassMetrics> devs, tests;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < runs; ++i) {
    TrainConfig run_tc = tc;
    run_tc.seed = tc.seed + i;
    TrainResult tr = train(config, run_tc, data, dev, hooks.log ? hooks.log(i) : nullptr);
    if (hooks.finished) hooks.finished(i, tr);
    RunResult r{run_tc.seed, tr.best_epoch, tr.best_dev, evaluate(tr.best, test).consistent};
    devs.push_back(r.dev);
    tests.push_back(r.test);
    lo = std::min(lo, r.test.f1);
    hi = std::max(hi, r.test.f1);
    report.runs.push_back(r);
  }
  report.dev = mean_metrics(devs);
  report.test = mean_metrics(tests);
  report.spread = round1(hi - lo);
  return report;
}

/// Midpoint of the range of per-model spreads.
inline double error_estimate(const std::vector<EvalReport>& reports) {
  if (reports.empty()) return 0.0;
  double lo = reports.front().spread, hi = lo;
  for (const auto& r : reports) {
    lo = std::min(lo, r.spread);
    hi = std::max(hi, r.spread);
  }
  return (lo + hi) / 2.0;
}

/// Text table with one row per report: description, dev P/R/F1, test P/R/F1.
inline std::string render_table(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << std::left << std::setw(46) << "Model" << std::right << std::setw(7) << "prec" << std::setw(7) << "rec"
      << std::setw(7) << "F1" << "  |" << std::setw(7) << "prec" << std::setw(7) << "rec" << std::setw(7) << "F1"
      << '\n';
  out << std::left << std::setw(46) << "" << std::right << std::setw(21) << "dev" << "  |" << std::setw(21)
      << "test" << '\n';
  out << std::string(46 + 21 + 3 + 21, '-') << '\n';
  for (const auto& r : reports)
    out << std::left << std::setw(46) << arch_description(r.arch) << std::right << std::setw(7) << r.dev.precision
        << std::setw(7) << r.dev.recall << std::setw(7) << r.dev.f1 << "  |" << std::setw(7) << r.test.precision
        << std::setw(7) << r.test.recall << std::setw(7) << r.test.f1 << '\n';
  out << "runs per model: " << (reports.empty() ? 0 : reports.front().runs.size())
      << ", error estimate: " << std::setprecision(2) << error_estimate(reports) << '\n';
  return out.str();
}

}  // namespace ned
