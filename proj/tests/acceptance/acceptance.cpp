// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ned/ned.hpp"

namespace {

using ned::Arch;
using ned::Tensor;

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (passed) detail.clear();
    passed = false;
    if (detail.size() < 400) detail += (detail.empty() ? "" : "; ") + what;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int precision = 1) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific;
  s.precision(1);
  s << v;
  return s.str();
}

struct Splits {
  std::vector<ned::EncodedExample> train, dev, test;
};

Splits encode_corpus(const ned::SyntheticCorpus& corpus, const ned::SplitSpec& spec) {
  std::vector<ned::DisambExample> examples;
  for (std::size_t r = 0; r < corpus.records.size(); ++r) {
    auto [p, n] = ned::expand_to_examples(corpus.records[r], r, corpus.graphs, 2);
    examples.push_back(std::move(p));
    examples.push_back(std::move(n));
  }
  const auto s = ned::split(examples, spec);
  auto encode = [&](const std::vector<ned::DisambExample>& part) {
    std::vector<ned::EncodedExample> out;
    for (const auto& e : part) {
      out.push_back(ned::encode_example(e, corpus.embeddings));
      out.back().id = out.size();
    }
    return out;
  };
  return {encode(s.train), encode(s.dev), encode(s.test)};
}

// ---------------------------------------------------------------------------

Outcome gradient_suite() {
  const auto t0 = Clock::now();
  Outcome o;
  ned::GradCheckOptions opts;
  opts.max_elements = SIZE_MAX;
  std::size_t tensors = 0;
  for (Arch a : ned::kAllArchs) {
    std::map<std::string, std::size_t> exercised;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      for (const auto& r : ned::check_model_gradients(ned::ModelConfig::reduced(a, 8, 4), seed, opts)) {
        exercised[r.name] += r.exercised;
        o.require(r.passed, std::string(ned::arch_tag(a)) + " " + r.name + " seed " + std::to_string(seed) +
                                " rel " + fmt(r.max_relative_error, 6));
      }
    }
    for (const auto& [name, n] : exercised) o.require(n > 0, std::string(ned::arch_tag(a)) + " " + name + " never exercised");
    tensors += exercised.size();
  }
  const double dt = seconds_since(t0);
  o.require(dt < 120, "runtime " + fmt(dt) + "s");
  if (o.passed) o.detail = std::to_string(tensors) + " tensors over 9 architectures, " + fmt(dt) + "s";
  return o;
}

Outcome overfit_suite() {
  ned::SyntheticOptions so;
  so.records = 16;
  so.shared_nodes = false;
  const auto corpus = ned::make_synthetic_corpus(so);
  const auto data = encode_corpus(corpus, {ned::SplitCounts{16, 0, 0}, 7});

  Outcome o;
  std::string summary;
  for (Arch a : ned::kAllArchs) {
    if (!ned::is_trainable(a)) continue;
    ned::TrainConfig tc;
    tc.epochs = 300;
    tc.step_size = 3e-3;
    tc.patience = 0;
    tc.seed = 0;
    const auto t0 = Clock::now();
    const auto r = ned::train(ned::ModelConfig::reduced(a, 16, 16), tc, data.train, data.train);
    const double dt = seconds_since(t0);
    const double acc = ned::evaluate(r.best, data.train).confusion.accuracy();
    o.require(acc >= 0.95, std::string(ned::arch_tag(a)) + " accuracy " + fmt(100 * acc) + "%");
    o.require(dt < 300, std::string(ned::arch_tag(a)) + " runtime " + fmt(dt) + "s");
    summary += (summary.empty() ? "" : ", ") + std::string(ned::arch_tag(a)) + " " + fmt(100 * acc);
  }
  if (o.passed) o.detail = "accuracy on 32 examples: " + summary;
  else o.detail += " (all: " + summary + ")";
  return o;
}

ned::Model biased_model(Arch a, std::uint64_t seed) {
  ned::Rng rng(seed);
  ned::Model m = ned::Model::initialized(ned::ModelConfig::reduced(a, 8, 4), rng);
  for (auto& [name, t] : m.params().entries())
    if (t.rank() == 1)
      for (double& b : t.mutable_values()) b = rng.uniform(0.1, 0.5);
  return m;
}

struct RandomGraph {
  ned::EmbeddingStore store{8};
  ned::KnowledgeGraph graph{"v0", "v0"};
};

RandomGraph random_graph(ned::Rng& rng, std::size_t n, std::size_t m) {
  RandomGraph g;
  auto add_word = [&](const std::string& w) {
    std::vector<double> v(8);
    for (double& x : v) x = rng.uniform(-1, 1);
    g.store.insert(w, std::move(v));
  };
  add_word("v0");
  for (std::size_t i = 1; i < n; ++i) {
    add_word("v" + std::to_string(i));
    g.graph.add_node("v" + std::to_string(i), "v" + std::to_string(i));
  }
  for (int r = 0; r < 3; ++r) add_word("r" + std::to_string(r));
  for (std::size_t e = 0; e < m; ++e)
    g.graph.add_edge("v" + std::to_string(rng.below(n)), "r" + std::to_string(rng.below(3)),
                     "v" + std::to_string(rng.below(n)));
  return g;
}

ned::KnowledgeGraph relabeled(const ned::KnowledgeGraph& g, ned::Rng& rng) {
  std::vector<ned::KnowledgeGraph::NodeEntry> nodes(g.nodes().begin() + 1, g.nodes().end());
  rng.shuffle(nodes);
  std::vector<ned::Triplet> edges = g.edges();
  rng.shuffle(edges);
  ned::KnowledgeGraph out(g.central(), g.label(g.central()));
  for (const auto& n : nodes) out.add_node(n.id, n.label);
  for (const auto& e : edges) out.add_edge(e.source, e.relation, e.target);
  return out;
}

double total(const Tensor& t) { return std::accumulate(t.values().begin(), t.values().end(), 0.0); }

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

Outcome invariant_suite() {
  Outcome o;
  ned::Rng rng(2024);
  const Tensor y_text = Tensor::vector({0.3, 0.2, 0.1, 0.5});

  double worst_sum = 0;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> v(1 + rng.below(20));
    for (double& x : v) x = rng.uniform(-30, 30);
    worst_sum = std::max(worst_sum, std::abs(total(ned::softmax(Tensor::vector(v))) - 1));
  }
  const auto linear = biased_model(Arch::LinearAttention, 3);
  const auto triplet = biased_model(Arch::RnnTripletsAttention, 4);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + rng.below(8);
    std::vector<double> nodes(n * 8), trips(n * 24);
    for (double& x : nodes) x = rng.uniform(-2, 2);
    for (double& x : trips) x = rng.uniform(-2, 2);
    const auto la = ned::encode_linear_attention(linear.node_attention_params(), Tensor::matrix(n, 8, nodes), y_text);
    const auto ta = ned::encode_rnn_triplets_attention(triplet.rnn_params(), Tensor::matrix(n, 24, trips), y_text);
    worst_sum = std::max({worst_sum, std::abs(total(la.weights) - 1), std::abs(total(ta.weights) - 1)});
  }

  const auto gat = biased_model(Arch::GcnAttention, 5);
  bool support_ok = true;
  for (int t = 0; t < 10; ++t) {
    const auto g = random_graph(rng, 2 + rng.below(5), 1 + rng.below(8));
    const auto f = ned::encode_graph_features(g.graph, g.store);
    const Tensor mask = gat.gcn_mask(f, ned::Mode::Eval, nullptr);
    const auto r = ned::encode_gcn_attention(gat.gcn_params(), f.reified_nodes, mask, f.reified_central, y_text);
    const std::size_t n = f.reified_adjacency.size();
    for (std::size_t k = 0; k < r.alphas.size(); ++k)
      for (std::size_t v = 0; v < n; ++v) {
        double row = 0;
        for (std::size_t u = 0; u < n; ++u) {
          row += r.scores[k].at(v, u);
          const bool in_support = u == v || f.reified_adjacency(v, u);
          support_ok &= in_support ? r.alphas[k].at(v, u) > 0.0 : r.alphas[k].at(v, u) == 0.0;
        }
        worst_sum = std::max(worst_sum, std::abs(row - 1));
      }
  }
  o.require(worst_sum < 1e-6, "normalization error " + sci(worst_sum));
  o.require(support_ok, "gcn-attention alpha outside identity and adjacency");

  for (int t = 0; t < 100; ++t) {
    const auto g = random_graph(rng, 1 + rng.below(12), rng.below(25));
    const auto r = ned::reify(g.graph);
    o.require(r.node_count() == g.graph.node_count() + g.graph.edge_count() && r.edge_count() == 2 * g.graph.edge_count(),
              "reification counts on graph " + std::to_string(t));
  }

  double worst_relabel = 0;
  for (Arch a : {Arch::Gcn, Arch::GcnAttention}) {
    const auto m = biased_model(a, 6);
    const auto g = random_graph(rng, 7, 10);
    auto readout = [&](const ned::KnowledgeGraph& kg) {
      const auto f = ned::encode_graph_features(kg, g.store);
      const Tensor mask = m.gcn_mask(f, ned::Mode::Eval, nullptr);
      return a == Arch::Gcn
                 ? ned::encode_gcn(m.gcn_params(), f.reified_nodes, mask, f.reified_central)
                 : ned::encode_gcn_attention(m.gcn_params(), f.reified_nodes, mask, f.reified_central, y_text).y_graph;
    };
    const Tensor ref = readout(g.graph);
    for (int t = 0; t < 20; ++t) worst_relabel = std::max(worst_relabel, max_abs_diff(readout(relabeled(g.graph, rng)), ref));
  }
  o.require(worst_relabel < 1e-9, "relabeling changed the readout by " + sci(worst_relabel));

  double worst_perm = 0;
  for (Arch a : {Arch::Centroid, Arch::FeedforwardAverages}) {
    const auto m = biased_model(a, 7);
    for (int t = 0; t < 10; ++t) {
      auto ex = ned::make_toy_problem(8, 100 + t).example;
      const double before = m.probability(ex).item();
      std::vector<Tensor> rows;
      for (std::size_t i = 0; i < ex.graph.nodes.dim(0); ++i) rows.push_back(ned::row(ex.graph.nodes, i));
      rng.shuffle(rows);
      ex.graph.nodes = ned::stack_rows(rows);
      worst_perm = std::max(worst_perm, std::abs(m.probability(ex).item() - before));
    }
  }
  o.require(worst_perm < 1e-12, "node permutation changed the output by " + sci(worst_perm));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ned::SyntheticOptions so;
    so.records = 20 + 9 * seed;
    so.seed = seed;
    so.shared_nodes = seed % 2 == 0;
    const auto corpus = ned::make_synthetic_corpus(so);
    std::vector<ned::DisambExample> examples;
    for (std::size_t r = 0; r < corpus.records.size(); ++r) {
      auto [p, n] = ned::expand_to_examples(corpus.records[r], r, corpus.graphs, 2);
      examples.push_back(std::move(p));
      examples.push_back(std::move(n));
    }
    const auto s = ned::split(examples, {ned::SplitRatios{0.6, 0.2, 0.2}, seed});
    std::set<std::size_t> seen;
    for (const auto* part : {&s.train, &s.dev, &s.test}) {
      std::size_t positives = 0;
      std::set<std::size_t> here;
      for (const auto& e : *part) {
        positives += e.label == 1;
        here.insert(e.record);
      }
      o.require(2 * positives == part->size(), "unbalanced split on corpus " + std::to_string(seed));
      for (auto r : here) o.require(seen.insert(r).second, "record " + std::to_string(r) + " in two splits");
    }
    o.require(seen.size() == corpus.records.size(), "records lost by split on corpus " + std::to_string(seed));
  }

  if (o.passed)
    o.detail = "max normalization error " + sci(worst_sum) + ", max relabel diff " + sci(worst_relabel);
  return o;
}

double exhaustive_best_f1(const std::vector<ned::LabeledDistance>& pts) {
  std::vector<double> d;
  std::size_t positives = 0;
  for (const auto& p : pts) {
    d.push_back(p.distance);
    positives += p.consistent;
  }
  std::sort(d.begin(), d.end());
  double best = -1;
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    const double t = (d[i] + d[i + 1]) / 2;
    std::size_t tp = 0, fp = 0;
    for (const auto& p : pts)
      if (p.distance < t) (p.consistent ? tp : fp)++;
    const double prec = tp + fp ? double(tp) / double(tp + fp) : 0.0;
    const double rec = double(tp) / double(positives);
    best = std::max(best, prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0);
  }
  return best;
}

Outcome threshold_oracle() {
  Outcome o;
  ned::Rng rng(99);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    std::vector<ned::LabeledDistance> pts;
    for (std::size_t i = 0; i < n; ++i) {
      const bool pos = i == 0 ? true : i == 1 ? false : rng.bernoulli(0.5);
      double d = rng.uniform(0, 2) + (pos ? 0 : rng.uniform(0, 0.6));
      if (trial % 4 == 0) d = std::round(d * 8) / 8;
      pts.push_back({d, pos});
    }
    const auto fit = ned::fit_distance_threshold(pts);
    worst = std::max({worst, std::abs(fit.f1 - exhaustive_best_f1(pts)), std::abs(ned::threshold_f1(pts, fit.threshold) - fit.f1)});
  }
  o.require(worst <= 1e-12, "max F1 gap " + sci(worst));
  if (o.passed) o.detail = "50 configurations, max F1 gap " + sci(worst);
  return o;
}

Outcome ordering_experiment() {
  const auto t0 = Clock::now();
  ned::SyntheticOptions so;
  so.records = 500;
  so.shared_nodes = false;
  so.context_noise = 1.0;
  const auto corpus = ned::make_synthetic_corpus(so);
  const auto data = encode_corpus(corpus, {ned::SplitRatios{}, 7});

  Outcome o;
  std::string summary;
  for (std::uint64_t seed : {0, 1}) {
    ned::TrainConfig tc;
    tc.epochs = 80;
    tc.step_size = 1e-3;
    tc.patience = 15;
    tc.seed = seed;
    std::map<Arch, double> f1;
    for (Arch a : {Arch::RnnTriplets, Arch::FeedforwardAverages, Arch::VectorDistance}) {
      const auto r = ned::train(ned::ModelConfig::reduced(a, 16, 16), tc, data.train, data.dev);
      f1[a] = ned::evaluate(r.best, data.test).consistent.f1;
    }
    const double rnn = f1[Arch::RnnTriplets], ff = f1[Arch::FeedforwardAverages], vd = f1[Arch::VectorDistance];
    const std::string s = "seed " + std::to_string(seed);
    o.require(rnn >= ff + 5, s + " rnn-triplets " + fmt(rnn) + " not 5 above feedforward-averages " + fmt(ff));
    o.require(std::abs(vd - 50) <= 15, s + " vector-distance " + fmt(vd) + " not within 15 of 50");
    summary += (summary.empty() ? "" : "; ") + s + ": rnn-triplets " + fmt(rnn) + ", feedforward-averages " + fmt(ff) +
               ", vector-distance " + fmt(vd);
  }
  const double dt = seconds_since(t0);
  o.require(dt < 1800, "runtime " + fmt(dt) + "s");
  if (o.passed) o.detail = summary + ", " + fmt(dt) + "s";
  else o.detail += " (" + summary + ")";
  return o;
}

Outcome reproducibility() {
  ned::SyntheticOptions so;
  so.records = 40;
  so.dimension = 8;
  so.seed = 3;
  const auto data = encode_corpus(ned::make_synthetic_corpus(so), {ned::SplitRatios{}, 3});
  Outcome o;
  std::size_t bytes = 0;
  for (Arch a : ned::kAllArchs) {
    ned::TrainConfig tc;
    tc.epochs = 3;
    tc.seed = 21;
    const auto config = ned::ModelConfig::reduced(a, 8, 4);
    std::ostringstream first, second;
    ned::train(config, tc, data.train, data.dev, &first);
    ned::train(config, tc, data.train, data.dev, &second);
    o.require(!first.str().empty() && first.str() == second.str(), std::string(ned::arch_tag(a)) + " logs differ");
    bytes += first.str().size();
  }
  if (o.passed) o.detail = "9 architectures, " + std::to_string(bytes) + " log bytes identical";
  return o;
}

Outcome checkpoint_round_trip() {
  ned::SyntheticOptions so;
  so.records = 40;
  so.dimension = 8;
  so.seed = 5;
  const auto data = encode_corpus(ned::make_synthetic_corpus(so), {ned::SplitRatios{}, 5});
  const auto dir = std::filesystem::temp_directory_path() / "ned_acceptance";
  std::filesystem::create_directories(dir);
  Outcome o;
  for (Arch a : ned::kAllArchs) {
    ned::TrainConfig tc;
    tc.epochs = 2;
    const auto r = ned::train(ned::ModelConfig::reduced(a, 8, 4), tc, data.train, data.dev);
    const auto path = (dir / (std::string(ned::arch_tag(a)) + ".json")).string();
    ned::save_checkpoint(r.best, path);
    const auto loaded = ned::load_checkpoint(path);
    const auto before = ned::evaluate(r.best, data.test), after = ned::evaluate(loaded, data.test);
    const bool same = before.confusion.accuracy() == after.confusion.accuracy() &&
                      before.consistent.precision == after.consistent.precision &&
                      before.consistent.recall == after.consistent.recall &&
                      before.consistent.f1 == after.consistent.f1 && before.inconsistent.f1 == after.inconsistent.f1;
    o.require(same, std::string(ned::arch_tag(a)) + " metrics changed after reload");
  }
  std::filesystem::remove_all(dir);
  if (o.passed) o.detail = "9 architectures, identical test metrics after reload";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient suite", gradient_suite},
      {"overfit suite", overfit_suite},
      {"invariant suite", invariant_suite},
      {"threshold oracle", threshold_oracle},
      {"ordering experiment", ordering_experiment},
      {"reproducibility", reproducibility},
      {"checkpoint round trip", checkpoint_round_trip},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.passed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
