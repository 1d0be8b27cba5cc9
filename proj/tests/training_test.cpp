#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "ned/synthetic.hpp"
#include "ned/training.hpp"

namespace {

using ned::Arch;

struct Data {
  std::vector<ned::EncodedExample> train, dev, test;
};

Data synthetic_data(std::size_t records, std::uint64_t seed = 4) {
  ned::SyntheticOptions o;
  o.records = records;
  o.dimension = 8;
  o.seed = seed;
  const auto corpus = ned::make_synthetic_corpus(o);
  Data d;
  for (std::size_t r = 0; r < corpus.records.size(); ++r) {
    auto [pos, neg] = ned::expand_to_examples(corpus.records[r], r, corpus.graphs, 2);
    auto& dst = r % 5 == 3 ? d.dev : r % 5 == 4 ? d.test : d.train;
    dst.push_back(ned::encode_example(pos, corpus.embeddings));
    dst.back().id = 2 * r;
    dst.push_back(ned::encode_example(neg, corpus.embeddings));
    dst.back().id = 2 * r + 1;
  }
  return d;
}

ned::TrainConfig quick(std::size_t epochs = 3) {
  ned::TrainConfig tc;
  tc.epochs = epochs;
  tc.step_size = 1e-2;
  tc.seed = 11;
  return tc;
}

TEST(Loss, Examples) {
  EXPECT_NEAR(ned::binary_cross_entropy(ned::Tensor::scalar(0.5), 1).item(), std::log(2.0), 1e-15);
  EXPECT_NEAR(ned::binary_cross_entropy(ned::Tensor::scalar(0.9), 0).item(), std::log(10.0), 1e-12);
  const double floor = ned::binary_cross_entropy(ned::Tensor::scalar(1.0), 1).item();
  EXPECT_GT(floor, 0.0);
  EXPECT_LT(floor, 1e-6);
  EXPECT_TRUE(std::isfinite(ned::binary_cross_entropy(ned::Tensor::scalar(0.0), 1).item()));
}

TEST(Loss, BatchIsMean) {
  const auto l = ned::batch_loss({ned::Tensor::scalar(0.5), ned::Tensor::scalar(0.9)}, {1, 0});
  EXPECT_NEAR(l.item(), (std::log(2.0) + std::log(10.0)) / 2, 1e-12);
  EXPECT_THROW(ned::batch_loss({ned::Tensor::scalar(0.5)}, {}), ned::ContractError);
}

TEST(Batches, TwentyFiveByTen) {
  ned::Rng rng(1);
  const auto b = ned::make_batches(25, 10, rng);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].size(), 10u);
  EXPECT_EQ(b[1].size(), 10u);
  EXPECT_EQ(b[2].size(), 5u);
  std::set<std::size_t> all;
  for (const auto& batch : b) all.insert(batch.begin(), batch.end());
  EXPECT_EQ(all.size(), 25u);
  ned::Rng again(1);
  EXPECT_EQ(ned::make_batches(25, 10, again), b);
}

TEST(Metrics, Examples) {
  ned::Confusion perfect;
  for (int i = 0; i < 6; ++i) perfect.add(i % 2 == 0, i % 2 == 0);
  EXPECT_EQ(perfect.consistent().precision, 100.0);
  EXPECT_EQ(perfect.consistent().recall, 100.0);
  EXPECT_EQ(perfect.consistent().f1, 100.0);

  ned::Confusion all_yes;
  for (int i = 0; i < 10; ++i) all_yes.add(true, i % 2 == 0);
  EXPECT_EQ(all_yes.consistent().precision, 50.0);
  EXPECT_EQ(all_yes.consistent().recall, 100.0);
  EXPECT_EQ(all_yes.consistent().f1, 66.7);
}

TEST(Metrics, PrintedF1IsHarmonicMeanOfPrintedValues) {
  ned::Rng rng(3);
  for (int t = 0; t < 500; ++t) {
    const std::size_t tp = rng.below(50), fp = rng.below(50), fn = rng.below(50);
    const auto m = ned::Confusion::metrics(tp, fp, fn);
    for (double v : {m.precision, m.recall, m.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 100.0);
    }
    if (m.precision + m.recall > 0) {
      EXPECT_NEAR(m.f1, 2 * m.precision * m.recall / (m.precision + m.recall), 0.05);
    }
  }
}

TEST(Train, SameSeedGivesIdenticalLog) {
  const auto d = synthetic_data(20);
  for (Arch a : {Arch::Centroid, Arch::RnnTriplets, Arch::GcnAttention}) {
    const auto config = ned::ModelConfig::reduced(a, 8, 4);
    std::ostringstream first, second;
    ned::train(config, quick(), d.train, d.dev, &first);
    ned::train(config, quick(), d.train, d.dev, &second);
    EXPECT_EQ(first.str(), second.str()) << ned::arch_tag(a);
    EXPECT_FALSE(first.str().empty());
  }
}

TEST(Train, LogLinesHaveTheDocumentedKeys) {
  const auto d = synthetic_data(10);
  std::ostringstream log;
  const auto r = ned::train(ned::ModelConfig::reduced(Arch::Centroid, 8, 4), quick(2), d.train, d.dev, &log);
  std::istringstream lines(log.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["epoch"], ++n);
    for (const char* k : {"train_loss", "dev_precision", "dev_recall", "dev_f1"}) EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_TRUE(j["train_loss"].is_number());
  }
  EXPECT_EQ(n, r.log.size());
}

TEST(Train, BestDevIsAtLeastEveryLoggedEpoch) {
  const auto d = synthetic_data(30);
  const auto r = ned::train(ned::ModelConfig::reduced(Arch::LinearAttention, 8, 4), quick(8), d.train, d.dev);
  for (const auto& e : r.log) EXPECT_GE(r.best_dev.f1, e.dev.f1);
  EXPECT_EQ(ned::evaluate(r.best, d.dev).consistent.f1, r.best_dev.f1);
}

TEST(Train, PatienceStopsEarly) {
  const auto d = synthetic_data(10);
  auto tc = quick(100);
  tc.patience = 2;
  tc.step_size = 1e-12;  // dev F1 cannot improve at this step size
  const auto r = ned::train(ned::ModelConfig::reduced(Arch::Centroid, 8, 4), tc, d.train, d.dev);
  EXPECT_EQ(r.log.size(), 3u);
  EXPECT_EQ(r.best_epoch, 1u);
}

TEST(Train, NonFiniteLossNamesTheBatch) {
  auto d = synthetic_data(5);
  d.train[3].graph.nodes.mutable_values()[0] = std::numeric_limits<double>::quiet_NaN();
  auto tc = quick(1);
  tc.batch_size = 100;
  try {
    ned::train(ned::ModelConfig::reduced(Arch::Centroid, 8, 4), tc, d.train, d.dev);
    FAIL() << "expected NumericError";
  } catch (const ned::NumericError& e) {
    EXPECT_NE(std::string(e.what()).find(std::to_string(d.train[3].id)), std::string::npos) << e.what();
  }
}

TEST(Train, InvalidConfig) {
  const auto d = synthetic_data(5);
  auto tc = quick();
  tc.batch_size = 0;
  EXPECT_THROW(ned::train(ned::ModelConfig::reduced(Arch::Centroid, 8, 4), tc, d.train, d.dev), ned::ContractError);
  EXPECT_THROW(ned::train(ned::ModelConfig::reduced(Arch::Centroid, 8, 4), quick(), {}, d.dev), ned::ContractError);
}

TEST(Train, VectorDistanceFitsThresholdOnce) {
  const auto d = synthetic_data(20);
  std::ostringstream log;
  const auto r = ned::train(ned::ModelConfig::reduced(Arch::VectorDistance, 8, 4), quick(), d.train, d.dev, &log);
  ASSERT_EQ(r.log.size(), 1u);
  EXPECT_TRUE(nlohmann::json::parse(log.str())["train_loss"].is_null());
  const auto fit = ned::fit_threshold(r.best, d.train);
  EXPECT_EQ(r.best.config().distance_threshold, fit.threshold);
}

TEST(MultiRun, SingleRunHasZeroSpread) {
  const auto d = synthetic_data(15);
  const auto rep = ned::multi_run(ned::ModelConfig::reduced(Arch::Centroid, 8, 4), quick(2), 1, d.train, d.dev, d.test);
  EXPECT_EQ(rep.runs.size(), 1u);
  EXPECT_EQ(rep.spread, 0.0);
  EXPECT_EQ(rep.test.f1, rep.runs[0].test.f1);
}

TEST(MultiRun, TwoRunsUseDerivedSeedsAndAverage) {
  const auto d = synthetic_data(15);
  const auto config = ned::ModelConfig::reduced(Arch::Centroid, 8, 4);
  std::vector<ned::TrainResult> finished;
  ned::RunHooks hooks;
  hooks.finished = [&](std::size_t, const ned::TrainResult& r) { finished.push_back({r.best.clone(), r.log, r.best_epoch, r.best_dev}); };
  const auto rep = ned::multi_run(config, quick(2), 2, d.train, d.dev, d.test, hooks);
  ASSERT_EQ(rep.runs.size(), 2u);
  EXPECT_EQ(rep.runs[0].seed, 11u);
  EXPECT_EQ(rep.runs[1].seed, 12u);
  EXPECT_EQ(finished.size(), 2u);
  const double p = ned::round1((rep.runs[0].test.precision + rep.runs[1].test.precision) / 2);
  EXPECT_EQ(rep.test.precision, p);
  EXPECT_NEAR(rep.spread, std::abs(rep.runs[0].test.f1 - rep.runs[1].test.f1), 1e-9);

  auto single = quick(2);
  single.seed = 12;
  const auto second = ned::train(config, single, d.train, d.dev);
  EXPECT_EQ(ned::evaluate(second.best, d.test).consistent.f1, rep.runs[1].test.f1);
}

TEST(MultiRun, ReportJsonRoundTripAndTable) {
  ned::EvalReport a;
  a.arch = Arch::RnnTripletsAttention;
  a.runs = {{0, 3, {90, 91, 90.5}, {88, 89, 88.5}}};
  a.dev = {90, 91, 90.5};
  a.test = {88, 89, 88.5};
  a.spread = 0.4;
  const auto back = ned::EvalReport::from_json(a.to_json());
  EXPECT_EQ(back.arch, a.arch);
  EXPECT_EQ(back.test.f1, 88.5);
  EXPECT_EQ(back.runs.size(), 1u);
  EXPECT_THROW(ned::EvalReport::from_json({{"arch", "nope"}}), ned::FormatError);

  ned::EvalReport b = a;
  b.arch = Arch::FeedforwardAverages;
  b.spread = 0.8;
  EXPECT_NEAR(ned::error_estimate({a, b}), 0.6, 1e-12);
  const auto table = ned::render_table({a, b});
  EXPECT_NE(table.find(std::string(ned::arch_description(Arch::FeedforwardAverages))), std::string::npos);
  EXPECT_NE(table.find("88.5"), std::string::npos);
}

}  // namespace
