#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "ned/embedding.hpp"
#include "ned/random.hpp"

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("ned_embedding_" + name);
  std::ofstream(path) << body;
  return path.string();
}

ned::EmbeddingStore toy() {
  ned::EmbeddingStore s(2);
  s.insert("new", {1, 0});
  s.insert("york", {0, 1});
  s.insert("instance", {2, 0});
  s.insert("of", {0, 2});
  return s;
}

TEST(EmbeddingLoad, TwoRowFile) {
  const auto s = ned::EmbeddingStore::load(write_temp("two", "a 1 2\nb 3 4\n"), 2);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.lookup("b"), (std::vector<double>{3, 4}));
}

TEST(EmbeddingLoad, OneMalformedRowAmongTen) {
  std::string body;
  for (int i = 0; i < 10; ++i) body += "w" + std::to_string(i) + (i == 6 ? " 1 x\n" : " 1 2\n");
  const auto s = ned::EmbeddingStore::load(write_temp("ten", body), 2);
  EXPECT_EQ(s.size(), 9u);
  EXPECT_EQ(s.malformed_rows(), 1u);
  EXPECT_FALSE(s.contains("w6"));
}

TEST(EmbeddingLoad, EmptyFileGivesUsableStore) {
  const auto s = ned::EmbeddingStore::load(write_temp("empty", ""), 3);
  EXPECT_EQ(s.size(), 0u);
  EXPECT_EQ(s.embed_label("anything"), (std::vector<double>{0, 0, 0}));
}

TEST(EmbeddingLoad, DeclaredDimensionMismatchReportsLine) {
  try {
    ned::EmbeddingStore::load(write_temp("wrongdim", "\na 1 2 3\n"), 2);
    FAIL() << "expected FormatError";
  } catch (const ned::FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(ned::EmbeddingStore::load(write_temp("header", "5 3\na 1 2 3\n"), 2), ned::FormatError);
}

TEST(EmbeddingLoad, HeaderLineIsSkipped) {
  const auto s = ned::EmbeddingStore::load(write_temp("hdr", "2 2\na 1 2\nb 3 4\n"), 2);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.malformed_rows(), 0u);
}

TEST(EmbeddingLoad, MissingFileIsIoError) {
  EXPECT_THROW(ned::EmbeddingStore::load("/nonexistent/vectors.txt", 2), ned::IoError);
}

TEST(EmbedLabel, Examples) {
  const auto s = toy();
  EXPECT_EQ(s.embed_label("New York"), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(s.embed_label("york"), (std::vector<double>{0, 1}));
  EXPECT_EQ(s.embed_label("instance of"), (std::vector<double>{1, 1}));
}

TEST(EmbedLabel, OovCountsInDenominator) {
  EXPECT_EQ(toy().embed_label("new zealand"), (std::vector<double>{0.5, 0}));
}

TEST(EmbedLabel, EmptyLabelIsContractError) {
  EXPECT_THROW(toy().embed_label("  ,. "), ned::ContractError);
}

TEST(EmbedTokens, RowsAndOov) {
  const auto s = toy();
  const auto m = s.embed_tokens({"new", "york"});
  EXPECT_EQ(m.shape(), (ned::Shape{2, 2}));
  EXPECT_EQ(std::vector<double>(m.values().begin(), m.values().end()), (std::vector<double>{1, 0, 0, 1}));
  const auto o = s.embed_tokens({"zzz"});
  EXPECT_EQ(o[0], 0.0);
  EXPECT_EQ(o[1], 0.0);
}

TEST(EmbedTokens, CaseFolding) {
  EXPECT_EQ(toy().lookup("NEW"), (std::vector<double>{1, 0}));
  ned::EmbeddingStore exact(2, false);
  exact.insert("new", {1, 0});
  EXPECT_FALSE(exact.contains("NEW"));
}

TEST(Tokenize, StripsPunctuationAndFolds) {
  EXPECT_EQ(ned::tokenize("Hello, World!  it's"), (std::vector<std::string>{"hello", "world", "its"}));
  EXPECT_EQ(ned::tokenize("A b", false), (std::vector<std::string>{"A", "b"}));
}

TEST(EmbeddingProperties, LabelIsMeanOfTokenRows) {
  ned::Rng rng(5);
  ned::EmbeddingStore s(4);
  const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta"};
  for (const auto& w : words) {
    std::vector<double> v(4);
    for (double& x : v) x = rng.uniform(-2, 2);
    s.insert(w, v);
  }
  for (const std::string label : {"alpha beta", "gamma  delta   alpha", "beta unknown"}) {
    const auto tokens = ned::tokenize(label);
    const auto mean = ned::reduce_mean(s.embed_tokens(tokens), 0);
    const auto e = s.embed_label(label);
    double max_norm = 0;
    for (const auto& t : tokens) {
      double n = 0;
      for (double x : s.lookup(t)) n += x * x;
      max_norm = std::max(max_norm, std::sqrt(n));
    }
    double norm = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_NEAR(e[i], mean[i], 1e-15);
      norm += e[i] * e[i];
    }
    EXPECT_LE(std::sqrt(norm), max_norm + 1e-12);
  }
  EXPECT_EQ(s.embed_label("alpha   beta"), s.embed_label("alpha beta"));
}

}  // namespace
