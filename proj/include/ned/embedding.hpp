#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ned/errors.hpp"
#include "ned/tensor.hpp"

namespace ned {

/// Splits on whitespace after deleting ASCII punctuation; lowercases ASCII
/// letters when `fold_case` is set.
inline std::vector<std::string> tokenize(std::string_view text, bool fold_case = true) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (c < 0x80 && std::ispunct(c)) {
      continue;
    } else {
      current.push_back(fold_case && c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

/// Token -> fixed-width vector table. Immutable once loaded.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dimension = 300, bool fold_case = true)
      : dimension_(dimension), fold_case_(fold_case) {
    if (dimension == 0) throw ContractError("embedding dimension must be positive");
  }

  /// Reads the whitespace-separated text layout `token v_1 ... v_d`.
  ///
  /// An optional leading `<count> <dimension>` header is skipped. If the first
  /// data row carries a different number of values than `dimension`, the file
  /// is rejected; later rows that do not parse are skipped and counted.
  static EmbeddingStore load(const std::string& path, std::size_t dimension, bool fold_case = true) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embedding file '" + path + "'");
    EmbeddingStore store(dimension, fold_case);
    std::string line;
    std::size_t line_no = 0;
    bool seen_row = false;
    std::vector<double> values;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::istringstream fields(line);
      std::string token;
      if (!(fields >> token)) continue;
      std::vector<std::string> rest;
      for (std::string f; fields >> f;) rest.push_back(std::move(f));

      if (!seen_row && line_no == 1 && rest.size() == 1 && is_integer(token) && is_integer(rest[0])) {
        if (std::stoull(rest[0]) != dimension)
          throw FormatError("header declares dimension " + rest[0] + ", expected " +
                                std::to_string(dimension),
                            line_no);
        continue;
      }

      values.clear();
      bool numeric = true;
      for (const auto& f : rest) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc() || ptr != f.data() + f.size()) {
          numeric = false;
          break;
        }
        values.push_back(v);
      }

      if (!seen_row && numeric && values.size() != dimension)
        throw FormatError("row has " + std::to_string(values.size()) + " values, declared dimension is " +
                              std::to_string(dimension),
                          line_no);
      if (!numeric || values.size() != dimension) {
        ++store.malformed_rows_;
        continue;
      }
      seen_row = true;
      if (fold_case) token = fold(token);
      store.table_.try_emplace(std::move(token), values);
    }
    return store;
  }

  /// Adds or replaces a row. Used to build in-memory tables.
  void insert(std::string token, std::vector<double> vector) {
    if (vector.size() != dimension_)
      throw ShapeError("embedding for '" + token + "' has " + std::to_string(vector.size()) +
                       " components, expected " + std::to_string(dimension_));
    if (fold_case_) token = fold(token);
    table_[std::move(token)] = std::move(vector);
  }

  std::size_t dimension() const { return dimension_; }
  bool fold_case() const { return fold_case_; }
  std::size_t size() const { return table_.size(); }
  std::size_t malformed_rows() const { return malformed_rows_; }
  bool contains(std::string_view token) const { return find(token) != nullptr; }

  /// Row for `token`, or nullptr when out of vocabulary.
  const std::vector<double>* find(std::string_view token) const {
    auto it = table_.find(fold_case_ ? fold(token) : std::string(token));
    return it == table_.end() ? nullptr : &it->second;
  }

  /// All rows sorted by token.
  std::vector<std::pair<std::string, std::vector<double>>> entries() const {
    std::vector<std::pair<std::string, std::vector<double>>> out(table_.begin(), table_.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
  }

  /// Vector of one token; zero for OOV tokens.
  std::vector<double> lookup(std::string_view token) const {
    const auto* row = find(token);
    return row ? *row : std::vector<double>(dimension_, 0.0);
  }

  /// Mean of the label's token vectors. OOV tokens contribute zero but still
  /// count in the denominator.
  std::vector<double> embed_label(std::string_view label) const {
    const auto tokens = tokenize(label, fold_case_);
    if (tokens.empty()) throw ContractError("label '" + std::string(label) + "' has no tokens");
    std::vector<double> mean(dimension_, 0.0);
    for (const auto& t : tokens)
      if (const auto* row = find(t))
        for (std::size_t i = 0; i < dimension_; ++i) mean[i] += (*row)[i];
    const double inv = 1.0 / static_cast<double>(tokens.size());
    for (double& x : mean) x *= inv;
    return mean;
  }

  /// n x dimension matrix, one row per token.
  Tensor embed_tokens(const std::vector<std::string>& tokens) const {
    if (tokens.empty()) throw ContractError("embed_tokens: empty token list");
    std::vector<double> values;
    values.reserve(tokens.size() * dimension_);
    for (const auto& t : tokens) {
      const auto* row = find(t);
      if (row)
        values.insert(values.end(), row->begin(), row->end());
      else
        values.insert(values.end(), dimension_, 0.0);
    }
    return Tensor::matrix(tokens.size(), dimension_, std::move(values));
  }

 private:
  static std::string fold(std::string_view s) {
    std::string out(s);
    for (char& c : out)
      if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  }

  static bool is_integer(const std::string& s) {
    return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
  }

  std::size_t dimension_;
  bool fold_case_;
  std::size_t malformed_rows_ = 0;
  std::unordered_map<std::string, std::vector<double>> table_;
};

}  // namespace ned
