#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sail/language.hpp"

namespace sail {

/// Frequency-ranked word list. rank(words()[i]) == i.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Throws ConfigError on a duplicate or empty word.
  Vocabulary(LanguageCode language, std::vector<std::string> words);

  const LanguageCode& language() const { return language_; }
  const std::vector<std::string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  bool contains(std::string_view word) const { return rank(word).has_value(); }
  std::optional<std::size_t> rank(std::string_view word) const;

 private:
  LanguageCode language_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// The first min(n, |vocab|) words in rank order.
std::vector<std::string> top_n(const Vocabulary& vocab, std::size_t n);

/// Unit-normalized word vectors stored row-major; cosine similarity is a dot product.
class EmbeddingSpace {
 public:
  EmbeddingSpace() = default;

  /// Normalizes every row. Throws ConfigError on a dimension mismatch, a duplicate
  /// word or a zero vector.
  static EmbeddingSpace from_rows(LanguageCode language, std::vector<std::string> words,
                                  const std::vector<std::vector<double>>& rows,
                                  std::string source_note = "in-memory");

  const LanguageCode& language() const { return language_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }
  const std::string& source_note() const { return source_note_; }
  const std::vector<std::string>& words() const { return words_; }

  bool contains(std::string_view word) const { return row_of(word).has_value(); }
  std::optional<std::size_t> row_of(std::string_view word) const;
  /// Empty span when the word has no vector.
  std::span<const float> vector(std::string_view word) const;
  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * dimension_, dimension_};
  }

  /// Cosine similarity of two stored vectors, accumulated in double.
  static double dot(std::span<const float> a, std::span<const float> b);

 private:
  friend struct EmbeddingLoader;

  LanguageCode language_;
  std::size_t dimension_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> data_;
  std::string source_note_;
};

struct LoadWarnings {
  std::size_t duplicate_words = 0;
  std::size_t zero_vectors = 0;
};

struct LoadedEmbeddings {
  Vocabulary vocab;
  EmbeddingSpace space;
  LoadWarnings warnings;
};

/// Reads the fastText text format ("<count> <dim>" header, then "word v1 ... vdim"
/// per line, frequency-sorted). Keeps the first occurrence of duplicate words and
/// skips zero vectors; both are counted in `warnings`. Vocabulary and space share
/// the same word set and order. Throws FormatError on malformed input.
LoadedEmbeddings load_embeddings(const std::string& path, LanguageCode language,
                                 std::optional<std::size_t> limit = std::nullopt);

struct Neighbor {
  std::string word;
  double similarity;
};

/// The k candidates most cosine-similar to `query`, descending, ties broken by
/// ascending row (vocabulary rank). Candidates without a vector are ignored.
/// Throws std::out_of_range when the query has no vector and std::invalid_argument
/// when no candidate is usable or k == 0.
std::vector<Neighbor> nearest_neighbors(const EmbeddingSpace& space, std::string_view query,
                                        const std::set<std::string>& candidates, std::size_t k);

/// Gold lexicon for one direction: source word -> non-empty set of gold targets.
struct BliTestSet {
  LanguagePair pair;
  std::map<std::string, std::set<std::string>> entries;

  std::size_t total_golds() const;
};

/// One "source<TAB>target" pair per line; repeated sources accumulate golds and
/// identical lines collapse. Blank lines are skipped. Throws FormatError with the
/// line number on any other malformed line.
BliTestSet load_test_set(const std::string& path, const LanguagePair& pair);

}  // namespace sail
