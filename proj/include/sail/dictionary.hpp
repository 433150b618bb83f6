#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sail/language.hpp"
#include "sail/prompting.hpp"

namespace sail {

/// Which harvesting side produced a pair; both bits are set when both did.
enum Provenance : unsigned { from_x_side = 1u, from_y_side = 2u };

/// Self-generated translation pairs in canonical (x_word, y_word) orientation.
class HighConfidenceDictionary {
 public:
  using Entry = std::pair<std::string, std::string>;

  HighConfidenceDictionary() = default;
  explicit HighConfidenceDictionary(LanguagePair pair, int iteration = 0) : pair_(std::move(pair)), iteration_(iteration) {}

  const LanguagePair& pair() const { return pair_; }
  int iteration() const { return iteration_; }
  void set_iteration(int iteration) { iteration_ = iteration; }

  /// Merges provenance when the pair is already present.
  void add(const std::string& x_word, const std::string& y_word, unsigned provenance);
  bool contains(const std::string& x_word, const std::string& y_word) const {
    return entries_.count({x_word, y_word}) != 0;
  }
  const std::map<Entry, unsigned>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t count_from(Provenance side) const;

  /// Pairs oriented for translating x->y (forward) or y->x (flipped), in entry order.
  std::vector<IclExample> oriented(bool forward) const;

  /// "x_word<TAB>y_word<TAB>provenance<TAB>iteration" per line, sorted by x then y.
  /// Provenance is "x", "y" or "x+y".
  std::string to_tsv() const;
  void write_tsv(const std::string& path) const;
  /// Throws FormatError on a malformed line or mixed iteration numbers.
  static HighConfidenceDictionary read_tsv(const std::string& path, const LanguagePair& pair);

  friend bool operator==(const HighConfidenceDictionary&, const HighConfidenceDictionary&) = default;

 private:
  LanguagePair pair_;
  int iteration_ = 0;
  std::map<Entry, unsigned> entries_;
};

}  // namespace sail
