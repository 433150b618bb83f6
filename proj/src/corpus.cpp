#include "sail/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sail/error.hpp"

namespace sail {

namespace {

// Splits on ASCII spaces, dropping empty fields (fastText rows end with a space).
std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos == line.size()) break;
    auto end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

Vocabulary::Vocabulary(LanguageCode language, std::vector<std::string> words)
    : language_(std::move(language)), words_(std::move(words)) {
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw ConfigError("vocabulary contains an empty word");
    if (!index_.emplace(words_[i], i).second)
      throw ConfigError("vocabulary contains duplicate word '" + words_[i] + "'");
  }
}

std::optional<std::size_t> Vocabulary::rank(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> top_n(const Vocabulary& vocab, std::size_t n) {
  const auto& words = vocab.words();
  return {words.begin(), words.begin() + static_cast<std::ptrdiff_t>(std::min(n, words.size()))};
}

EmbeddingSpace EmbeddingSpace::from_rows(LanguageCode language, std::vector<std::string> words,
                                         const std::vector<std::vector<double>>& rows,
                                         std::string source_note) {
  if (words.size() != rows.size()) throw ConfigError("word and vector counts differ");
  EmbeddingSpace space;
  space.language_ = std::move(language);
  space.source_note_ = std::move(source_note);
  space.dimension_ = rows.empty() ? 0 : rows.front().size();
  if (!rows.empty() && space.dimension_ == 0) throw ConfigError("vectors must have positive dimension");
  space.data_.reserve(rows.size() * space.dimension_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != space.dimension_) throw ConfigError("inconsistent vector dimension for '" + words[i] + "'");
    double norm = 0.0;
    for (double v : rows[i]) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw ConfigError("zero vector for '" + words[i] + "'");
    if (!space.index_.emplace(words[i], i).second) throw ConfigError("duplicate word '" + words[i] + "'");
    for (double v : rows[i]) space.data_.push_back(static_cast<float>(v / norm));
  }
  space.words_ = std::move(words);
  return space;
}

std::optional<std::size_t> EmbeddingSpace::row_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const float> EmbeddingSpace::vector(std::string_view word) const {
  auto row_index = row_of(word);
  if (!row_index) return {};
  return row(*row_index);
}

double EmbeddingSpace::dot(std::span<const float> a, std::span<const float> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += static_cast<double>(a[i]) * b[i];
  return sum;
}

struct EmbeddingLoader {
  static LoadedEmbeddings load(const std::string& path, LanguageCode language,
                               std::optional<std::size_t> limit) {
    std::ifstream in(path);
    if (!in) throw FormatError(path, 0, "cannot open embedding file");

    std::string line;
    if (!std::getline(in, line)) throw FormatError(path, 1, "missing header");
    strip_cr(line);
    auto header = split_spaces(line);
    std::size_t count = 0, dim = 0;
    if (header.size() != 2 || !parse_number(header[0], count) || !parse_number(header[1], dim) || dim == 0)
      throw FormatError(path, 1, "malformed header, expected '<count> <dimension>'");

    const std::size_t wanted = limit ? std::min(*limit, count) : count;
    LoadedEmbeddings out;
    EmbeddingSpace& space = out.space;
    space.language_ = language;
    space.dimension_ = dim;
    space.source_note_ = path;
    space.data_.reserve(wanted * dim);

    std::vector<double> row(dim);
    std::size_t line_no = 1, rows_read = 0;
    while (space.words_.size() < wanted && std::getline(in, line)) {
      ++line_no;
      strip_cr(line);
      if (line.empty()) continue;
      ++rows_read;
      if (rows_read > count) throw FormatError(path, line_no, "more rows than the header count");
      auto fields = split_spaces(line);
      if (fields.size() != dim + 1)
        throw FormatError(path, line_no, "expected word and " + std::to_string(dim) + " components, got " +
                                             std::to_string(fields.size()) + " fields");
      double norm = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        if (!parse_number(fields[d + 1], row[d]) || !std::isfinite(row[d]))
          throw FormatError(path, line_no, "non-numeric component '" + std::string(fields[d + 1]) + "'");
        norm += row[d] * row[d];
      }
      std::string word(fields[0]);
      if (space.index_.count(word)) {
        ++out.warnings.duplicate_words;
        continue;
      }
      if (norm == 0.0) {
        ++out.warnings.zero_vectors;
        continue;
      }
      norm = std::sqrt(norm);
      space.index_.emplace(word, space.words_.size());
      space.words_.push_back(std::move(word));
      for (double v : row) space.data_.push_back(static_cast<float>(v / norm));
    }
    if (space.words_.size() < wanted && rows_read < count)
      throw FormatError(path, line_no, "file ends after " + std::to_string(rows_read) + " of " +
                                           std::to_string(count) + " rows");

    out.vocab = Vocabulary(language, space.words_);
    return out;
  }
};

LoadedEmbeddings load_embeddings(const std::string& path, LanguageCode language,
                                 std::optional<std::size_t> limit) {
  return EmbeddingLoader::load(path, std::move(language), limit);
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingSpace& space, std::string_view query,
                                        const std::set<std::string>& candidates, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  auto q = space.vector(query);
  if (q.empty()) throw std::out_of_range("no vector for query word '" + std::string(query) + "'");

  struct Scored {
    double sim;
    std::size_t row;
  };
  std::vector<Scored> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (auto r = space.row_of(c)) scored.push_back({EmbeddingSpace::dot(q, space.row(*r)), *r});
  }
  if (scored.empty()) throw std::invalid_argument("empty candidate set");

  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                    [](const Scored& a, const Scored& b) { return a.sim != b.sim ? a.sim > b.sim : a.row < b.row; });
  std::vector<Neighbor> result;
  result.reserve(take);
  for (std::size_t i = 0; i < take; ++i) result.push_back({space.words()[scored[i].row], scored[i].sim});
  return result;
}

std::size_t BliTestSet::total_golds() const {
  std::size_t n = 0;
  for (const auto& [_, golds] : entries) n += golds.size();
  return n;
}

BliTestSet load_test_set(const std::string& path, const LanguagePair& pair) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, 0, "cannot open test set");
  BliTestSet set{pair, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos || tab == 0 ||
        tab + 1 == line.size())
      throw FormatError(path, line_no, "expected exactly two tab-separated fields");
    set.entries[line.substr(0, tab)].insert(line.substr(tab + 1));
  }
  return set;
}

}  // namespace sail
