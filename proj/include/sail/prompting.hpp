#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sail/corpus.hpp"
#include "sail/language.hpp"

namespace sail {

enum class ShotMode { zero, few };

std::string_view to_string(ShotMode mode);

/// Prompt patterns for one model family. Placeholders: {src} and {tgt} (English
/// language names), {word} (source word), {answer} (target word, few-shot items
/// only). With `quote_source`, {word} is wrapped in single quotes in few-shot
/// items and the query clause.
struct TemplateSpec {
  std::string family;
  std::string zero;      // "The {src} word {word} in {tgt} is:"
  std::string few_item;  // "The {src} word {word} in {tgt} is {answer}."
  std::string query;     // "The {src} word {word} in {tgt} is"
  bool quote_source = false;
  std::string separator = " ";

  /// Throws ConfigError when a pattern lacks a required placeholder.
  void validate() const;
};

struct TemplateId {
  std::string family;
  ShotMode mode = ShotMode::zero;
};

class TemplateRegistry {
 public:
  /// llama7b, llama2_7b, llama13b, llama2_13b and chat.
  static TemplateRegistry builtin();

  /// Adds or replaces a family.
  void add(TemplateSpec spec);
  /// Throws ConfigError for an unknown family.
  const TemplateSpec& get(const std::string& family) const;
  bool contains(const std::string& family) const { return specs_.count(family) != 0; }
  const std::map<std::string, TemplateSpec>& all() const { return specs_; }

  /// Reads a JSON array of {family, zero, few_item, query, quote_source, separator}.
  void merge_json(const nlohmann::json& entries);
  nlohmann::json to_json() const;

 private:
  std::map<std::string, TemplateSpec> specs_;
};

struct IclExample {
  std::string source_word;
  std::string target_word;

  friend bool operator==(const IclExample&, const IclExample&) = default;
};

std::string render_zero_shot(const TemplateSpec& spec, const LanguageNames& names, const LanguagePair& pair,
                             std::string_view word);

/// Examples in the given order followed by the query clause. Throws
/// std::invalid_argument when `examples` is empty.
std::string render_few_shot(const TemplateSpec& spec, const LanguageNames& names, const LanguagePair& pair,
                            std::span<const IclExample> examples, std::string_view word);

/// Dispatches on `id.mode`; `examples` is ignored for zero-shot.
std::string render_prompt(const TemplateRegistry& registry, const TemplateId& id, const LanguageNames& names,
                          const LanguagePair& pair, std::span<const IclExample> examples, std::string_view word);

/// Inverse of rendering, used by mock backends to recover the request.
struct ParsedPrompt {
  ShotMode mode = ShotMode::zero;
  std::string source_name;
  std::string target_name;
  std::string word;
  std::vector<IclExample> examples;
};

std::optional<ParsedPrompt> parse_prompt(const TemplateSpec& spec, std::string_view prompt);
/// Tries every registered family.
std::optional<ParsedPrompt> parse_prompt(const TemplateRegistry& registry, std::string_view prompt);

/// Retrieves in-context examples from an oriented pool of dictionary pairs.
///
/// Entries are ranked by cosine similarity between their source word and the
/// query in the source embedding space, most similar first; equal similarities
/// fall back to ascending vocabulary rank of the source word and then pool order.
/// Entries whose source word equals the query are never returned. Entries whose
/// source word has no vector rank after all others. When the query itself has no
/// vector, entries are ranked by vocabulary rank alone (most frequent first).
class IclSelector {
 public:
  IclSelector(std::vector<IclExample> pool, const EmbeddingSpace& space, const Vocabulary& vocab);

  bool empty() const { return pool_.empty(); }
  std::size_t size() const { return pool_.size(); }
  /// At most k entries; fewer when the pool has fewer eligible entries.
  std::vector<IclExample> select(std::string_view query, std::size_t k) const;

 private:
  std::vector<IclExample> pool_;
  std::vector<std::optional<std::size_t>> rows_;
  std::vector<std::size_t> ranks_;
  const EmbeddingSpace* space_;
};

/// One-shot form of IclSelector::select. Throws std::invalid_argument on an empty pool.
std::vector<IclExample> select_icl_examples(std::span<const IclExample> pool, const EmbeddingSpace& space,
                                            const Vocabulary& vocab, std::string_view query, std::size_t k);

}  // namespace sail
