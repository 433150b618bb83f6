#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sail/backend.hpp"
#include "sail/corpus.hpp"
#include "sail/dictionary.hpp"
#include "sail/eval.hpp"
#include "sail/extraction.hpp"
#include "sail/language.hpp"
#include "sail/prompting.hpp"

namespace sail {

struct SailConfig {
  /// Dictionary inferences before final inference; 0 is plain zero-shot.
  int n_iterations = 1;
  /// Most frequent words per language used for harvesting.
  std::size_t n_frequent = 5000;
  int beam = 5;
  std::size_t shots = 5;
  int max_new_tokens = 10;
  bool back_translation = true;
  /// Union each iteration's harvest into the previous dictionary instead of rebuilding.
  bool accumulate = false;
  ExtractionOptions extraction;
  std::size_t concurrency = 8;

  /// Throws ConfigError.
  void validate() const;
  nlohmann::json to_json() const;
};

struct LanguageAssets {
  Vocabulary vocab;
  EmbeddingSpace space;
};

enum class Direction { x_to_y, y_to_x };

struct IterationStats {
  int iteration = 0;
  ShotMode shot_mode = ShotMode::zero;
  std::size_t from_x_side = 0;
  std::size_t from_y_side = 0;
  std::size_t total = 0;
};

struct HarvestResult {
  /// (w, w_hat) in the orientation of the harvest direction, sorted.
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t forward_ok = 0;
  std::size_t backend_errors = 0;
};

struct DirectionPredictions {
  LanguagePair direction;
  std::map<std::string, Prediction> predictions;
};

struct SailOutcome {
  std::optional<HighConfidenceDictionary> dictionary;
  std::vector<DirectionPredictions> predictions;
  std::vector<IterationStats> iterations;
  EvaluationReport report;
  std::vector<std::string> warnings;
};

/// SAIL for one language pair x-y: harvest high-confidence pairs with
/// back-translation, refine them over iterations, then translate test words
/// few-shot with the final dictionary as in-context example store.
class SailPipeline {
 public:
  SailPipeline(LanguagePair pair, const LanguageAssets& x, const LanguageAssets& y, const TemplateSpec& templates,
               const LanguageNames& names, Backend& backend, SailConfig cfg);

  const LanguagePair& pair() const { return pair_; }
  const SailConfig& config() const { return cfg_; }
  LanguagePair direction_pair(Direction d) const { return d == Direction::x_to_y ? pair_ : pair_.flipped(); }

  /// Zero-shot when `dict` is null or empty, few-shot otherwise. Backend
  /// failures become status backend_error.
  Prediction translate_word(const std::string& word, Direction d, const HighConfidenceDictionary* dict) const;

  /// The prompt translate_word would send.
  std::string prompt_for(const std::string& word, Direction d, const HighConfidenceDictionary* dict) const;

  /// translate_word over many words, concurrently; results keyed by word.
  std::map<std::string, Prediction> translate_all(const std::vector<std::string>& words, Direction d,
                                                  const HighConfidenceDictionary* dict) const;

  /// Top-N_f source words of direction d translated forward, kept when the
  /// back-translation of the prediction (same shot mode, flipped dictionary)
  /// returns the source word exactly. Without back-translation every ok forward
  /// pair is kept.
  HarvestResult harvest_pairs(Direction d, const HighConfidenceDictionary* prev) const;

  /// Union of both harvest sides in (x, y) orientation, iteration = prev + 1.
  HighConfidenceDictionary build_dictionary(const HighConfidenceDictionary* prev) const;

  /// Full run over test sets whose pairs are (x, y) and/or (y, x).
  SailOutcome run(const std::vector<BliTestSet>& tests, const std::string& config_hash = {}) const;

 private:
  struct Side {
    const LanguageAssets* source;
    const LanguageAssets* target;
  };
  Side side(Direction d) const;

  std::string render(const std::string& word, Direction d, const IclSelector* selector) const;
  Prediction translate_with(const std::string& word, Direction d, const IclSelector* selector) const;
  std::map<std::string, Prediction> translate_many(const std::vector<std::string>& words, Direction d,
                                                   const IclSelector* selector) const;
  std::optional<IclSelector> selector_for(Direction d, const HighConfidenceDictionary* dict) const;

  LanguagePair pair_;
  const LanguageAssets* x_;
  const LanguageAssets* y_;
  const TemplateSpec* templates_;
  const LanguageNames* names_;
  Backend* backend_;
  SailConfig cfg_;
};

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
/// thrown is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace sail
