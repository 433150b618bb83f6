#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sail/backend.hpp"
#include "sail/corpus.hpp"

namespace sail {

/// First word of a generated continuation.
///
/// Leading whitespace and punctuation are skipped; a line break met while
/// skipping ends the search. The word is the maximal run of Unicode letters,
/// combining marks, digits, hyphens and apostrophes that follows, with trailing
/// hyphens and apostrophes removed. Absent when no letter or digit is found.
std::optional<std::string> first_word(std::string_view text);

enum class PredictionStatus { ok, no_candidate_in_vocab, backend_error };

std::string_view to_string(PredictionStatus status);
PredictionStatus parse_prediction_status(std::string_view text);

struct Prediction {
  std::string query;
  std::optional<std::string> predicted;
  /// Extracted first words with their beam scores, in beam order.
  std::vector<std::pair<std::string, double>> candidates;
  PredictionStatus status = PredictionStatus::no_candidate_in_vocab;
  std::string error;  // backend_error only
};

struct ExtractionOptions {
  /// Retry a candidate missing from the vocabulary in lowercase form.
  bool lowercase_fallback = false;
};

/// Unicode lowercase of a UTF-8 string.
std::string to_lower_utf8(std::string_view text);

/// Picks the in-vocabulary candidate with the highest score, earlier beams
/// winning ties.
Prediction select_prediction(std::string_view query, const Continuations& continuations, const Vocabulary& target_vocab,
                             const ExtractionOptions& options = {});

}  // namespace sail
