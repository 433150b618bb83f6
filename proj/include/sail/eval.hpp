#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "sail/corpus.hpp"
#include "sail/extraction.hpp"
#include "sail/language.hpp"

namespace sail {

struct DirectionScore {
  LanguagePair direction;
  std::size_t n_queries = 0;
  std::size_t n_correct = 0;
  double accuracy = 0.0;
};

/// Top-1 accuracy: a prediction is correct when it is any of the gold targets.
/// Missing and failed predictions count as incorrect. Throws
/// std::invalid_argument on an empty test set.
DirectionScore score(const BliTestSet& test, const std::map<std::string, Prediction>& predictions);

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  /// log10 of the p-value, finite even where p_value underflows to 0.
  double log10_p = 0.0;
};

/// Pearson chi-square without continuity correction on the 2x2 table
/// (correct, incorrect) x (system A, system B), with the chi-square(1) survival
/// function as p-value. A degenerate margin gives statistic 0 and p 1.
ChiSquareResult chi_square_2x2(std::size_t correct_a, std::size_t total_a, std::size_t correct_b,
                               std::size_t total_b);

/// "1.1e-251" style, or "< 1e-300" below that.
std::string format_p_value(double p);

struct EvaluationReport {
  std::vector<DirectionScore> directions;
  /// Mean accuracy over the directions in which the language is source or target.
  std::map<LanguageCode, double> language_means;
  double global_mean = 0.0;
  std::string config_hash;
};

/// Unweighted means over directions. Throws std::invalid_argument when empty.
EvaluationReport aggregate(std::vector<DirectionScore> directions, std::string config_hash = {});

/// Pools all directions' counts of two systems into a single test.
ChiSquareResult pooled_chi_square(const EvaluationReport& a, const EvaluationReport& b);

/// "direction<TAB>n<TAB>correct<TAB>accuracy" rows under a header.
std::string report_tsv(const EvaluationReport& report);
std::string report_table(const EvaluationReport& report);

}  // namespace sail
