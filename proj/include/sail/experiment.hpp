#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sail/backend.hpp"
#include "sail/language.hpp"
#include "sail/prompting.hpp"
#include "sail/sail.hpp"

namespace sail {

/// Everything one experiment needs. Loaded from a JSON file; relative paths are
/// resolved against the file's directory.
struct ExperimentConfig {
  std::vector<LanguagePair> pairs;
  std::map<LanguageCode, std::string> embeddings;
  std::size_t vocab_limit = 200'000;
  /// "de-fr" -> gold lexicon path. Directions without an entry are not evaluated.
  std::map<std::string, std::string> test_sets;
  /// When non-empty, only these directions are evaluated.
  std::vector<LanguagePair> directions;
  SailConfig sail;
  std::string template_family = "llama2_13b";
  BackendConfig backend;
  std::string mock_table;
  std::optional<std::string> cache_dir;
  std::string out_dir = "out";
  std::vector<int> sweep_n_it;
  std::vector<std::size_t> sweep_n_f;
  TemplateRegistry templates = TemplateRegistry::builtin();
  LanguageNames names = LanguageNames::builtin();

  /// Throws ConfigError naming the offending field.
  static ExperimentConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);

  /// Checks fields and that referenced files exist; binds the mock table.
  /// Throws ConfigError naming the offending field.
  void validate();

  /// Settings that determine results (output and cache locations excluded).
  nlohmann::json snapshot() const;
  /// Hex SHA-256 of the snapshot.
  std::string hash() const;
};

struct RunSummary {
  EvaluationReport report;
  BackendStats backend;
  std::vector<std::filesystem::path> artifacts;
};

/// Zero-shot baseline over all configured test directions. Writes
/// predictions.tsv, report.tsv, report.txt, manifest.json and timing.json.
RunSummary cmd_zero_shot(const ExperimentConfig& cfg);

/// Full SAIL run; additionally writes dictionary.<x>-<y>.tsv per pair.
RunSummary cmd_sail(const ExperimentConfig& cfg);

struct SweepRow {
  std::string parameter;  // "n_it" or "n_f"
  std::size_t value = 0;
  std::string direction;  // a direction or "mean"
  double accuracy = 0.0;
};

/// One cmd_sail per sweep setting under <out>/n_it=<v> and <out>/n_f=<v>, plus
/// <out>/sweep.tsv ("parameter value direction accuracy"). Throws ConfigError
/// when both sweep lists are empty.
std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg);

struct DictionarySample {
  std::vector<std::string> lines;  // dictionary TSV lines
  std::optional<std::string> note;
};

/// Seeded uniform sample of k dictionary lines without replacement, returned in
/// dictionary order. k larger than the dictionary returns everything with a note.
DictionarySample cmd_inspect_dict(const std::string& path, std::size_t k, std::uint64_t seed);

/// Predictions TSV: "direction source predicted status correct" rows.
std::string predictions_tsv(const std::vector<DirectionPredictions>& predictions,
                            const std::vector<BliTestSet>& tests, const std::string& config_hash);

}  // namespace sail
