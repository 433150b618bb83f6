#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sail/backend.hpp"
#include "sail/language.hpp"
#include "sail/prompting.hpp"

namespace sail {

/// Out-of-vocabulary word the consistency mock returns as its second beam.
inline constexpr std::string_view kMockDistractor = "oov-distractor";

/// Prompt -> continuations lookup; unknown prompts yield no continuation.
MockResponder make_table_mock(std::map<std::string, Continuations> table);

/// A synthetic bilingual world answered perfectly except on noisy words.
struct ConsistencyWorld {
  /// Direction -> source word -> clean translation.
  std::map<LanguagePair, std::map<std::string, std::string>> forward;
  /// Direction -> source words that are mistranslated in that direction.
  std::map<LanguagePair, std::set<std::string>> noise;
  LanguageNames names = LanguageNames::builtin();
  TemplateRegistry templates = TemplateRegistry::builtin();
};

/// The wrong translation a noisy word receives: the clean translation of the next
/// source word in the map's sorted key order (wrapping around).
std::string corrupted_translation(const std::map<std::string, std::string>& forward, const std::string& word);

/// Mock backend over a ConsistencyWorld. For a prompt translating w in direction d
/// it returns beam 1 = the mapped (or corrupted, when w is noisy) word at score
/// -0.1 and the distractor at score -0.9. Words outside the map get only the
/// distractor. Prompts matching no registered template raise
/// BackendError(rejected).
BackendConfig make_consistency_mock(ConsistencyWorld world);

/// Mock backend from JSON: {"table": {prompt: [{text, score}, ...]}} or
/// {"consistency": {"de-fr": {word: translation}}, "noise": {"de-fr": [word]}}.
BackendConfig mock_backend_from_json(const nlohmann::json& doc, const LanguageNames& names,
                                     const TemplateRegistry& templates);
BackendConfig load_mock_backend(const std::string& path, const LanguageNames& names,
                                const TemplateRegistry& templates);

}  // namespace sail
