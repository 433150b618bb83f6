#include "sail/language.hpp"

#include "sail/error.hpp"

namespace sail {

LanguagePair parse_language_pair(std::string_view text) {
  auto sep = text.find_first_of("-_");
  if (sep == std::string_view::npos || sep == 0 || sep + 1 == text.size())
    throw ConfigError("malformed language pair '" + std::string(text) + "' (expected e.g. de-fr)");
  LanguagePair pair{std::string(text.substr(0, sep)), std::string(text.substr(sep + 1))};
  if (pair.target.find_first_of("-_") != std::string::npos)
    throw ConfigError("malformed language pair '" + std::string(text) + "'");
  if (pair.source == pair.target)
    throw ConfigError("language pair '" + std::string(text) + "' has identical source and target");
  return pair;
}

LanguageNames LanguageNames::builtin() {
  LanguageNames names;
  names.names_ = {
      {"bg", "Bulgarian"}, {"ca", "Catalan"}, {"de", "German"},  {"en", "English"},
      {"fr", "French"},    {"hu", "Hungarian"}, {"it", "Italian"}, {"ru", "Russian"},
  };
  return names;
}

void LanguageNames::add(const LanguageCode& code, const std::string& name) {
  if (code.empty() || name.empty()) throw ConfigError("language code and name must be non-empty");
  names_[code] = name;
}

const std::string& LanguageNames::name(const LanguageCode& code) const {
  auto it = names_.find(code);
  if (it == names_.end()) throw ConfigError("no English name registered for language code '" + code + "'");
  return it->second;
}

}  // namespace sail
