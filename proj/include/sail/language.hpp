#pragma once

#include <map>
#include <string>
#include <string_view>

namespace sail {

/// ISO 639-1 code, e.g. "de".
using LanguageCode = std::string;

struct LanguagePair {
  LanguageCode source;
  LanguageCode target;

  LanguagePair flipped() const { return {target, source}; }
  /// "de-fr"
  std::string str() const { return source + "-" + target; }

  friend auto operator<=>(const LanguagePair&, const LanguagePair&) = default;
};

/// Parses "de-fr" (or "de_fr"); throws ConfigError when malformed or source == target.
LanguagePair parse_language_pair(std::string_view text);

/// Code -> English exonym used when rendering prompts.
class LanguageNames {
 public:
  /// Registry preloaded with the benchmark languages (bg ca de en fr hu it ru).
  static LanguageNames builtin();

  void add(const LanguageCode& code, const std::string& name);
  /// Throws ConfigError for an unregistered code.
  const std::string& name(const LanguageCode& code) const;
  bool contains(const LanguageCode& code) const { return names_.count(code) != 0; }
  const std::map<LanguageCode, std::string>& all() const { return names_; }

 private:
  std::map<LanguageCode, std::string> names_;
};

}  // namespace sail
