#include "sail/extraction.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace sail {

namespace {

bool is_hyphen(UChar32 c) { return c == '-' || c == 0x2010 || c == 0x2011; }
bool is_apostrophe(UChar32 c) { return c == '\'' || c == 0x2019 || c == 0x02BC; }
bool is_core(UChar32 c) {
  return u_hasBinaryProperty(c, UCHAR_ALPHABETIC) || u_isdigit(c) || (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}
bool is_line_break(UChar32 c) {
  return c == '\n' || c == '\r' || c == 0x0B || c == 0x0C || c == 0x85 || c == 0x2028 || c == 0x2029;
}

}  // namespace

std::optional<std::string> first_word(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;

  int32_t start = -1;
  while (i < length) {
    int32_t at = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) continue;  // invalid byte sequence: treat as non-word
    if (is_core(c)) {
      start = at;
      break;
    }
    if (is_line_break(c)) return std::nullopt;
  }
  if (start < 0) return std::nullopt;

  i = start;
  int32_t core_end = start;  // end of the last letter or digit in the run
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) break;
    if (is_core(c))
      core_end = i;
    else if (!is_hyphen(c) && !is_apostrophe(c))
      break;
  }
  return std::string(text.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(core_end - start)));
}

std::string_view to_string(PredictionStatus status) {
  switch (status) {
    case PredictionStatus::ok: return "ok";
    case PredictionStatus::no_candidate_in_vocab: return "no_candidate_in_vocab";
    case PredictionStatus::backend_error: return "backend_error";
  }
  return "?";
}

PredictionStatus parse_prediction_status(std::string_view text) {
  if (text == "ok") return PredictionStatus::ok;
  if (text == "no_candidate_in_vocab") return PredictionStatus::no_candidate_in_vocab;
  if (text == "backend_error") return PredictionStatus::backend_error;
  throw std::invalid_argument("unknown prediction status '" + std::string(text) + "'");
}

std::string to_lower_utf8(std::string_view text) {
  auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u.toLower();
  std::string out;
  u.toUTF8String(out);
  return out;
}

Prediction select_prediction(std::string_view query, const Continuations& continuations, const Vocabulary& target_vocab,
                             const ExtractionOptions& options) {
  Prediction p;
  p.query = std::string(query);
  std::optional<double> best;
  for (const auto& c : continuations) {
    auto word = first_word(c.text);
    if (!word) continue;
    p.candidates.emplace_back(*word, c.score);
    std::optional<std::string> accepted;
    if (target_vocab.contains(*word)) {
      accepted = *word;
    } else if (options.lowercase_fallback) {
      auto lower = to_lower_utf8(*word);
      if (target_vocab.contains(lower)) accepted = std::move(lower);
    }
    if (accepted && (!best || c.score > *best)) {
      best = c.score;
      p.predicted = std::move(accepted);
    }
  }
  p.status = p.predicted ? PredictionStatus::ok : PredictionStatus::no_candidate_in_vocab;
  return p;
}

}  // namespace sail
