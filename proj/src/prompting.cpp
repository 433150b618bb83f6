#include "sail/prompting.hpp"

#include <algorithm>
#include <limits>
#include <regex>
#include <stdexcept>

#include "sail/error.hpp"

namespace sail {

namespace {

constexpr std::string_view kSrc = "{src}";
constexpr std::string_view kTgt = "{tgt}";
constexpr std::string_view kWord = "{word}";
constexpr std::string_view kAnswer = "{answer}";

struct Fill {
  std::string_view src, tgt, word, answer;
};

std::string substitute(std::string_view pattern, const Fill& fill) {
  std::string out;
  out.reserve(pattern.size() + 32);
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    if (pattern[pos] == '{') {
      auto rest = pattern.substr(pos);
      const std::pair<std::string_view, std::string_view> slots[] = {
          {kSrc, fill.src}, {kTgt, fill.tgt}, {kWord, fill.word}, {kAnswer, fill.answer}};
      bool matched = false;
      for (const auto& [name, value] : slots) {
        if (rest.substr(0, name.size()) == name) {
          out += value;
          pos += name.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    out += pattern[pos++];
  }
  return out;
}

std::string quoted(std::string_view word, bool quote) {
  return quote ? "'" + std::string(word) + "'" : std::string(word);
}

bool has(std::string_view pattern, std::string_view slot) { return pattern.find(slot) != std::string_view::npos; }

// Placeholder slots in order of appearance.
enum class Slot { src, tgt, word, answer };

struct CompiledPattern {
  std::regex re;
  std::vector<Slot> slots;
};

CompiledPattern compile(std::string_view pattern, bool quote_word, std::string_view suffix) {
  static const std::regex kSpecial(R"([.^$|()\[\]{}*+?\\])");
  auto escape = [](std::string_view lit) { return std::regex_replace(std::string(lit), kSpecial, R"(\$&)"); };

  CompiledPattern out;
  std::string re;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    std::size_t next = pattern.find('{', pos);
    std::optional<Slot> slot;
    std::size_t len = 0;
    while (next != std::string_view::npos) {
      auto rest = pattern.substr(next);
      if (rest.starts_with(kSrc)) slot = Slot::src, len = kSrc.size();
      else if (rest.starts_with(kTgt)) slot = Slot::tgt, len = kTgt.size();
      else if (rest.starts_with(kWord)) slot = Slot::word, len = kWord.size();
      else if (rest.starts_with(kAnswer)) slot = Slot::answer, len = kAnswer.size();
      if (slot) break;
      next = pattern.find('{', next + 1);
    }
    if (!slot) {
      re += escape(pattern.substr(pos));
      break;
    }
    re += escape(pattern.substr(pos, next - pos));
    re += (*slot == Slot::word && quote_word) ? "'(.+?)'" : "(.+?)";
    out.slots.push_back(*slot);
    pos = next + len;
  }
  re += escape(suffix);
  out.re = std::regex(re, std::regex::ECMAScript);
  return out;
}

struct Captures {
  std::string src, tgt, word, answer;
};

Captures collect(const CompiledPattern& pattern, const std::smatch& m) {
  Captures c;
  for (std::size_t i = 0; i < pattern.slots.size(); ++i) {
    std::string value = m[i + 1].str();
    switch (pattern.slots[i]) {
      case Slot::src: c.src = std::move(value); break;
      case Slot::tgt: c.tgt = std::move(value); break;
      case Slot::word: c.word = std::move(value); break;
      case Slot::answer: c.answer = std::move(value); break;
    }
  }
  return c;
}

}  // namespace

std::string_view to_string(ShotMode mode) { return mode == ShotMode::zero ? "zero" : "few"; }

void TemplateSpec::validate() const {
  auto require = [&](std::string_view pattern, std::string_view slot, const char* field) {
    if (!has(pattern, slot))
      throw ConfigError("template '" + family + "': " + field + " lacks placeholder " + std::string(slot));
  };
  if (family.empty()) throw ConfigError("template family name must be non-empty");
  for (auto slot : {kSrc, kTgt, kWord}) {
    require(zero, slot, "zero");
    require(few_item, slot, "few_item");
    require(query, slot, "query");
  }
  require(few_item, kAnswer, "few_item");
}

TemplateRegistry TemplateRegistry::builtin() {
  TemplateRegistry r;
  const std::string plain_zero = "The {src} word {word} in {tgt} is:";
  const std::string few_item = "The {src} word {word} in {tgt} is {answer}.";
  const std::string few_query = "The {src} word {word} in {tgt} is";
  r.add({"llama7b", plain_zero, few_item, few_query, true, " "});
  r.add({"llama2_7b", plain_zero, few_item, few_query, false, " "});
  r.add({"llama13b", "Translate from {src} to {tgt}: {word}=>", few_item, few_query, true, " "});
  r.add({"llama2_13b", plain_zero, few_item, few_query, true, " "});
  r.add({"chat", "Translate the {src} word {word} into {tgt}:", "Translate the {src} word {word} into {tgt}: {answer}",
         "Translate the {src} word {word} into {tgt}:", false, "\n"});
  return r;
}

void TemplateRegistry::add(TemplateSpec spec) {
  spec.validate();
  std::string family = spec.family;
  specs_[family] = std::move(spec);
}

const TemplateSpec& TemplateRegistry::get(const std::string& family) const {
  auto it = specs_.find(family);
  if (it == specs_.end()) throw ConfigError("unknown template family '" + family + "'");
  return it->second;
}

void TemplateRegistry::merge_json(const nlohmann::json& entries) {
  if (!entries.is_array()) throw ConfigError("templates: expected an array");
  for (const auto& e : entries) {
    try {
      TemplateSpec spec;
      spec.family = e.at("family").get<std::string>();
      spec.zero = e.at("zero").get<std::string>();
      spec.few_item = e.at("few_item").get<std::string>();
      spec.query = e.at("query").get<std::string>();
      spec.quote_source = e.value("quote_source", false);
      spec.separator = e.value("separator", std::string(" "));
      add(std::move(spec));
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(std::string("templates: ") + ex.what());
    }
  }
}

nlohmann::json TemplateRegistry::to_json() const {
  auto out = nlohmann::json::array();
  for (const auto& [_, s] : specs_)
    out.push_back({{"family", s.family},
                   {"zero", s.zero},
                   {"few_item", s.few_item},
                   {"query", s.query},
                   {"quote_source", s.quote_source},
                   {"separator", s.separator}});
  return out;
}

std::string render_zero_shot(const TemplateSpec& spec, const LanguageNames& names, const LanguagePair& pair,
                             std::string_view word) {
  return substitute(spec.zero, {names.name(pair.source), names.name(pair.target), word, {}});
}

std::string render_few_shot(const TemplateSpec& spec, const LanguageNames& names, const LanguagePair& pair,
                            std::span<const IclExample> examples, std::string_view word) {
  if (examples.empty()) throw std::invalid_argument("few-shot prompt needs at least one example");
  const std::string& src = names.name(pair.source);
  const std::string& tgt = names.name(pair.target);
  std::string out;
  for (const auto& ex : examples) {
    out += substitute(spec.few_item, {src, tgt, quoted(ex.source_word, spec.quote_source), ex.target_word});
    out += spec.separator;
  }
  out += substitute(spec.query, {src, tgt, quoted(word, spec.quote_source), {}});
  return out;
}

std::string render_prompt(const TemplateRegistry& registry, const TemplateId& id, const LanguageNames& names,
                          const LanguagePair& pair, std::span<const IclExample> examples, std::string_view word) {
  const auto& spec = registry.get(id.family);
  return id.mode == ShotMode::zero ? render_zero_shot(spec, names, pair, word)
                                   : render_few_shot(spec, names, pair, examples, word);
}

std::optional<ParsedPrompt> parse_prompt(const TemplateSpec& spec, std::string_view prompt_view) {
  const std::string prompt(prompt_view);
  std::smatch m;

  const auto zero = compile(spec.zero, false, "");
  if (std::regex_match(prompt, m, zero.re)) {
    auto c = collect(zero, m);
    return ParsedPrompt{ShotMode::zero, c.src, c.tgt, c.word, {}};
  }

  // Items are consumed left to right before the query clause is tried, since the
  // query pattern alone could otherwise swallow the whole example prefix.
  const auto item = compile(spec.few_item, spec.quote_source, spec.separator);
  const auto query = compile(spec.query, spec.quote_source, "");
  ParsedPrompt parsed;
  parsed.mode = ShotMode::few;
  auto begin = prompt.cbegin();
  while (std::regex_search(begin, prompt.cend(), m, item.re, std::regex_constants::match_continuous)) {
    auto c = collect(item, m);
    if ((!parsed.examples.empty() && (c.src != parsed.source_name || c.tgt != parsed.target_name))) return std::nullopt;
    parsed.source_name = c.src;
    parsed.target_name = c.tgt;
    parsed.examples.push_back({c.word, c.answer});
    begin = m[0].second;
  }
  if (parsed.examples.empty()) return std::nullopt;
  std::string rest(begin, prompt.cend());
  if (!std::regex_match(rest, m, query.re)) return std::nullopt;
  auto c = collect(query, m);
  if (c.src != parsed.source_name || c.tgt != parsed.target_name) return std::nullopt;
  parsed.word = c.word;
  return parsed;
}

std::optional<ParsedPrompt> parse_prompt(const TemplateRegistry& registry, std::string_view prompt) {
  for (const auto& [_, spec] : registry.all())
    if (auto parsed = parse_prompt(spec, prompt)) return parsed;
  return std::nullopt;
}

IclSelector::IclSelector(std::vector<IclExample> pool, const EmbeddingSpace& space, const Vocabulary& vocab)
    : pool_(std::move(pool)), space_(&space) {
  rows_.reserve(pool_.size());
  ranks_.reserve(pool_.size());
  for (const auto& ex : pool_) {
    rows_.push_back(space.row_of(ex.source_word));
    ranks_.push_back(vocab.rank(ex.source_word).value_or(std::numeric_limits<std::size_t>::max()));
  }
}

std::vector<IclExample> IclSelector::select(std::string_view query, std::size_t k) const {
  struct Scored {
    double sim;
    std::size_t rank;
    std::size_t index;
  };
  constexpr double kNoVector = -std::numeric_limits<double>::infinity();
  auto q = space_->vector(query);

  std::vector<Scored> scored;
  scored.reserve(pool_.size());
  for (std::size_t i = 0; i < pool_.size(); ++i) {
    if (pool_[i].source_word == query) continue;
    double sim = 0.0;
    if (!q.empty()) sim = rows_[i] ? EmbeddingSpace::dot(q, space_->row(*rows_[i])) : kNoVector;
    scored.push_back({sim, ranks_[i], i});
  }
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(),
                    [](const Scored& a, const Scored& b) {
                      if (a.sim != b.sim) return a.sim > b.sim;
                      if (a.rank != b.rank) return a.rank < b.rank;
                      return a.index < b.index;
                    });
  std::vector<IclExample> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(pool_[scored[i].index]);
  return out;
}

std::vector<IclExample> select_icl_examples(std::span<const IclExample> pool, const EmbeddingSpace& space,
                                            const Vocabulary& vocab, std::string_view query, std::size_t k) {
  if (pool.empty()) throw std::invalid_argument("empty high-confidence dictionary");
  return IclSelector({pool.begin(), pool.end()}, space, vocab).select(query, k);
}

}  // namespace sail
