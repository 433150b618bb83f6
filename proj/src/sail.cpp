#include "sail/sail.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "sail/error.hpp"

namespace sail {

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

void SailConfig::validate() const {
  if (n_iterations < 0) throw ConfigError("n_it: must be non-negative");
  if (beam < 1) throw ConfigError("beam: must be positive");
  if (shots < 1) throw ConfigError("shots: must be positive");
  if (max_new_tokens < 1) throw ConfigError("max_new_tokens: must be positive");
  if (concurrency < 1) throw ConfigError("concurrency: must be positive");
}

nlohmann::json SailConfig::to_json() const {
  return {{"n_it", n_iterations},
          {"n_f", n_frequent},
          {"beam", beam},
          {"shots", shots},
          {"max_new_tokens", max_new_tokens},
          {"back_translation", back_translation},
          {"accumulate", accumulate},
          {"lowercase_fallback", extraction.lowercase_fallback}};
}

SailPipeline::SailPipeline(LanguagePair pair, const LanguageAssets& x, const LanguageAssets& y,
                           const TemplateSpec& templates, const LanguageNames& names, Backend& backend, SailConfig cfg)
    : pair_(std::move(pair)), x_(&x), y_(&y), templates_(&templates), names_(&names), backend_(&backend),
      cfg_(std::move(cfg)) {
  cfg_.validate();
  names.name(pair_.source);
  names.name(pair_.target);
}

SailPipeline::Side SailPipeline::side(Direction d) const {
  return d == Direction::x_to_y ? Side{x_, y_} : Side{y_, x_};
}

std::optional<IclSelector> SailPipeline::selector_for(Direction d, const HighConfidenceDictionary* dict) const {
  if (!dict || dict->empty()) return std::nullopt;
  const auto* source = side(d).source;
  return IclSelector(dict->oriented(d == Direction::x_to_y), source->space, source->vocab);
}

std::string SailPipeline::render(const std::string& word, Direction d, const IclSelector* selector) const {
  const LanguagePair dir = direction_pair(d);
  if (selector) {
    auto examples = selector->select(word, cfg_.shots);
    if (!examples.empty()) return render_few_shot(*templates_, *names_, dir, examples, word);
  }
  return render_zero_shot(*templates_, *names_, dir, word);
}

Prediction SailPipeline::translate_with(const std::string& word, Direction d, const IclSelector* selector) const {
  const std::string prompt = render(word, d, selector);
  Continuations continuations;
  try {
    continuations = backend_->complete({prompt, cfg_.beam, cfg_.max_new_tokens});
  } catch (const BackendError& e) {
    Prediction p;
    p.query = word;
    p.status = PredictionStatus::backend_error;
    p.error = std::string(to_string(e.category())) + ": " + e.what();
    return p;
  }
  return select_prediction(word, continuations, side(d).target->vocab, cfg_.extraction);
}

std::string SailPipeline::prompt_for(const std::string& word, Direction d, const HighConfidenceDictionary* dict) const {
  auto selector = selector_for(d, dict);
  return render(word, d, selector ? &*selector : nullptr);
}

Prediction SailPipeline::translate_word(const std::string& word, Direction d, const HighConfidenceDictionary* dict) const {
  if (word.empty()) throw std::invalid_argument("cannot translate an empty word");
  auto selector = selector_for(d, dict);
  return translate_with(word, d, selector ? &*selector : nullptr);
}

std::map<std::string, Prediction> SailPipeline::translate_many(const std::vector<std::string>& words, Direction d,
                                                               const IclSelector* selector) const {
  std::vector<Prediction> results(words.size());
  parallel_for(words.size(), cfg_.concurrency, [&](std::size_t i) { results[i] = translate_with(words[i], d, selector); });
  std::map<std::string, Prediction> out;
  for (std::size_t i = 0; i < words.size(); ++i) out.emplace(words[i], std::move(results[i]));
  return out;
}

std::map<std::string, Prediction> SailPipeline::translate_all(const std::vector<std::string>& words, Direction d,
                                                              const HighConfidenceDictionary* dict) const {
  auto selector = selector_for(d, dict);
  return translate_many(words, d, selector ? &*selector : nullptr);
}

HarvestResult SailPipeline::harvest_pairs(Direction d, const HighConfidenceDictionary* prev) const {
  const Direction back = d == Direction::x_to_y ? Direction::y_to_x : Direction::x_to_y;
  const auto sources = top_n(side(d).source->vocab, cfg_.n_frequent);

  auto forward_selector = selector_for(d, prev);
  const auto forward = translate_many(sources, d, forward_selector ? &*forward_selector : nullptr);

  HarvestResult result;
  std::set<std::string> predicted;
  for (const auto& [w, p] : forward) {
    if (p.status == PredictionStatus::backend_error) ++result.backend_errors;
    if (p.status != PredictionStatus::ok) continue;
    ++result.forward_ok;
    predicted.insert(*p.predicted);
  }

  if (!cfg_.back_translation) {
    for (const auto& [w, p] : forward)
      if (p.status == PredictionStatus::ok) result.pairs.emplace_back(w, *p.predicted);
    return result;
  }

  auto backward_selector = selector_for(back, prev);
  const auto backward = translate_many({predicted.begin(), predicted.end()}, back,
                                       backward_selector ? &*backward_selector : nullptr);
  for (const auto& [w, p] : backward)
    if (p.status == PredictionStatus::backend_error) ++result.backend_errors;

  for (const auto& [w, p] : forward) {
    if (p.status != PredictionStatus::ok) continue;
    const auto& round_trip = backward.at(*p.predicted);
    if (round_trip.status == PredictionStatus::ok && round_trip.predicted == w) result.pairs.emplace_back(w, *p.predicted);
  }
  return result;
}

HighConfidenceDictionary SailPipeline::build_dictionary(const HighConfidenceDictionary* prev) const {
  HighConfidenceDictionary dict(pair_, prev ? prev->iteration() + 1 : 1);
  if (cfg_.accumulate && prev)
    for (const auto& [e, p] : prev->entries()) dict.add(e.first, e.second, p);
  for (const auto& [x, y] : harvest_pairs(Direction::x_to_y, prev).pairs) dict.add(x, y, from_x_side);
  for (const auto& [y, x] : harvest_pairs(Direction::y_to_x, prev).pairs) dict.add(x, y, from_y_side);
  return dict;
}

SailOutcome SailPipeline::run(const std::vector<BliTestSet>& tests, const std::string& config_hash) const {
  std::vector<Direction> directions;
  for (const auto& t : tests) {
    if (t.pair == pair_) directions.push_back(Direction::x_to_y);
    else if (t.pair == pair_.flipped()) directions.push_back(Direction::y_to_x);
    else throw ConfigError("test set " + t.pair.str() + " does not belong to pair " + pair_.str());
    if (t.entries.empty()) throw ConfigError("test set " + t.pair.str() + " is empty");
  }

  SailOutcome out;
  std::optional<HighConfidenceDictionary> dict;
  for (int it = 1; it <= cfg_.n_iterations; ++it) {
    const bool few = dict && !dict->empty();
    HighConfidenceDictionary next = build_dictionary(dict ? &*dict : nullptr);
    out.iterations.push_back({it, few ? ShotMode::few : ShotMode::zero, next.count_from(from_x_side),
                              next.count_from(from_y_side), next.size()});
    if (next.empty())
      out.warnings.push_back(pair_.str() + ": iteration " + std::to_string(it) +
                             " produced an empty dictionary; continuing zero-shot");
    dict = std::move(next);
  }

  std::vector<DirectionScore> scores;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    std::vector<std::string> words;
    for (const auto& [w, _] : tests[i].entries) words.push_back(w);
    auto preds = translate_all(words, directions[i], dict ? &*dict : nullptr);
    scores.push_back(score(tests[i], preds));
    out.predictions.push_back({tests[i].pair, std::move(preds)});
  }
  out.report = aggregate(std::move(scores), config_hash);
  out.dictionary = std::move(dict);
  return out;
}

}  // namespace sail
