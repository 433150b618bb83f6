#include "sail/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "hash.hpp"
#include "sail/error.hpp"
#include "sail/mock.hpp"

namespace sail {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kTopLevelKeys = {
    "pair", "pairs", "embeddings", "vocab_limit", "test_sets", "directions", "n_it", "n_f", "beam", "shots",
    "max_new_tokens", "back_translation", "accumulate", "lowercase_fallback", "concurrency", "template_family",
    "backend", "cache_dir", "out", "sweep", "templates", "languages"};

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
  return (base / p).lexically_normal().string();
}

template <typename T>
T get_field(const json& doc, const char* key, const T& fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

void write_file(const fs::path& path, const std::string& content, std::vector<fs::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
  written.push_back(path);
}

std::string hash_header(const std::string& config_hash) { return "# config_hash=" + config_hash + "\n"; }

json prediction_json(const LanguagePair& direction, const Prediction& p) {
  json cands = json::array();
  for (const auto& [w, s] : p.candidates) cands.push_back({w, s});
  json j = {{"direction", direction.str()},
            {"source", p.query},
            {"predicted", p.predicted ? json(*p.predicted) : json(nullptr)},
            {"status", to_string(p.status)},
            {"candidates", std::move(cands)}};
  if (!p.error.empty()) j["error"] = p.error;
  return j;
}

json report_json(const EvaluationReport& r) {
  json dirs = json::array();
  for (const auto& d : r.directions)
    dirs.push_back({{"direction", d.direction.str()},
                    {"n", d.n_queries},
                    {"correct", d.n_correct},
                    {"accuracy", d.accuracy}});
  return {{"directions", dirs}, {"language_means", r.language_means}, {"global_mean", r.global_mean}};
}

struct Assets {
  std::map<LanguageCode, LanguageAssets> languages;
  json summary = json::object();
};

Assets load_assets(const ExperimentConfig& cfg) {
  Assets assets;
  std::set<LanguageCode> needed;
  for (const auto& p : cfg.pairs) needed.insert(p.source), needed.insert(p.target);
  for (const auto& code : needed) {
    auto loaded = load_embeddings(cfg.embeddings.at(code), code, cfg.vocab_limit);
    assets.summary[code] = {{"path", cfg.embeddings.at(code)},
                            {"words", loaded.vocab.size()},
                            {"dimension", loaded.space.dimension()},
                            {"duplicate_words", loaded.warnings.duplicate_words},
                            {"zero_vectors", loaded.warnings.zero_vectors}};
    assets.languages[code] = {std::move(loaded.vocab), std::move(loaded.space)};
  }
  return assets;
}

std::vector<BliTestSet> tests_for(const ExperimentConfig& cfg, const LanguagePair& pair) {
  std::vector<BliTestSet> out;
  for (const auto& dir : {pair, pair.flipped()}) {
    if (!cfg.directions.empty() && std::find(cfg.directions.begin(), cfg.directions.end(), dir) == cfg.directions.end())
      continue;
    auto it = cfg.test_sets.find(dir.str());
    if (it != cfg.test_sets.end()) out.push_back(load_test_set(it->second, dir));
  }
  return out;
}

enum class Command { zero_shot, sail };

RunSummary execute(const ExperimentConfig& input, Command command) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentConfig cfg = input;
  cfg.validate();
  if (command == Command::zero_shot) cfg.sail.n_iterations = 0;
  const std::string config_hash = cfg.hash();

  Assets assets = load_assets(cfg);
  std::optional<fs::path> cache_dir;
  if (cfg.cache_dir) cache_dir = *cfg.cache_dir;
  Backend backend(cfg.backend, cache_dir, cfg.sail.concurrency);
  const TemplateSpec& templates = cfg.templates.get(cfg.template_family);

  std::vector<DirectionScore> scores;
  std::vector<DirectionPredictions> all_predictions;
  std::vector<BliTestSet> all_tests;
  std::vector<std::pair<LanguagePair, HighConfidenceDictionary>> dictionaries;
  json pair_logs = json::array();

  for (const auto& pair : cfg.pairs) {
    auto tests = tests_for(cfg, pair);
    if (tests.empty()) continue;
    SailPipeline pipeline(pair, assets.languages.at(pair.source), assets.languages.at(pair.target), templates,
                          cfg.names, backend, cfg.sail);
    json log = {{"pair", pair.str()}};
    if (command == Command::zero_shot) {
      for (const auto& t : tests) {
        const Direction d = t.pair == pair ? Direction::x_to_y : Direction::y_to_x;
        std::vector<std::string> words;
        for (const auto& [w, _] : t.entries) words.push_back(w);
        auto preds = pipeline.translate_all(words, d, nullptr);
        scores.push_back(score(t, preds));
        all_predictions.push_back({t.pair, std::move(preds)});
      }
    } else {
      auto outcome = pipeline.run(tests, config_hash);
      json iterations = json::array();
      for (const auto& it : outcome.iterations)
        iterations.push_back({{"iteration", it.iteration},
                              {"shot_mode", to_string(it.shot_mode)},
                              {"from_x_side", it.from_x_side},
                              {"from_y_side", it.from_y_side},
                              {"total", it.total}});
      log["iterations"] = std::move(iterations);
      log["warnings"] = outcome.warnings;
      for (auto& d : outcome.report.directions) scores.push_back(d);
      for (auto& p : outcome.predictions) all_predictions.push_back(std::move(p));
      if (outcome.dictionary) dictionaries.emplace_back(pair, std::move(*outcome.dictionary));
    }
    pair_logs.push_back(std::move(log));
    for (auto& t : tests) all_tests.push_back(std::move(t));
  }
  if (scores.empty()) throw ConfigError("test_sets: no test set matches the configured pairs and directions");

  RunSummary summary;
  summary.report = aggregate(std::move(scores), config_hash);
  summary.backend = backend.stats();

  const fs::path out_dir = cfg.out_dir;
  fs::create_directories(out_dir);
  auto& written = summary.artifacts;
  write_file(out_dir / "predictions.tsv", predictions_tsv(all_predictions, all_tests, config_hash), written);
  write_file(out_dir / "report.tsv", hash_header(config_hash) + report_tsv(summary.report), written);
  write_file(out_dir / "report.txt", report_table(summary.report), written);
  for (const auto& [pair, dict] : dictionaries)
    write_file(out_dir / ("dictionary." + pair.str() + ".tsv"), hash_header(config_hash) + dict.to_tsv(), written);

  json predictions = json::array();
  for (const auto& dp : all_predictions)
    for (const auto& [_, p] : dp.predictions) predictions.push_back(prediction_json(dp.direction, p));
  json manifest = {{"command", command == Command::zero_shot ? "zero-shot" : "sail"},
                   {"config_hash", config_hash},
                   {"config", cfg.snapshot()},
                   {"back_translation", cfg.sail.back_translation},
                   {"embeddings", assets.summary},
                   {"pairs", std::move(pair_logs)},
                   {"report", report_json(summary.report)},
                   {"backend",
                    {{"calls", summary.backend.backend_calls},
                     {"cache_hits", summary.backend.cache_hits},
                     {"cache_misses", summary.backend.cache_misses},
                     {"failures", summary.backend.failures}}},
                   {"predictions", std::move(predictions)}};
  write_file(out_dir / "manifest.json", manifest.dump(1) + "\n", written);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_file(out_dir / "timing.json", json({{"config_hash", config_hash}, {"seconds", seconds}}).dump() + "\n", written);
  return summary;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  for (const auto& [key, _] : doc.items())
    if (!kTopLevelKeys.count(key)) throw ConfigError("config: unknown key '" + key + "'");

  ExperimentConfig cfg;
  if (doc.contains("languages"))
    for (const auto& [code, name] : get_field<std::map<std::string, std::string>>(doc, "languages", {}))
      cfg.names.add(code, name);
  if (doc.contains("templates")) cfg.templates.merge_json(doc.at("templates"));

  if (doc.contains("pair")) cfg.pairs.push_back(parse_language_pair(get_field<std::string>(doc, "pair", "")));
  for (const auto& p : get_field<std::vector<std::string>>(doc, "pairs", {})) cfg.pairs.push_back(parse_language_pair(p));
  for (const auto& d : get_field<std::vector<std::string>>(doc, "directions", {}))
    cfg.directions.push_back(parse_language_pair(d));
  for (const auto& [code, path] : get_field<std::map<std::string, std::string>>(doc, "embeddings", {}))
    cfg.embeddings[code] = resolve(base_dir, path);
  for (const auto& [dir, path] : get_field<std::map<std::string, std::string>>(doc, "test_sets", {}))
    cfg.test_sets[parse_language_pair(dir).str()] = resolve(base_dir, path);
  cfg.vocab_limit = get_field<std::size_t>(doc, "vocab_limit", cfg.vocab_limit);

  auto& s = cfg.sail;
  s.n_iterations = get_field<int>(doc, "n_it", s.n_iterations);
  s.n_frequent = get_field<std::size_t>(doc, "n_f", s.n_frequent);
  s.beam = get_field<int>(doc, "beam", s.beam);
  s.shots = get_field<std::size_t>(doc, "shots", s.shots);
  s.max_new_tokens = get_field<int>(doc, "max_new_tokens", s.max_new_tokens);
  s.back_translation = get_field<bool>(doc, "back_translation", s.back_translation);
  s.accumulate = get_field<bool>(doc, "accumulate", s.accumulate);
  s.extraction.lowercase_fallback = get_field<bool>(doc, "lowercase_fallback", s.extraction.lowercase_fallback);
  s.concurrency = get_field<std::size_t>(doc, "concurrency", s.concurrency);
  cfg.template_family = get_field<std::string>(doc, "template_family", cfg.template_family);

  if (doc.contains("backend")) {
    const json& b = doc.at("backend");
    if (!b.is_object()) throw ConfigError("backend: expected an object");
    auto& bc = cfg.backend;
    bc.kind = parse_backend_kind(get_field<std::string>(b, "kind", "wire"));
    bc.endpoint = get_field<std::string>(b, "endpoint", "");
    bc.model_id = get_field<std::string>(b, "model", "");
    bc.timeout = std::chrono::milliseconds(get_field<long>(b, "timeout_ms", bc.timeout.count()));
    bc.retry_limit = get_field<int>(b, "retry_limit", bc.retry_limit);
    bc.retry_base_delay = std::chrono::milliseconds(get_field<long>(b, "retry_base_delay_ms", bc.retry_base_delay.count()));
    bc.temperature = get_field<double>(b, "temperature", bc.temperature);
    bc.max_tokens = get_field<int>(b, "max_tokens", bc.max_tokens);
    bc.system_message = get_field<std::string>(b, "system_message", bc.system_message);
    bc.api_key_env = get_field<std::string>(b, "api_key_env", "");
    cfg.mock_table = resolve(base_dir, get_field<std::string>(b, "mock_table", ""));
  }
  if (doc.contains("cache_dir")) cfg.cache_dir = resolve(base_dir, get_field<std::string>(doc, "cache_dir", ""));
  cfg.out_dir = resolve(base_dir, get_field<std::string>(doc, "out", cfg.out_dir));
  if (doc.contains("sweep")) {
    const json& sw = doc.at("sweep");
    cfg.sweep_n_it = get_field<std::vector<int>>(sw, "n_it", {});
    cfg.sweep_n_f = get_field<std::vector<std::size_t>>(sw, "n_f", {});
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config: '" + path.string() + "' is not valid JSON");
  return from_json(doc, path.parent_path());
}

void ExperimentConfig::validate() {
  if (pairs.empty()) throw ConfigError("pair: at least one language pair is required");
  sail.validate();
  templates.get(template_family);
  if (vocab_limit == 0) throw ConfigError("vocab_limit: must be positive");

  std::set<LanguageCode> langs;
  for (const auto& p : pairs) langs.insert(p.source), langs.insert(p.target);
  for (const auto& code : langs) {
    if (!names.contains(code))
      throw ConfigError("languages." + code + ": no English name registered for this language code");
    auto it = embeddings.find(code);
    if (it == embeddings.end()) throw ConfigError("embeddings." + code + ": missing embedding path");
    if (!fs::is_regular_file(it->second))
      throw ConfigError("embeddings." + code + ": file not found: " + it->second);
  }
  for (const auto& [dir, path] : test_sets) {
    auto d = parse_language_pair(dir);
    bool known = std::any_of(pairs.begin(), pairs.end(), [&](const LanguagePair& p) { return p == d || p.flipped() == d; });
    if (!known) throw ConfigError("test_sets." + dir + ": direction does not belong to any configured pair");
    if (!fs::is_regular_file(path)) throw ConfigError("test_sets." + dir + ": file not found: " + path);
  }
  for (const auto& d : directions)
    if (!test_sets.count(d.str())) throw ConfigError("directions: no test set configured for " + d.str());

  if (backend.kind == BackendKind::mock && !backend.mock) {
    if (mock_table.empty()) throw ConfigError("backend.mock_table: required for the mock backend");
    if (!fs::is_regular_file(mock_table)) throw ConfigError("backend.mock_table: file not found: " + mock_table);
    BackendConfig bound = load_mock_backend(mock_table, names, templates);
    backend.mock = bound.mock;
    if (backend.model_id.empty()) backend.model_id = bound.model_id;
  }
  backend.validate();
}

json ExperimentConfig::snapshot() const {
  auto template_json = [&]() -> json {
    if (!templates.contains(template_family)) return nullptr;
    for (const auto& t : templates.to_json())
      if (t["family"] == template_family) return t;
    return nullptr;
  };
  json pair_list = json::array();
  for (const auto& p : pairs) pair_list.push_back(p.str());
  json dir_list = json::array();
  for (const auto& d : directions) dir_list.push_back(d.str());
  return {{"pairs", pair_list},
          {"directions", dir_list},
          {"embeddings", embeddings},
          {"vocab_limit", vocab_limit},
          {"test_sets", test_sets},
          {"sail", sail.to_json()},
          {"template_family", template_family},
          {"template", template_json()},
          {"languages", names.all()},
          {"backend",
           {{"kind", to_string(backend.kind)},
            {"endpoint", backend.endpoint},
            {"model", backend.model_id},
            {"temperature", backend.temperature},
            {"max_tokens", backend.max_tokens},
            {"system_message", backend.system_message},
            {"mock_table", mock_table}}}};
}

std::string ExperimentConfig::hash() const { return detail::sha256_hex(snapshot().dump()); }

std::string predictions_tsv(const std::vector<DirectionPredictions>& predictions, const std::vector<BliTestSet>& tests,
                            const std::string& config_hash) {
  std::ostringstream out;
  out << hash_header(config_hash) << "direction\tsource\tpredicted\tstatus\tcorrect\n";
  for (const auto& dp : predictions) {
    const BliTestSet* gold = nullptr;
    for (const auto& t : tests)
      if (t.pair == dp.direction) gold = &t;
    for (const auto& [source, p] : dp.predictions) {
      bool correct = false;
      if (gold && p.predicted) {
        auto it = gold->entries.find(source);
        correct = it != gold->entries.end() && it->second.count(*p.predicted);
      }
      out << dp.direction.str() << '\t' << source << '\t' << p.predicted.value_or("") << '\t' << to_string(p.status)
          << '\t' << (correct ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

RunSummary cmd_zero_shot(const ExperimentConfig& cfg) { return execute(cfg, Command::zero_shot); }

RunSummary cmd_sail(const ExperimentConfig& cfg) { return execute(cfg, Command::sail); }

std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg) {
  if (cfg.sweep_n_it.empty() && cfg.sweep_n_f.empty())
    throw ConfigError("sweep: at least one of sweep.n_it or sweep.n_f must be non-empty");
  std::vector<SweepRow> rows;
  auto run_setting = [&](const std::string& parameter, std::size_t value, ExperimentConfig setting) {
    setting.out_dir = (fs::path(cfg.out_dir) / (parameter + "=" + std::to_string(value))).string();
    auto summary = cmd_sail(setting);
    for (const auto& d : summary.report.directions) rows.push_back({parameter, value, d.direction.str(), d.accuracy});
    rows.push_back({parameter, value, "mean", summary.report.global_mean});
  };
  for (int n_it : cfg.sweep_n_it) {
    if (n_it < 0) throw ConfigError("sweep.n_it: values must be non-negative");
    ExperimentConfig setting = cfg;
    setting.sail.n_iterations = n_it;
    run_setting("n_it", static_cast<std::size_t>(n_it), std::move(setting));
  }
  for (std::size_t n_f : cfg.sweep_n_f) {
    ExperimentConfig setting = cfg;
    setting.sail.n_frequent = n_f;
    run_setting("n_f", n_f, std::move(setting));
  }

  std::ostringstream out;
  out << "parameter\tvalue\tdirection\taccuracy\n";
  char buf[32];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.accuracy);
    out << r.parameter << '\t' << r.value << '\t' << r.direction << '\t' << buf << '\n';
  }
  fs::create_directories(cfg.out_dir);
  std::vector<fs::path> written;
  write_file(fs::path(cfg.out_dir) / "sweep.tsv", out.str(), written);
  return rows;
}

DictionarySample cmd_inspect_dict(const std::string& path, std::size_t k, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("dictionary: cannot open '" + path + "'");
  std::vector<std::string> lines;
  bool header = true;
  for (std::string line; std::getline(in, line);) {
    if (header && line.rfind("# config_hash=", 0) == 0) continue;
    header = false;
    if (!line.empty()) lines.push_back(line);
  }

  DictionarySample sample;
  if (k >= lines.size()) {
    if (k > lines.size())
      sample.note = "requested " + std::to_string(k) + " pairs but the dictionary has " + std::to_string(lines.size());
    sample.lines = std::move(lines);
    return sample;
  }
  std::vector<std::size_t> order(lines.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(k);
  std::sort(order.begin(), order.end());
  for (auto i : order) sample.lines.push_back(lines[i]);
  return sample;
}

}  // namespace sail
