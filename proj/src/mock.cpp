#include "sail/mock.hpp"

#include <fstream>
#include <memory>

#include "sail/error.hpp"

namespace sail {

MockResponder make_table_mock(std::map<std::string, Continuations> table) {
  auto shared = std::make_shared<const std::map<std::string, Continuations>>(std::move(table));
  return [shared](const CompletionRequest& req) -> Continuations {
    auto it = shared->find(req.prompt);
    return it == shared->end() ? Continuations{} : it->second;
  };
}

std::string corrupted_translation(const std::map<std::string, std::string>& forward, const std::string& word) {
  auto it = forward.upper_bound(word);
  if (it == forward.end()) it = forward.begin();
  return it->second;
}

BackendConfig make_consistency_mock(ConsistencyWorld world) {
  std::map<std::string, LanguageCode> codes;
  for (const auto& [code, name] : world.names.all()) codes[name] = code;
  auto state = std::make_shared<const std::pair<ConsistencyWorld, std::map<std::string, LanguageCode>>>(
      std::move(world), std::move(codes));

  BackendConfig cfg;
  cfg.kind = BackendKind::mock;
  cfg.model_id = "consistency-mock";
  cfg.mock = std::make_shared<const MockResponder>([state](const CompletionRequest& req) -> Continuations {
    const auto& [w, by_name] = *state;
    auto parsed = parse_prompt(w.templates, req.prompt);
    if (!parsed) throw BackendError(BackendError::Category::rejected, "prompt matches no registered template");
    auto src = by_name.find(parsed->source_name);
    auto tgt = by_name.find(parsed->target_name);
    if (src == by_name.end() || tgt == by_name.end())
      throw BackendError(BackendError::Category::rejected, "prompt names an unregistered language");
    const LanguagePair direction{src->second, tgt->second};

    const Continuations distractor_only{{" " + std::string(kMockDistractor), -0.9}};
    auto map = w.forward.find(direction);
    if (map == w.forward.end()) return distractor_only;
    auto hit = map->second.find(parsed->word);
    if (hit == map->second.end()) return distractor_only;

    std::string answer = hit->second;
    if (auto noisy = w.noise.find(direction); noisy != w.noise.end() && noisy->second.count(parsed->word))
      answer = corrupted_translation(map->second, parsed->word);
    return {{" " + answer + ". ", -0.1}, {" " + std::string(kMockDistractor), -0.9}};
  });
  return cfg;
}

BackendConfig mock_backend_from_json(const nlohmann::json& doc, const LanguageNames& names,
                                     const TemplateRegistry& templates) {
  try {
    if (doc.contains("table")) {
      std::map<std::string, Continuations> table;
      for (const auto& [prompt, items] : doc.at("table").items()) {
        Continuations conts;
        for (const auto& item : items)
          conts.push_back({item.at("text").get<std::string>(), item.at("score").get<double>()});
        table.emplace(prompt, std::move(conts));
      }
      BackendConfig cfg;
      cfg.kind = BackendKind::mock;
      cfg.model_id = "table-mock";
      cfg.mock = std::make_shared<const MockResponder>(make_table_mock(std::move(table)));
      return cfg;
    }
    if (doc.contains("consistency")) {
      ConsistencyWorld world;
      world.names = names;
      world.templates = templates;
      for (const auto& [dir, map] : doc.at("consistency").items())
        world.forward[parse_language_pair(dir)] = map.get<std::map<std::string, std::string>>();
      if (doc.contains("noise"))
        for (const auto& [dir, words] : doc.at("noise").items())
          world.noise[parse_language_pair(dir)] = words.get<std::set<std::string>>();
      return make_consistency_mock(std::move(world));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mock table: ") + e.what());
  }
  throw ConfigError("mock table: expected a 'table' or 'consistency' object");
}

BackendConfig load_mock_backend(const std::string& path, const LanguageNames& names,
                                const TemplateRegistry& templates) {
  std::ifstream in(path);
  if (!in) throw ConfigError("backend.mock_table: cannot open '" + path + "'");
  auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("backend.mock_table: '" + path + "' is not valid JSON");
  return mock_backend_from_json(doc, names, templates);
}

}  // namespace sail
