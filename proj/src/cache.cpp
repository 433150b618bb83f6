#include "sail/backend.hpp"

#include <atomic>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "hash.hpp"
#include "sail/error.hpp"

namespace sail {

using detail::sha256_hex;

namespace {

constexpr std::string_view kChecksumPrefix = "sha256 ";

}  // namespace

CacheStore::CacheStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_))
    throw ConfigError("cache directory '" + dir_.string() + "' is not writable: " + ec.message());
}

std::string CacheStore::key_for(const BackendConfig& cfg, const CompletionRequest& req) {
  nlohmann::json identity = nlohmann::json::array(
      {to_string(cfg.kind), cfg.model_id, req.prompt, req.num_beams, req.max_new_tokens,
       cfg.kind == BackendKind::chat ? cfg.temperature : 0.0,
       cfg.kind == BackendKind::chat ? cfg.system_message : std::string()});
  if (cfg.kind == BackendKind::chat) identity.push_back(cfg.max_tokens);
  return sha256_hex(identity.dump());
}

std::optional<Continuations> CacheStore::get(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::string header;
  if (!std::getline(in, header) || header.rfind(kChecksumPrefix, 0) != 0) return std::nullopt;
  std::stringstream rest;
  rest << in.rdbuf();
  std::string body = rest.str();
  if (header.substr(kChecksumPrefix.size()) != sha256_hex(body)) return std::nullopt;
  try {
    return decode_wire_response(body);
  } catch (const BackendError&) {
    return std::nullopt;
  }
}

void CacheStore::put(const std::string& key, const Continuations& value) const {
  nlohmann::json doc = {{"continuations", nlohmann::json::array()}};
  for (const auto& c : value) doc["continuations"].push_back({{"text", c.text}, {"score", c.score}});
  const std::string body = doc.dump(1) + "\n";

  static std::atomic<unsigned long> counter{0};
  std::ostringstream tmp_name;
  tmp_name << key << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "." << counter++;
  const auto tmp = dir_ / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
    out << kChecksumPrefix << sha256_hex(body) << "\n" << body;
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path_for(key), ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot install cache entry " + path_for(key).string());
  }
}

Continuations cached_complete(const CacheStore& cache, const BackendConfig& cfg, const CompletionRequest& req,
                              CacheCounters* counters) {
  const std::string key = CacheStore::key_for(cfg, req);
  if (auto hit = cache.get(key)) {
    if (counters) ++counters->hits;
    return *hit;
  }
  if (counters) ++counters->misses;
  Continuations result = complete(cfg, req);
  cache.put(key, result);
  return result;
}

}  // namespace sail
