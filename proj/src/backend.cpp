#include "sail/backend.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <json.hpp>
#include <thread>

#include "sail/error.hpp"

namespace sail {

using nlohmann::json;

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::wire: return "wire";
    case BackendKind::chat: return "chat";
    case BackendKind::mock: return "mock";
  }
  return "?";
}

BackendKind parse_backend_kind(std::string_view name) {
  if (name == "wire") return BackendKind::wire;
  if (name == "chat") return BackendKind::chat;
  if (name == "mock") return BackendKind::mock;
  throw ConfigError("unknown backend kind '" + std::string(name) + "' (expected wire, chat or mock)");
}

std::string_view to_string(BackendError::Category category) {
  switch (category) {
    case BackendError::Category::network: return "network";
    case BackendError::Category::status: return "status";
    case BackendError::Category::malformed: return "malformed";
    case BackendError::Category::timeout: return "timeout";
    case BackendError::Category::rejected: return "rejected";
  }
  return "?";
}

void BackendConfig::validate() const {
  if (kind == BackendKind::mock) {
    if (!mock) throw ConfigError("backend.mock_table: mock backend requires a lookup table");
    return;
  }
  if (endpoint.empty()) throw ConfigError("backend.endpoint: required for the " + std::string(to_string(kind)) + " backend");
  if (endpoint.find("://") == std::string::npos)
    throw ConfigError("backend.endpoint: expected an http:// or https:// URL, got '" + endpoint + "'");
  if (retry_limit < 0) throw ConfigError("backend.retry_limit: must be non-negative");
  if (timeout.count() <= 0) throw ConfigError("backend.timeout: must be positive");
  if (kind == BackendKind::chat && max_tokens < 1) throw ConfigError("backend.max_tokens: must be positive");
}

std::string encode_wire_request(const BackendConfig& cfg, const CompletionRequest& req) {
  json body = {{"prompt", req.prompt},
               {"num_beams", req.num_beams},
               {"max_new_tokens", req.max_new_tokens},
               {"model", cfg.model_id}};
  return body.dump();
}

Continuations decode_wire_response(std::string_view body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("continuations") || !doc["continuations"].is_array())
    throw BackendError(BackendError::Category::malformed, "response lacks a 'continuations' array");
  Continuations out;
  for (const auto& item : doc["continuations"]) {
    if (!item.is_object() || !item.contains("text") || !item["text"].is_string() || !item.contains("score") ||
        !item["score"].is_number())
      throw BackendError(BackendError::Category::malformed, "continuation lacks string 'text' or numeric 'score'");
    out.push_back({item["text"].get<std::string>(), item["score"].get<double>()});
  }
  return out;
}

std::string encode_chat_request(const BackendConfig& cfg, const CompletionRequest& req) {
  json body = {{"model", cfg.model_id},
               {"messages", json::array({{{"role", "system"}, {"content", cfg.system_message}},
                                         {{"role", "user"}, {"content", req.prompt}}})},
               {"temperature", cfg.temperature},
               {"max_tokens", cfg.max_tokens}};
  return body.dump();
}

Continuations decode_chat_response(std::string_view body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() ||
      doc["choices"].empty())
    throw BackendError(BackendError::Category::malformed, "chat response lacks 'choices'");
  const auto& choice = doc["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string())
    throw BackendError(BackendError::Category::malformed, "chat response lacks choices[0].message.content");
  return {{choice["message"]["content"].get<std::string>(), 0.0}};
}

namespace {

struct Url {
  std::string scheme_host_port;
  std::string path;
};

Url split_url(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

bool retryable(const BackendError& e, int status) {
  switch (e.category()) {
    case BackendError::Category::network:
    case BackendError::Category::timeout: return true;
    case BackendError::Category::status: return status == 429 || status >= 500;
    default: return false;
  }
}

// One HTTP POST; returns the body of a 2xx response.
std::string post_once(const BackendConfig& cfg, const std::string& body, int& status) {
  status = 0;
  Url url = split_url(cfg.endpoint);
  httplib::Client client(url.scheme_host_port);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!cfg.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto started = std::chrono::steady_clock::now();
  auto res = client.Post(url.path, headers, body, "application/json");
  if (!res) {
    auto err = res.error();
    bool timed_out = err == httplib::Error::ConnectionTimeout ||
                     (err == httplib::Error::Read && std::chrono::steady_clock::now() - started >= cfg.timeout);
    throw BackendError(timed_out ? BackendError::Category::timeout : BackendError::Category::network,
                       "POST " + cfg.endpoint + ": " + httplib::to_string(err));
  }
  status = res->status;
  if (status < 200 || status >= 300)
    throw BackendError(BackendError::Category::status, "POST " + cfg.endpoint + ": HTTP " + std::to_string(status));
  return res->body;
}

Continuations complete_remote(const BackendConfig& cfg, const CompletionRequest& req) {
  const bool chat = cfg.kind == BackendKind::chat;
  const std::string body = chat ? encode_chat_request(cfg, req) : encode_wire_request(cfg, req);
  for (int attempt = 0;; ++attempt) {
    int status = 0;
    try {
      std::string response = post_once(cfg, body, status);
      return chat ? decode_chat_response(response) : decode_wire_response(response);
    } catch (const BackendError& e) {
      if (attempt >= cfg.retry_limit || !retryable(e, status)) throw;
    }
    std::this_thread::sleep_for(cfg.retry_base_delay * (1 << std::min(attempt, 16)));
  }
}

}  // namespace

Continuations complete(const BackendConfig& cfg, const CompletionRequest& req) {
  if (req.num_beams < 1 || req.max_new_tokens < 1)
    throw BackendError(BackendError::Category::rejected, "num_beams and max_new_tokens must be positive");
  cfg.validate();

  Continuations out;
  switch (cfg.kind) {
    case BackendKind::mock: out = (*cfg.mock)(req); break;
    case BackendKind::wire:
    case BackendKind::chat: out = complete_remote(cfg, req); break;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredContinuation& a, const ScoredContinuation& b) { return a.score > b.score; });
  const std::size_t limit = cfg.kind == BackendKind::chat ? 1 : static_cast<std::size_t>(req.num_beams);
  if (out.size() > limit) out.resize(limit);
  if (cfg.kind == BackendKind::chat && out.empty())
    throw BackendError(BackendError::Category::malformed, "chat backend returned no continuation");
  return out;
}

Backend::Backend(BackendConfig cfg, std::optional<std::filesystem::path> cache_dir, std::size_t max_in_flight)
    : cfg_(std::move(cfg)),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(max_in_flight, 1, kMaxInFlight))) {
  cfg_.validate();
  if (cache_dir) cache_.emplace(*cache_dir);
}

Continuations Backend::complete(const CompletionRequest& req) {
  std::string key;
  if (cache_) {
    key = CacheStore::key_for(cfg_, req);
    if (auto hit = cache_->get(key)) {
      ++cache_counters_.hits;
      return *hit;
    }
    ++cache_counters_.misses;
  }

  in_flight_.acquire();
  Continuations result;
  try {
    ++calls_;
    result = sail::complete(cfg_, req);
  } catch (...) {
    in_flight_.release();
    ++failures_;
    throw;
  }
  in_flight_.release();
  if (cache_) cache_->put(key, result);
  return result;
}

BackendStats Backend::stats() const {
  return {calls_.load(), cache_counters_.hits.load(), cache_counters_.misses.load(), failures_.load()};
}

}  // namespace sail
