#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sail {

struct CompletionRequest {
  std::string prompt;
  int num_beams = 5;
  int max_new_tokens = 10;
};

struct ScoredContinuation {
  std::string text;
  double score = 0.0;

  friend bool operator==(const ScoredContinuation&, const ScoredContinuation&) = default;
};

using Continuations = std::vector<ScoredContinuation>;

/// Answers a request in-process. Must be a pure function of the request.
using MockResponder = std::function<Continuations(const CompletionRequest&)>;

enum class BackendKind { wire, chat, mock };

std::string_view to_string(BackendKind kind);
/// Throws ConfigError for an unknown name.
BackendKind parse_backend_kind(std::string_view name);

inline constexpr std::string_view kChatSystemMessage =
    "Please complete the following sentence and only output the target word.";

struct BackendConfig {
  BackendKind kind = BackendKind::wire;
  std::string endpoint;  // full URL, e.g. http://localhost:8000/complete
  std::string model_id;
  std::chrono::milliseconds timeout{60'000};
  int retry_limit = 3;
  std::chrono::milliseconds retry_base_delay{500};
  // chat only
  double temperature = 0.0;
  int max_tokens = 5;
  std::string system_message{kChatSystemMessage};
  /// Name of the environment variable holding a bearer token; the value is never logged.
  std::string api_key_env;
  // mock only
  std::shared_ptr<const MockResponder> mock;

  /// Throws ConfigError when the fields required by `kind` are missing.
  void validate() const;
};

class BackendError : public std::runtime_error {
 public:
  enum class Category { network, status, malformed, timeout, rejected };

  BackendError(Category category, const std::string& what) : std::runtime_error(what), category_(category) {}
  Category category() const { return category_; }

 private:
  Category category_;
};

std::string_view to_string(BackendError::Category category);

/// One uncached completion. Results are ordered by non-increasing score and
/// truncated to num_beams; chat backends always yield exactly one continuation
/// with score 0. Network/timeout/429/5xx failures are retried with exponential
/// backoff up to retry_limit times. Throws BackendError.
Continuations complete(const BackendConfig& cfg, const CompletionRequest& req);

/// Wire-protocol request and response bodies.
std::string encode_wire_request(const BackendConfig& cfg, const CompletionRequest& req);
Continuations decode_wire_response(std::string_view body);
/// Chat-completions request body (system + user messages).
std::string encode_chat_request(const BackendConfig& cfg, const CompletionRequest& req);
Continuations decode_chat_response(std::string_view body);

/// Persistent response cache: one file per key named by the hex SHA-256 of the
/// request identity, holding a checksum header line and the response JSON.
class CacheStore {
 public:
  explicit CacheStore(std::filesystem::path dir);

  static std::string key_for(const BackendConfig& cfg, const CompletionRequest& req);

  /// Absent on a miss or when the stored checksum does not match the body.
  std::optional<Continuations> get(const std::string& key) const;
  /// Writes via a temporary file and rename, so readers never see partial entries.
  void put(const std::string& key, const Continuations& value) const;

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const std::string& key) const { return dir_ / (key + ".json"); }

 private:
  std::filesystem::path dir_;
};

struct CacheCounters {
  std::atomic<std::size_t> hits{0};
  std::atomic<std::size_t> misses{0};
};

/// complete() behind the cache: a hit returns the stored result without calling
/// the backend; a miss delegates and stores the result.
Continuations cached_complete(const CacheStore& cache, const BackendConfig& cfg, const CompletionRequest& req,
                              CacheCounters* counters = nullptr);

struct BackendStats {
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::size_t failures = 0;
};

/// Shared completion client used by the pipeline: optional cache, a bound on
/// in-flight requests and call accounting. Safe for concurrent use.
class Backend {
 public:
  explicit Backend(BackendConfig cfg, std::optional<std::filesystem::path> cache_dir = std::nullopt,
                   std::size_t max_in_flight = 8);

  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  Continuations complete(const CompletionRequest& req);

  const BackendConfig& config() const { return cfg_; }
  BackendStats stats() const;

 private:
  static constexpr std::ptrdiff_t kMaxInFlight = 1024;

  BackendConfig cfg_;
  std::optional<CacheStore> cache_;
  std::counting_semaphore<kMaxInFlight> in_flight_;
  CacheCounters cache_counters_;
  std::atomic<std::size_t> calls_{0};
  std::atomic<std::size_t> failures_{0};
};

}  // namespace sail
