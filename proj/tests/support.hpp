#pragma once

#include <cstdint>
#include <filesystem>
#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sail/sail.hpp"

namespace httplib {
class Server;
struct Request;
}

namespace sail::test {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// Seeded random unit vectors of the given dimension.
std::vector<std::vector<double>> random_vectors(std::size_t n, std::size_t dim, std::uint64_t seed);

/// Two synthetic languages with `size` words each ("<code>w000", ...), random
/// embeddings and the bijection word i <-> word i.
struct SyntheticWorld {
  LanguagePair pair;
  LanguageAssets x;
  LanguageAssets y;
  std::map<std::string, std::string> x_to_y;
  std::map<std::string, std::string> y_to_x;
};

SyntheticWorld make_world(std::size_t size, std::size_t dim, std::uint64_t seed, LanguagePair pair = {"de", "fr"});

std::string word_name(const LanguageCode& code, std::size_t i);

/// Writes a fastText text file for the given words and vectors.
void write_vec_file(const std::filesystem::path& path, const std::vector<std::string>& words,
                    const std::vector<std::vector<double>>& rows);

/// Writes embeddings, test sets for words [test_from, test_to) in both directions
/// and a consistency mock file for `world` into `dir`, and returns a mock-backend
/// experiment config (relative paths) that callers may adjust before saving.
nlohmann::json write_experiment(const std::filesystem::path& dir, const SyntheticWorld& world, std::size_t test_from,
                                std::size_t test_to, const std::map<std::string, std::vector<std::string>>& noise = {});

/// Saves `doc` as dir/config.json and returns the path.
std::filesystem::path save_config(const std::filesystem::path& dir, const nlohmann::json& doc);

/// HTTP server on 127.0.0.1 with an ephemeral port, running until destroyed.
/// The handler maps a request to (status, response body).
class FixtureServer {
 public:
  using Handler = std::function<std::pair<int, std::string>(const httplib::Request& req)>;

  explicit FixtureServer(Handler handler);
  ~FixtureServer();

  int port() const { return port_; }
  std::string url(const std::string& path) const;
  std::size_t requests() const;

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::shared_ptr<std::atomic<std::size_t>> requests_;
};

}  // namespace sail::test
