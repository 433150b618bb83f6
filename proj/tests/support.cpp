#include "support.hpp"

#include <httplib.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace sail::test {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("sail-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> random_vectors(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> rows(n, std::vector<double>(dim));
  for (auto& row : rows)
    for (auto& v : row) v = normal(rng);
  return rows;
}

std::string word_name(const LanguageCode& code, std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "w%03zu", i);
  return code + buf;
}

SyntheticWorld make_world(std::size_t size, std::size_t dim, std::uint64_t seed, LanguagePair pair) {
  SyntheticWorld w;
  w.pair = pair;
  std::vector<std::string> xs, ys;
  for (std::size_t i = 0; i < size; ++i) {
    xs.push_back(word_name(pair.source, i));
    ys.push_back(word_name(pair.target, i));
    w.x_to_y[xs.back()] = ys.back();
    w.y_to_x[ys.back()] = xs.back();
  }
  w.x = {Vocabulary(pair.source, xs), EmbeddingSpace::from_rows(pair.source, xs, random_vectors(size, dim, seed))};
  w.y = {Vocabulary(pair.target, ys), EmbeddingSpace::from_rows(pair.target, ys, random_vectors(size, dim, seed + 1))};
  return w;
}

nlohmann::json write_experiment(const fs::path& dir, const SyntheticWorld& world, std::size_t test_from,
                                std::size_t test_to, const std::map<std::string, std::vector<std::string>>& noise) {
  fs::create_directories(dir);
  const auto& pair = world.pair;
  const auto flipped = pair.flipped();
  auto dump_space = [&](const LanguageAssets& a, const std::string& file) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < a.space.size(); ++i) {
      auto r = a.space.row(i);
      rows.emplace_back(r.begin(), r.end());
    }
    write_vec_file(dir / file, a.space.words(), rows);
  };
  dump_space(world.x, pair.source + ".vec");
  dump_space(world.y, pair.target + ".vec");

  std::string fwd, bwd;
  for (std::size_t i = test_from; i < test_to; ++i) {
    fwd += word_name(pair.source, i) + "\t" + word_name(pair.target, i) + "\n";
    bwd += word_name(pair.target, i) + "\t" + word_name(pair.source, i) + "\n";
  }
  write_text(dir / (pair.str() + ".tsv"), fwd);
  write_text(dir / (flipped.str() + ".tsv"), bwd);

  nlohmann::json mock = {{"consistency", {{pair.str(), world.x_to_y}, {flipped.str(), world.y_to_x}}},
                         {"noise", noise}};
  write_text(dir / "mock.json", mock.dump(1));

  return {{"pair", pair.str()},
          {"embeddings", {{pair.source, pair.source + ".vec"}, {pair.target, pair.target + ".vec"}}},
          {"test_sets", {{pair.str(), pair.str() + ".tsv"}, {flipped.str(), flipped.str() + ".tsv"}}},
          {"n_it", 1},
          {"n_f", 20},
          {"template_family", "llama2_13b"},
          {"backend", {{"kind", "mock"}, {"mock_table", "mock.json"}}},
          {"out", "out"}};
}

fs::path save_config(const fs::path& dir, const nlohmann::json& doc) {
  auto path = dir / "config.json";
  write_text(path, doc.dump(1));
  return path;
}

void write_vec_file(const fs::path& path, const std::vector<std::string>& words,
                    const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  out << words.size() << ' ' << (rows.empty() ? 0 : rows.front().size()) << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < words.size(); ++i) {
    out << words[i];
    for (double v : rows[i]) out << ' ' << v;
    out << " \n";
  }
}

FixtureServer::FixtureServer(Handler handler)
    : server_(std::make_unique<httplib::Server>()), requests_(std::make_shared<std::atomic<std::size_t>>(0)) {
  auto counter = requests_;
  server_->Post(".*", [handler, counter](const httplib::Request& req, httplib::Response& res) {
    ++*counter;
    auto [status, body] = handler(req);
    res.status = status;
    res.set_content(body, "application/json");
  });
  port_ = server_->bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

FixtureServer::~FixtureServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string FixtureServer::url(const std::string& path) const {
  return "http://127.0.0.1:" + std::to_string(port_) + path;
}

std::size_t FixtureServer::requests() const { return requests_->load(); }

}  // namespace sail::test
