#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <set>

#include "sail/corpus.hpp"
#include "sail/error.hpp"
#include "support.hpp"

using namespace sail;
using sail::test::TempDir;
using sail::test::write_text;

namespace {

// Exhaustive scan with the same tie rule: similarity desc, then row asc.
std::vector<std::string> brute_force_nn(const EmbeddingSpace& space, const std::string& query,
                                        const std::set<std::string>& candidates, std::size_t k) {
  auto q = space.vector(query);
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t r = 0; r < space.size(); ++r) {
    if (!candidates.count(space.words()[r])) continue;
    double dot = 0.0;
    for (std::size_t d = 0; d < space.dimension(); ++d) dot += static_cast<double>(q[d]) * space.row(r)[d];
    all.emplace_back(dot, r);
  }
  std::sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(space.words()[all[i].second]);
  return out;
}

}  // namespace

TEST_CASE("load_embeddings normalizes axis-aligned vectors") {
  TempDir dir;
  write_text(dir / "a.vec", "2 3\napple 1 0 0\nbanana 0 2 0\n");
  auto loaded = load_embeddings((dir / "a.vec").string(), "en");
  CHECK(loaded.vocab.words() == std::vector<std::string>{"apple", "banana"});
  auto apple = loaded.space.vector("apple");
  auto banana = loaded.space.vector("banana");
  REQUIRE(apple.size() == 3);
  CHECK(apple[0] == 1.0f);
  CHECK(apple[1] == 0.0f);
  CHECK(banana[1] == 1.0f);
  CHECK(banana[0] == 0.0f);
  CHECK(loaded.space.dimension() == 3);
}

TEST_CASE("load_embeddings honours limit") {
  TempDir dir;
  write_text(dir / "a.vec", "2 3\napple 1 0 0\nbanana 0 2 0\n");
  auto loaded = load_embeddings((dir / "a.vec").string(), "en", 1);
  CHECK(loaded.vocab.words() == std::vector<std::string>{"apple"});
  CHECK_FALSE(loaded.space.contains("banana"));
}

TEST_CASE("loaded vectors have unit norm") {
  TempDir dir;
  std::vector<std::string> words;
  for (int i = 0; i < 10; ++i) words.push_back("w" + std::to_string(i));
  auto rows = sail::test::random_vectors(10, 25, 7);
  for (auto& r : rows)
    for (auto& v : r) v *= 37.5;
  sail::test::write_vec_file(dir / "r.vec", words, rows);
  auto loaded = load_embeddings((dir / "r.vec").string(), "xx");
  REQUIRE(loaded.space.size() == 10);
  for (const auto& w : words) {
    long double sum = 0;
    for (float v : loaded.space.vector(w)) sum += static_cast<long double>(v) * v;
    CHECK(std::fabs(std::sqrt(static_cast<double>(sum)) - 1.0) <= 1e-6);
  }
}

TEST_CASE("loading twice is bit-identical") {
  TempDir dir;
  std::vector<std::string> words = {"a", "b", "c", "d"};
  sail::test::write_vec_file(dir / "r.vec", words, sail::test::random_vectors(4, 8, 3));
  auto one = load_embeddings((dir / "r.vec").string(), "xx");
  auto two = load_embeddings((dir / "r.vec").string(), "xx");
  CHECK(one.vocab.words() == two.vocab.words());
  for (const auto& w : words) {
    auto a = one.space.vector(w), b = two.space.vector(w);
    CHECK(std::memcmp(a.data(), b.data(), a.size_bytes()) == 0);
  }
}

TEST_CASE("load_embeddings tolerates CRLF and trailing spaces") {
  TempDir dir;
  write_text(dir / "a.vec", "1 2\r\nhund 3 4 \r\n");
  auto loaded = load_embeddings((dir / "a.vec").string(), "de");
  CHECK(loaded.space.vector("hund")[0] == doctest::Approx(0.6));
}

TEST_CASE("load_embeddings errors and warnings") {
  TempDir dir;
  auto path = (dir / "bad.vec").string();

  SUBCASE("malformed header") {
    write_text(path, "two 3\napple 1 0 0\n");
    CHECK_THROWS_AS(load_embeddings(path, "en"), FormatError);
  }
  SUBCASE("wrong field count reports the line") {
    write_text(path, "2 3\napple 1 0 0\nbanana 0 2\n");
    try {
      load_embeddings(path, "en");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("non-numeric component") {
    write_text(path, "1 3\napple 1 x 0\n");
    CHECK_THROWS_AS(load_embeddings(path, "en"), FormatError);
  }
  SUBCASE("truncated file") {
    write_text(path, "3 3\napple 1 0 0\n");
    CHECK_THROWS_AS(load_embeddings(path, "en"), FormatError);
  }
  SUBCASE("duplicate keeps first occurrence") {
    write_text(path, "3 2\napple 1 0\napple 0 1\npear 1 1\n");
    auto loaded = load_embeddings(path, "en");
    CHECK(loaded.warnings.duplicate_words == 1);
    CHECK(loaded.vocab.words() == std::vector<std::string>{"apple", "pear"});
    CHECK(loaded.space.vector("apple")[0] == 1.0f);
  }
  SUBCASE("zero vector is skipped") {
    write_text(path, "3 2\napple 1 0\nnull 0 0\npear 1 1\n");
    auto loaded = load_embeddings(path, "en");
    CHECK(loaded.warnings.zero_vectors == 1);
    CHECK_FALSE(loaded.vocab.contains("null"));
    CHECK(loaded.vocab.rank("pear") == 1u);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_embeddings((dir / "nope.vec").string(), "en"), FormatError); }
}

TEST_CASE("top_n") {
  Vocabulary v("xx", {"a", "b", "c"});
  CHECK(top_n(v, 2) == std::vector<std::string>{"a", "b"});
  CHECK(top_n(v, 10) == std::vector<std::string>{"a", "b", "c"});

  std::vector<std::string> many;
  for (int i = 0; i < 20000; ++i) many.push_back("w" + std::to_string(i));
  Vocabulary big("xx", many);
  CHECK(top_n(big, 5000).size() == 5000);

  // Prefix monotonicity.
  for (std::size_t a = 0; a <= 25; a += 5)
    for (std::size_t b = a; b <= 25; b += 5) {
      auto shorter = top_n(big, a), longer = top_n(big, b);
      CHECK(std::equal(shorter.begin(), shorter.end(), longer.begin()));
    }
}

TEST_CASE("vocabulary rejects duplicates") { CHECK_THROWS_AS(Vocabulary("xx", {"a", "a"}), ConfigError); }

TEST_CASE("nearest_neighbors basics") {
  auto space = EmbeddingSpace::from_rows("en", {"apple", "banana"}, {{1, 0, 0}, {0, 1, 0}});
  auto self = nearest_neighbors(space, "apple", {"apple"}, 1);
  REQUIRE(self.size() == 1);
  CHECK(self[0].word == "apple");
  CHECK(self[0].similarity == doctest::Approx(1.0));

  auto ortho = nearest_neighbors(space, "apple", {"banana"}, 1);
  CHECK(ortho[0].word == "banana");
  CHECK(ortho[0].similarity == doctest::Approx(0.0));

  CHECK_THROWS_AS(nearest_neighbors(space, "cherry", {"banana"}, 1), std::out_of_range);
  CHECK_THROWS_AS(nearest_neighbors(space, "apple", {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(nearest_neighbors(space, "apple", {"banana"}, 0), std::invalid_argument);
}

TEST_CASE("nearest_neighbors matches brute force on random vectors") {
  std::vector<std::string> words;
  for (int i = 0; i < 50; ++i) words.push_back("w" + std::to_string(i));
  auto space = EmbeddingSpace::from_rows("xx", words, sail::test::random_vectors(50, 12, 11));
  std::set<std::string> all(words.begin(), words.end());
  for (const auto& q : words) {
    auto got = nearest_neighbors(space, q, all, 5);
    std::vector<std::string> names;
    for (const auto& n : got) names.push_back(n.word);
    CHECK(names == brute_force_nn(space, q, all, 5));
    for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1].similarity >= got[i].similarity);
  }
}

TEST_CASE("nearest_neighbors breaks ties by rank") {
  auto space = EmbeddingSpace::from_rows("xx", {"q", "late", "early", "mid"},
                                         {{1, 0}, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
  auto got = nearest_neighbors(space, "q", {"late", "early", "mid"}, 3);
  CHECK(got[0].word == "late");
  CHECK(got[1].word == "early");
  CHECK(got[2].word == "mid");
}

TEST_CASE("load_test_set groups golds") {
  TempDir dir;
  write_text(dir / "t.tsv", "hund\tdog\nhund\thound\nhund\tdog\n");
  auto set = load_test_set((dir / "t.tsv").string(), {"de", "en"});
  REQUIRE(set.entries.size() == 1);
  CHECK(set.entries["hund"] == std::set<std::string>{"dog", "hound"});

  write_text(dir / "empty.tsv", "");
  CHECK(load_test_set((dir / "empty.tsv").string(), {"de", "en"}).entries.empty());

  write_text(dir / "bad.tsv", "a\tb\nc d\n");
  try {
    load_test_set((dir / "bad.tsv").string(), {"de", "en"});
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
  write_text(dir / "three.tsv", "a\tb\tc\n");
  CHECK_THROWS_AS(load_test_set((dir / "three.tsv").string(), {"de", "en"}), FormatError);
}

TEST_CASE("benchmark-scale test set counts match an independent recount") {
  TempDir dir;
  std::mt19937 rng(5);
  std::string content;
  std::vector<std::string> lines;
  for (int i = 0; i < 2000; ++i) {
    std::string line = "s" + std::to_string(rng() % 1400) + "\tt" + std::to_string(rng() % 3);
    lines.push_back(line);
    content += line + "\n";
  }
  write_text(dir / "t.tsv", content);
  auto set = load_test_set((dir / "t.tsv").string(), {"de", "fr"});

  std::set<std::string> unique_lines(lines.begin(), lines.end());
  std::set<std::string> sources;
  for (const auto& l : unique_lines) sources.insert(l.substr(0, l.find('\t')));
  CHECK(set.entries.size() <= 2000);
  CHECK(set.entries.size() == sources.size());
  CHECK(set.total_golds() == unique_lines.size());
}
