#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sail/eval.hpp"

using namespace sail;

namespace {

Prediction ok(const std::string& q, const std::string& w) {
  Prediction p;
  p.query = q;
  p.predicted = w;
  p.status = PredictionStatus::ok;
  return p;
}

double closed_form(double a, double b, double c, double d) {
  double n = a + b + c + d;
  return n * (a * d - b * c) * (a * d - b * c) / ((a + b) * (c + d) * (a + c) * (b + d));
}

}  // namespace

TEST_CASE("score") {
  BliTestSet test{{"de", "fr"}, {{"a", {"x"}}, {"b", {"y", "z"}}, {"c", {"w"}}, {"d", {"v"}}}};
  SUBCASE("multi-gold and missing") {
    std::map<std::string, Prediction> preds{{"a", ok("a", "x")}, {"b", ok("b", "z")}, {"c", ok("c", "v")}};
    auto s = score(test, preds);
    CHECK(s.n_queries == 4);
    CHECK(s.n_correct == 2);
    CHECK(s.accuracy == doctest::Approx(0.5));
  }
  SUBCASE("backend errors count as wrong") {
    Prediction failed;
    failed.status = PredictionStatus::backend_error;
    std::map<std::string, Prediction> preds{{"a", failed}};
    CHECK(score(test, preds).n_correct == 0);
  }
  SUBCASE("ten queries with seven correct") {
    BliTestSet t{{"de", "fr"}, {}};
    std::map<std::string, Prediction> preds;
    for (int i = 0; i < 10; ++i) {
      t.entries["q" + std::to_string(i)] = {"g" + std::to_string(i)};
      preds["q" + std::to_string(i)] = ok("q" + std::to_string(i), (i < 7 ? "g" : "h") + std::to_string(i));
    }
    CHECK(score(t, preds).accuracy == doctest::Approx(0.7));
  }
  CHECK_THROWS_AS(score(BliTestSet{{"de", "fr"}, {}}, {}), std::invalid_argument);
}

TEST_CASE("chi_square_2x2") {
  auto r = chi_square_2x2(30, 100, 50, 100);
  CHECK(r.statistic == doctest::Approx(8.3333).epsilon(1e-4));
  CHECK(r.p_value == doctest::Approx(std::erfc(std::sqrt(r.statistic / 2))));

  auto same = chi_square_2x2(40, 100, 40, 100);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);

  auto big = chi_square_2x2(24720, 40000, 19884, 40000);
  CHECK(big.p_value < 1e-100);
  CHECK(big.log10_p < -100);
  CHECK(std::isfinite(big.log10_p));

  auto degenerate = chi_square_2x2(0, 10, 0, 10);
  CHECK(degenerate.statistic == 0.0);
  CHECK(degenerate.p_value == 1.0);
}

TEST_CASE("chi_square_2x2 matches the closed form and is symmetric") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 1000; ++i) {
    std::size_t ta = 1 + rng() % 5000, tb = 1 + rng() % 5000;
    std::size_t ca = rng() % (ta + 1), cb = rng() % (tb + 1);
    auto r = chi_square_2x2(ca, ta, cb, tb);
    double a = ca, b = cb, c = ta - ca, d = tb - cb;
    if ((a + b) == 0 || (c + d) == 0) {
      CHECK(r.statistic == 0.0);
      continue;
    }
    double expected = closed_form(a, b, c, d);
    CHECK(std::abs(r.statistic - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
    auto swapped = chi_square_2x2(cb, tb, ca, ta);
    CHECK(swapped.statistic == doctest::Approx(r.statistic).epsilon(1e-12));
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
    if (r.p_value > 1e-250) CHECK(r.log10_p == doctest::Approx(std::log10(r.p_value)).epsilon(1e-9));
  }
}

TEST_CASE("log10_p stays monotone past underflow") {
  double prev = 0.0;
  for (std::size_t diff = 0; diff <= 20000; diff += 500) {
    auto r = chi_square_2x2(20000 + diff / 2, 40000, 20000 - diff / 2, 40000);
    CHECK(r.log10_p <= prev + 1e-12);
    prev = r.log10_p;
  }
}

TEST_CASE("format_p_value") {
  CHECK(format_p_value(1.1e-251) == "1.1e-251");
  CHECK(format_p_value(0.0039) == "0.0039");
  CHECK(format_p_value(0.0) == "< 1e-300");
}

TEST_CASE("aggregate") {
  auto report = aggregate({{{"de", "fr"}, 10, 6, 0.6}, {{"fr", "de"}, 10, 4, 0.4}}, "h");
  CHECK(report.language_means.at("de") == doctest::Approx(0.5));
  CHECK(report.language_means.at("fr") == doctest::Approx(0.5));
  CHECK(report.global_mean == doctest::Approx(0.5));
  CHECK(report.config_hash == "h");

  auto three = aggregate({{{"de", "fr"}, 10, 6, 0.6}, {{"de", "en"}, 10, 2, 0.2}, {{"en", "fr"}, 100, 100, 1.0}});
  CHECK(three.language_means.at("de") == doctest::Approx(0.4));
  CHECK(three.language_means.at("fr") == doctest::Approx(0.8));
  CHECK(three.language_means.at("en") == doctest::Approx(0.6));
  CHECK(three.global_mean == doctest::Approx(0.6));
  CHECK_THROWS_AS(aggregate({}), std::invalid_argument);

  auto pooled = pooled_chi_square(report, three);
  CHECK(pooled.statistic == doctest::Approx(closed_form(10, 108, 10, 12)));

  auto tsv = report_tsv(report);
  CHECK(tsv == "direction\tn\tcorrect\taccuracy\nde-fr\t10\t6\t0.600000\nfr-de\t10\t4\t0.400000\n");
  CHECK(report_table(report).find("de-fr") != std::string::npos);
}
