#include "sail/eval.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sail {

DirectionScore score(const BliTestSet& test, const std::map<std::string, Prediction>& predictions) {
  if (test.entries.empty()) throw std::invalid_argument("cannot score an empty test set (" + test.pair.str() + ")");
  DirectionScore s{test.pair, test.entries.size(), 0, 0.0};
  for (const auto& [source, golds] : test.entries) {
    auto it = predictions.find(source);
    if (it == predictions.end() || it->second.status != PredictionStatus::ok || !it->second.predicted) continue;
    if (golds.count(*it->second.predicted)) ++s.n_correct;
  }
  s.accuracy = static_cast<double>(s.n_correct) / static_cast<double>(s.n_queries);
  return s;
}

namespace {

// log10 of erfc(z) for z > 0, valid when erfc underflows.
double log10_erfc(double z) {
  double p = std::erfc(z);
  if (p > 1e-300) return std::log10(p);
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / (2.0 * z2) + 3.0 / (4.0 * z2 * z2) - 15.0 / (8.0 * z2 * z2 * z2);
  const double ln = -z2 - std::log(z * std::sqrt(std::numbers::pi)) + std::log(series);
  return ln / std::numbers::ln10;
}

}  // namespace

ChiSquareResult chi_square_2x2(std::size_t correct_a, std::size_t total_a, std::size_t correct_b,
                               std::size_t total_b) {
  if (total_a == 0 || total_b == 0) throw std::invalid_argument("chi-square totals must be positive");
  if (correct_a > total_a || correct_b > total_b) throw std::invalid_argument("correct count exceeds total");
  const double a = static_cast<double>(correct_a), b = static_cast<double>(total_a - correct_a);
  const double c = static_cast<double>(correct_b), d = static_cast<double>(total_b - correct_b);
  const double n = a + b + c + d;
  if (a + c == 0.0 || b + d == 0.0) return {0.0, 1.0, 0.0};
  const double diff = a * d - b * c;
  const double stat = n * diff * diff / ((a + b) * (c + d) * (a + c) * (b + d));
  const double z = std::sqrt(stat / 2.0);
  return {stat, std::erfc(z), stat == 0.0 ? 0.0 : log10_erfc(z)};
}

std::string format_p_value(double p) {
  if (p < 1e-300) return "< 1e-300";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2g", p);
  return buf;
}

EvaluationReport aggregate(std::vector<DirectionScore> directions, std::string config_hash) {
  if (directions.empty()) throw std::invalid_argument("aggregate needs at least one direction");
  EvaluationReport r;
  r.config_hash = std::move(config_hash);
  std::map<LanguageCode, std::pair<double, std::size_t>> sums;
  double total = 0.0;
  for (const auto& d : directions) {
    total += d.accuracy;
    for (const auto& lang : {d.direction.source, d.direction.target}) {
      sums[lang].first += d.accuracy;
      ++sums[lang].second;
    }
  }
  for (const auto& [lang, s] : sums) r.language_means[lang] = s.first / static_cast<double>(s.second);
  r.global_mean = total / static_cast<double>(directions.size());
  r.directions = std::move(directions);
  return r;
}

ChiSquareResult pooled_chi_square(const EvaluationReport& a, const EvaluationReport& b) {
  std::size_t ca = 0, ta = 0, cb = 0, tb = 0;
  for (const auto& d : a.directions) ca += d.n_correct, ta += d.n_queries;
  for (const auto& d : b.directions) cb += d.n_correct, tb += d.n_queries;
  return chi_square_2x2(ca, ta, cb, tb);
}

std::string report_tsv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "direction\tn\tcorrect\taccuracy\n";
  char buf[32];
  for (const auto& d : report.directions) {
    std::snprintf(buf, sizeof buf, "%.6f", d.accuracy);
    out << d.direction.str() << '\t' << d.n_queries << '\t' << d.n_correct << '\t' << buf << '\n';
  }
  return out.str();
}

std::string report_table(const EvaluationReport& report) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-10s %8s %8s %9s\n", "direction", "n", "correct", "top-1 %");
  out << buf;
  for (const auto& d : report.directions) {
    std::snprintf(buf, sizeof buf, "%-10s %8zu %8zu %9.2f\n", d.direction.str().c_str(), d.n_queries, d.n_correct,
                  100.0 * d.accuracy);
    out << buf;
  }
  out << "\nper-language mean (over incident directions)\n";
  for (const auto& [lang, mean] : report.language_means) {
    std::snprintf(buf, sizeof buf, "  %-8s %9.2f\n", lang.c_str(), 100.0 * mean);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "global mean %9.2f\n", 100.0 * report.global_mean);
  out << buf;
  if (!report.config_hash.empty()) out << "config " << report.config_hash << "\n";
  return out.str();
}

}  // namespace sail
