#include "sail/dictionary.hpp"

#include <fstream>
#include <sstream>

#include "sail/error.hpp"

namespace sail {

namespace {

std::string provenance_text(unsigned p) {
  if (p == (from_x_side | from_y_side)) return "x+y";
  return p == from_x_side ? "x" : "y";
}

}  // namespace

void HighConfidenceDictionary::add(const std::string& x_word, const std::string& y_word, unsigned provenance) {
  entries_[{x_word, y_word}] |= provenance;
}

std::size_t HighConfidenceDictionary::count_from(Provenance side) const {
  std::size_t n = 0;
  for (const auto& [_, p] : entries_) n += (p & side) ? 1 : 0;
  return n;
}

std::vector<IclExample> HighConfidenceDictionary::oriented(bool forward) const {
  std::vector<IclExample> out;
  out.reserve(entries_.size());
  for (const auto& [e, _] : entries_) out.push_back(forward ? IclExample{e.first, e.second} : IclExample{e.second, e.first});
  return out;
}

std::string HighConfidenceDictionary::to_tsv() const {
  std::ostringstream out;
  for (const auto& [e, p] : entries_)
    out << e.first << '\t' << e.second << '\t' << provenance_text(p) << '\t' << iteration_ << '\n';
  return out.str();
}

void HighConfidenceDictionary::write_tsv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write dictionary '" + path + "'");
  out << to_tsv();
}

HighConfidenceDictionary HighConfidenceDictionary::read_tsv(const std::string& path, const LanguagePair& pair) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, 0, "cannot open dictionary");
  HighConfidenceDictionary dict(pair);
  std::string line;
  std::size_t line_no = 0;
  bool seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (!seen && line.rfind("# config_hash=", 0) == 0)) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (fields.size() != 4 || fields[0].empty() || fields[1].empty())
      throw FormatError(path, line_no, "expected x_word, y_word, provenance and iteration");
    unsigned p = 0;
    if (fields[2] == "x") p = from_x_side;
    else if (fields[2] == "y") p = from_y_side;
    else if (fields[2] == "x+y") p = from_x_side | from_y_side;
    else throw FormatError(path, line_no, "unknown provenance '" + fields[2] + "'");
    int iteration = 0;
    try {
      std::size_t used = 0;
      iteration = std::stoi(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw FormatError(path, line_no, "iteration is not an integer");
    }
    if (seen && iteration != dict.iteration_) throw FormatError(path, line_no, "mixed iteration numbers");
    dict.iteration_ = iteration;
    seen = true;
    dict.add(fields[0], fields[1], p);
  }
  return dict;
}

}  // namespace sail
