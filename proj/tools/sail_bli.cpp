// sail-bli: unsupervised bilingual lexicon induction with self-augmented
// in-context learning.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "sail/error.hpp"
#include "sail/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

struct Overrides {
  std::string config;
  std::optional<std::string> pair;
  std::vector<std::string> directions;
  std::optional<int> n_it;
  std::optional<std::size_t> n_f;
  std::optional<int> beam;
  std::optional<std::size_t> shots;
  std::optional<std::string> template_family;
  std::optional<std::string> backend;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<std::string> cache_dir;
  std::optional<std::string> out;
  bool no_back_translation = false;
};

void add_run_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Experiment config (JSON)")->required();
  cmd->add_option("--pair", o.pair, "Language pair, e.g. de-fr (replaces the config's pairs)");
  cmd->add_option("--direction", o.directions, "Evaluate only these directions, e.g. de-fr");
  cmd->add_option("--n-it", o.n_it, "Dictionary inference iterations (0 = zero-shot)");
  cmd->add_option("--n-f", o.n_f, "Most frequent words harvested per language");
  cmd->add_option("--beam", o.beam, "Beam size n");
  cmd->add_option("--shots", o.shots, "In-context examples per prompt");
  cmd->add_option("--template-family", o.template_family, "llama7b, llama2_7b, llama13b, llama2_13b, chat, ...");
  cmd->add_option("--backend", o.backend, "wire, chat or mock")->check(CLI::IsMember({"wire", "chat", "mock"}));
  cmd->add_option("--endpoint", o.endpoint, "Backend URL");
  cmd->add_option("--model", o.model, "Model id sent to the backend");
  cmd->add_option("--cache-dir", o.cache_dir, "Persistent response cache directory");
  cmd->add_flag("--no-back-translation", o.no_back_translation, "Keep every forward pair (ablation)");
  cmd->add_option("--out", o.out, "Output directory");
}

sail::ExperimentConfig build_config(const Overrides& o) {
  auto cfg = sail::ExperimentConfig::load(o.config);
  if (o.pair) cfg.pairs = {sail::parse_language_pair(*o.pair)};
  if (!o.directions.empty()) {
    cfg.directions.clear();
    for (const auto& d : o.directions) cfg.directions.push_back(sail::parse_language_pair(d));
  }
  if (o.n_it) cfg.sail.n_iterations = *o.n_it;
  if (o.n_f) cfg.sail.n_frequent = *o.n_f;
  if (o.beam) cfg.sail.beam = *o.beam;
  if (o.shots) cfg.sail.shots = *o.shots;
  if (o.template_family) cfg.template_family = *o.template_family;
  if (o.backend) cfg.backend.kind = sail::parse_backend_kind(*o.backend);
  if (o.endpoint) cfg.backend.endpoint = *o.endpoint;
  if (o.model) cfg.backend.model_id = *o.model;
  if (o.cache_dir) cfg.cache_dir = *o.cache_dir;
  if (o.out) cfg.out_dir = *o.out;
  if (o.no_back_translation) cfg.sail.back_translation = false;
  cfg.validate();
  return cfg;
}

void print_summary(const sail::RunSummary& s) {
  std::cout << sail::report_table(s.report);
  std::cout << "backend calls " << s.backend.backend_calls << ", cache hits " << s.backend.cache_hits
            << ", cache misses " << s.backend.cache_misses << ", failures " << s.backend.failures << "\n";
  for (const auto& a : s.artifacts) std::cout << "wrote " << a.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised bilingual lexicon induction with self-augmented in-context learning"};
  app.require_subcommand(1);

  Overrides zero, full, sweep;
  auto* zero_cmd = app.add_subcommand("zero-shot", "Zero-shot baseline over the configured test sets");
  add_run_flags(zero_cmd, zero);
  auto* sail_cmd = app.add_subcommand("sail", "Build the high-confidence dictionary and translate the test sets");
  add_run_flags(sail_cmd, full);
  auto* sweep_cmd = app.add_subcommand("sweep", "Run sail over the config's sweep.n_it / sweep.n_f settings");
  add_run_flags(sweep_cmd, sweep);

  std::string dict_path;
  std::size_t sample_k = 50;
  std::uint64_t seed = 0;
  auto* inspect_cmd = app.add_subcommand("inspect-dict", "Print a seeded random sample of dictionary pairs");
  inspect_cmd->add_option("dictionary", dict_path, "Dictionary TSV")->required();
  inspect_cmd->add_option("-k,--sample", sample_k, "Number of pairs")->capture_default_str();
  inspect_cmd->add_option("--seed", seed, "Sampling seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*zero_cmd) {
      print_summary(sail::cmd_zero_shot(build_config(zero)));
    } else if (*sail_cmd) {
      print_summary(sail::cmd_sail(build_config(full)));
    } else if (*sweep_cmd) {
      for (const auto& r : sail::cmd_sweep(build_config(sweep)))
        std::cout << r.parameter << '\t' << r.value << '\t' << r.direction << '\t' << r.accuracy << '\n';
    } else if (*inspect_cmd) {
      auto sample = sail::cmd_inspect_dict(dict_path, sample_k, seed);
      if (sample.note) std::cerr << "note: " << *sample.note << "\n";
      std::cerr << "seed " << seed << "\n";
      for (const auto& line : sample.lines) std::cout << line << '\n';
    }
  } catch (const sail::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kValidation;
  } catch (const sail::FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kOk;
}
