#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ffincidence/experiment.hpp"

namespace {

// Value-carrying flags shared by every command, in the order they are applied.
const std::vector<std::pair<std::string, std::string>> kValueFlags{
    {"theorem", "cs | vinh | hyperplane | cartesian | sdz"},
    {"app", "dot_pair | dot_single | dot_4d | sum_product | vector_valued"},
    {"q", "comma-separated field orders"},
    {"d1", "dimension of the first factor"},
    {"d2", "dimension of the second factor"},
    {"gen", "point generator, kind[:n=..,a=..,b=..,max_mult=..]"},
    {"gen-lines", "line-pair or hyperplane-pair generator, kind[:n=..,max_mult=..,nonvertical=1]"},
    {"seeds", "seed range a..b (inclusive) or a single seed"},
    {"lambda", "paper | computed"},
    {"variant", "as_written | corrected"},
    {"threshold-exponent", "exponent of the small-set threshold of the A x B bound"},
    {"out", "csv | json"},
    {"workers", "worker threads (0 = one per core)"},
    {"dump-sets", "directory receiving every trial's input sets"},
    {"targets", "dot-product targets a,b (or t)"},
    {"tol", "eigensolver residual tolerance"},
    {"sdz-c", "constant C of the SdZ-style bound"},
    {"sdz-c-prime", "constant C' of the SdZ-style bound"},
};

struct CommandOptions {
  std::map<std::string, std::string> values;
  std::string config_path;
  bool timing = false;
  bool inject_fault = false;
};

void add_options(CLI::App* sub, CommandOptions& opts) {
  for (const auto& [name, help] : kValueFlags) sub->add_option("--" + name, opts.values[name], help);
  sub->add_option("--config", opts.config_path, "JSON file with the same keys; flags override it");
  sub->add_flag("--timing", opts.timing, "fill the elapsed_ms column");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact incidence counts and bound checks over finite fields"};
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"verify", "check an incidence bound over a q x seed grid"},
      {"spectrum", "second eigenvalue of the product polarity graph"},
      {"apps", "dot-product, sum-product and vector-valued applications"},
      {"oracle", "run the self-verification suite"},
  };
  std::map<std::string, CommandOptions> per_command;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_options(sub, per_command[name]);
    subs[name] = sub;
  }
  subs["oracle"]->add_flag("--inject-fault", per_command["oracle"].inject_fault,
                           "flip one adjacency bit to exercise the failure path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;
  auto& opts = per_command[command];
  auto* sub = subs[command];

  ffincidence::ExperimentConfig config;
  try {
    if (!opts.config_path.empty()) {
      std::ifstream file(opts.config_path);
      if (!file) throw ffincidence::ConfigError("cannot read config file " + opts.config_path);
      std::ostringstream text;
      text << file.rdbuf();
      ffincidence::apply_json_config(config, text.str());
    }
    ffincidence::apply_option(config, "command", command);
    for (const auto& [name, help] : kValueFlags)
      if (sub->count("--" + name) > 0) ffincidence::apply_option(config, name, opts.values[name]);
    if (opts.timing) config.timing = true;
    if (opts.inject_fault) config.inject_fault = true;

    std::optional<std::uint64_t> seed_base;
    if (const char* env = std::getenv("FFINCIDENCE_SEED"); env != nullptr && *env != '\0') {
      ffincidence::ExperimentConfig probe;
      ffincidence::apply_option(probe, "seeds", env);
      seed_base = probe.seed_first;
    }
    ffincidence::finalize_config(config, seed_base);
  } catch (const ffincidence::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return ffincidence::run(config, std::cout, std::cerr);
}
