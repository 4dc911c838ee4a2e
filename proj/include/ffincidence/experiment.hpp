#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ffincidence/apps.hpp"
#include "ffincidence/theorems.hpp"

namespace ffincidence {

/// Bad flags, bad config files, unsupported q. Exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Command { verify, spectrum, apps, oracle };
enum class OutputFormat { csv, json };

/// `kind[:key=value,...]`. The kind family is read from the name, so
/// "random_points", "random_linepairs" and "random" all mean a uniform
/// sample of whatever the target needs. Keys: n, a, b, max_mult, nonvertical.
struct GeneratorSpec {
  enum class Kind { full, random, multiset, cartesian };
  Kind kind = Kind::random;
  std::uint64_t n = 20;
  std::optional<std::uint64_t> a, b;  // sizes of A and B where a target needs two sets of F_q^2
  std::uint32_t max_mult = 4;
  bool nonvertical = false;
  std::string text = "random:n=20";
};

GeneratorSpec parse_generator(std::string_view text);

struct ExperimentConfig {
  Command command = Command::verify;
  std::string theorem = "vinh";  // cs, vinh, hyperplane, cartesian, sdz
  std::string app = "dot_pair";  // dot_pair, dot_single, dot_4d, sum_product, vector_valued
  std::vector<std::uint32_t> q_list{2};
  int d1 = 2, d2 = 2;
  GeneratorSpec points = parse_generator("random_points:n=20");
  GeneratorSpec lines = parse_generator("random_linepairs:n=20");
  std::uint64_t seed_first = 0, seed_last = 0;
  bool seeds_set = false;
  LambdaMode lambda_mode = LambdaMode::paper;
  DotVariant variant = DotVariant::corrected;
  double threshold_exponent = 3.5;
  SdzParams sdz;
  std::vector<std::uint32_t> targets{1, 1};  // dot-product targets a, b (or t)
  OutputFormat out = OutputFormat::csv;  // spectrum prints JSON unless out_set
  bool out_set = false;
  unsigned workers = 0;
  std::string dump_dir;
  bool timing = false;
  double tol = 1e-8;
  bool inject_fault = false;  // oracle test mode: flip one adjacency bit
};

/// Sets one option from its flag name (without dashes; '_' and '-' are
/// interchangeable) and textual value. Throws ConfigError.
void apply_option(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Applies every key of a JSON object, in document order.
void apply_json_config(ExperimentConfig& config, const std::string& json_text);

/// Uses `seed_base` as the seed range when none was given, then checks the
/// invariants (nonempty q list, supported q, valid dimensions).
void finalize_config(ExperimentConfig& config, std::optional<std::uint64_t> seed_base);

struct ResultRow {
  std::uint64_t run_id = 0;
  std::uint32_t q = 0;
  int d1 = 2, d2 = 2;
  std::string theorem_id;
  std::uint64_t seed = 0;
  std::uint64_t lhs = 0;
  double main_term = 0.0;
  double bound_term = 0.0;
  double discrepancy = 0.0;
  double ratio = 0.0;
  bool hypothesis_ok = true;
  std::optional<double> elapsed_ms;
  bool checked = false;
  bool check_ok = true;
};

struct GridOutcome {
  std::vector<ResultRow> rows;           // sorted by (q, seed), run_id sequential
  std::vector<std::string> failures;     // hard-check failures and oracle mismatches
  std::uint64_t spot_checks = 0;         // rows re-derived from serialized sets
};

/// Runs `verify` or `apps` over the q x seed grid. Rows land in slots fixed by
/// (q, seed), so the output does not depend on the worker count.
GridOutcome run_grid(const ExperimentConfig& config);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_json(std::ostream& out, const std::vector<ResultRow>& rows);

struct OracleCheck {
  std::string name;
  bool ok = true;
  std::string detail;  // counterexample when !ok
};

/// Counting equivalence, full-space identities, graph structure, square
/// decomposition and mixing checks for every q of the config.
std::vector<OracleCheck> run_oracle_suite(const ExperimentConfig& config);

/// Entry point behind the command-line tool. Returns the process exit code:
/// 0 success, 1 hard-check failure, 2 configuration error.
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

}  // namespace ffincidence
