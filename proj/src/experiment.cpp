#include "ffincidence/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ffincidence/counting.hpp"
#include "ffincidence/generate.hpp"
#include "ffincidence/io.hpp"
#include "ffincidence/parallel.hpp"
#include "ffincidence/spectral.hpp"

namespace ffincidence {

namespace {

// ---------------------------------------------------------------- parsing

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_uint(std::string_view text, std::string_view what) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(std::string(what) + ": expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim(text);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError(std::string(what) + ": expected a number, got '" + std::string(text) + "'");
  return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
  text = trim(text);
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError(std::string(what) + ": expected a boolean, got '" + std::string(text) + "'");
}

int parse_dim(std::string_view text, std::string_view what) {
  const auto v = parse_uint(text, what);
  if (v < 1 || v > static_cast<std::uint64_t>(kMaxFactorDim))
    throw ConfigError(std::string(what) + " must lie in [1, " + std::to_string(kMaxFactorDim) + "]");
  return static_cast<int>(v);
}

std::vector<std::uint32_t> parse_q_list(std::string_view text) {
  std::vector<std::uint32_t> qs;
  if (trim(text).empty()) return qs;
  for (auto part : split(text, ',')) {
    const auto q = parse_uint(part, "q");
    try {
      field_of_order(q);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (q > 1024) throw ConfigError("field order " + std::to_string(q) + " exceeds the incidence engine cap 1024");
    qs.push_back(static_cast<std::uint32_t>(q));
  }
  return qs;
}

const std::set<std::string, std::less<>> kTheorems{"cs", "vinh", "hyperplane", "cartesian", "sdz"};
const std::set<std::string, std::less<>> kApps{"dot_pair", "dot_single", "dot_4d", "sum_product", "vector_valued"};

std::string join_keys(const std::set<std::string, std::less<>>& keys) {
  std::string s;
  for (const auto& k : keys) s += (s.empty() ? "" : ", ") + k;
  return s;
}

// ---------------------------------------------------------------- formatting

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// ---------------------------------------------------------------- set generation

std::uint64_t stream_seed(std::uint64_t seed, std::uint32_t q, std::uint64_t role) {
  return derive_seed(derive_seed(seed, q), role);
}

enum Role : std::uint64_t { kPointsRole = 1, kLinesRole = 2, kSetARole = 3, kSetBRole = 4 };

PointSet make_points(const GeneratorSpec& g, const Space& space, std::uint64_t seed) {
  const auto n = std::min(g.n, space.point_count());
  switch (g.kind) {
    case GeneratorSpec::Kind::full: return full_points(space);
    case GeneratorSpec::Kind::random: return random_points(space, n, seed);
    case GeneratorSpec::Kind::multiset: return multiset_random_points(space, n, g.max_mult, seed);
    case GeneratorSpec::Kind::cartesian: break;
  }
  throw ConfigError("generator '" + g.text + "' only applies to targets taking two sets A and B");
}

LinePairSet make_lines(const GeneratorSpec& g, std::uint32_t q, bool force_nonvertical, std::uint64_t seed) {
  const bool nv = g.nonvertical || force_nonvertical;
  const auto pop = linepair_population(q, nv);
  switch (g.kind) {
    case GeneratorSpec::Kind::full: return nv ? random_linepairs(q, pop, true, seed) : full_linepairs(q);
    case GeneratorSpec::Kind::random: return random_linepairs(q, std::min(g.n, pop), nv, seed);
    case GeneratorSpec::Kind::multiset:
      return multiset_random_linepairs(q, std::min(g.n, pop), g.max_mult, nv, seed);
    case GeneratorSpec::Kind::cartesian: break;
  }
  throw ConfigError("generator '" + g.text + "' cannot produce line-pairs");
}

HyperplanePairSet make_planes(const GeneratorSpec& g, const Space& space, std::uint64_t seed) {
  const auto n = std::min(g.n, hyperplanepair_count(space));
  switch (g.kind) {
    case GeneratorSpec::Kind::full: return full_hyperplanepairs(space);
    case GeneratorSpec::Kind::random: return random_hyperplanepairs(space, n, seed);
    case GeneratorSpec::Kind::multiset: {
      const auto base = random_hyperplanepairs(space, n, seed);
      Rng rng(derive_seed(seed, 0x6d756c74));
      std::vector<std::uint32_t> mult(base.support_size());
      for (auto& m : mult) m = static_cast<std::uint32_t>(1 + rng.below(g.max_mult));
      return HyperplanePairSet(space, std::vector<std::uint64_t>(base.ids().begin(), base.ids().end()), std::move(mult));
    }
    case GeneratorSpec::Kind::cartesian: break;
  }
  throw ConfigError("generator '" + g.text + "' cannot produce hyperplane-pairs");
}

// A set of F_q^2 with `size` elements.
PointSet make_plane_set(const GeneratorSpec& g, std::uint32_t q, std::uint64_t size, std::uint64_t seed) {
  if (g.kind == GeneratorSpec::Kind::full) return full_points(Space{q, 2, 0});
  if (g.kind == GeneratorSpec::Kind::multiset) throw ConfigError("targets taking A and B need plain sets, not multisets");
  return random_plane_points(q, std::min<std::uint64_t>(size, std::uint64_t{q} * q), seed);
}

std::pair<std::uint64_t, std::uint64_t> ab_sizes(const GeneratorSpec& g) {
  return {g.a.value_or(g.n), g.b.value_or(g.n)};
}

// ---------------------------------------------------------------- trials

struct Trial {
  std::vector<ResultRow> rows;
  std::vector<std::string> failures;
  bool spot_checked = false;
};

ResultRow to_row(const BoundReport& r) {
  ResultRow row;
  row.theorem_id = r.theorem_id;
  row.lhs = r.lhs;
  row.main_term = r.main_term.value();
  row.bound_term = r.bound_term;
  row.discrepancy = r.discrepancy;
  row.ratio = r.ratio;
  row.hypothesis_ok = r.hypothesis_ok;
  row.checked = r.checked;
  row.check_ok = r.check_ok;
  return row;
}

ResultRow one_sided_row(std::string id, std::uint64_t lhs, double main, double bound) {
  ResultRow row;
  row.theorem_id = std::move(id);
  row.lhs = lhs;
  row.main_term = main;
  row.bound_term = bound;
  row.discrepancy = static_cast<double>(lhs);
  row.ratio = bound > 0.0 ? static_cast<double>(lhs) / bound : 0.0;
  return row;
}

std::string to_text(const PointSet& s) {
  std::ostringstream os;
  write_set(os, s);
  return os.str();
}
std::string to_text(const LinePairSet& s) {
  std::ostringstream os;
  write_set(os, s);
  return os.str();
}
std::string to_text(const FieldSpec& f, const HyperplanePairSet& s) {
  std::ostringstream os;
  write_set(os, f, s);
  return os.str();
}

void dump(const std::string& dir, std::uint32_t q, std::uint64_t seed, const std::string& role, const std::string& text) {
  const auto path = std::filesystem::path(dir) / ("q" + std::to_string(q) + "_seed" + std::to_string(seed) + "_" + role + ".set");
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

// Re-derives lhs of every row named in `ids` from the serialized sets with the naive counter.
void spot_check(Trial& t, std::uint64_t recount, std::initializer_list<std::string_view> ids) {
  t.spot_checked = true;
  for (const auto& row : t.rows) {
    if (std::find(ids.begin(), ids.end(), row.theorem_id) == ids.end()) continue;
    if (row.lhs != recount)
      t.failures.push_back(row.theorem_id + ": lhs " + std::to_string(row.lhs) +
                           " differs from the naive recount of the serialized sets " + std::to_string(recount));
  }
}

std::uint64_t naive_recount(const FieldSpec& f, const std::string& ptext, const std::string& ltext) {
  std::istringstream ps(ptext), ls(ltext);
  return count_incidences(f, read_points(ps), read_linepairs(ls), CountMethod::naive, 1).count;
}

std::uint64_t naive_recount_planes(const FieldSpec& f, const std::string& ptext, const std::string& htext) {
  std::istringstream ps(ptext), hs(htext);
  return count_incidences(f, read_points(ps), read_hyperplanepairs(hs, f), CountMethod::naive, 1).count;
}

struct TrialInput {
  const ExperimentConfig* config;
  const FieldSpec* field;
  const SpectralContext* ctx;
  std::uint64_t seed;
  bool spot;
  unsigned workers;
};

void verify_trial(const TrialInput& in, Trial& t) {
  const auto& c = *in.config;
  const auto& f = *in.field;
  const std::uint32_t q = f.q();
  const bool dumping = !c.dump_dir.empty();
  const auto ps = stream_seed(in.seed, q, kPointsRole), ls = stream_seed(in.seed, q, kLinesRole);

  auto append = [&](const std::vector<BoundReport>& reports) {
    for (const auto& r : reports) t.rows.push_back(to_row(r));
  };

  if (c.theorem == "hyperplane") {
    const Space space{q, c.d1, c.d2};
    const auto p = make_points(c.points, space, ps);
    const auto h = make_planes(c.lines, space, ls);
    append(verify_hyperplane(f, p, h, in.ctx, in.workers));
    if (in.spot || dumping) {
      const auto pt = to_text(p), ht = to_text(f, h);
      if (dumping) {
        dump(c.dump_dir, q, in.seed, "points", pt);
        dump(c.dump_dir, q, in.seed, "planes", ht);
      }
      if (in.spot) spot_check(t, naive_recount_planes(f, pt, ht), {"hyperplane", "hyperplane_computed"});
    }
    return;
  }

  if (c.theorem == "cartesian") {
    const auto [na, nb] = ab_sizes(c.points);
    const auto a = make_plane_set(c.points, q, na, stream_seed(in.seed, q, kSetARole));
    const auto b = make_plane_set(c.points, q, nb, stream_seed(in.seed, q, kSetBRole));
    const auto l = make_lines(c.lines, q, true, ls);
    append(verify_cartesian(f, a, b, l, c.threshold_exponent, in.workers));
    if (in.spot || dumping) {
      const auto at = to_text(a), bt = to_text(b), lt = to_text(l);
      if (dumping) {
        dump(c.dump_dir, q, in.seed, "a", at);
        dump(c.dump_dir, q, in.seed, "b", bt);
        dump(c.dump_dir, q, in.seed, "lines", lt);
      }
      if (in.spot) {
        std::istringstream as(at), bs(bt), lss(lt);
        const auto recount =
            count_incidences(f, cartesian(read_points(as), read_points(bs)), read_linepairs(lss), CountMethod::naive, 1)
                .count;
        spot_check(t, recount, {"cartesian", "cartesian_small"});
      }
    }
    return;
  }

  const auto p = make_points(c.points, Space{q, 2, 2}, ps);
  const auto l = make_lines(c.lines, q, false, ls);
  if (c.theorem == "cs")
    append(verify_cs(f, p, l, in.workers));
  else if (c.theorem == "vinh")
    t.rows.push_back(to_row(verify_vinh(f, p, l, c.lambda_mode, in.ctx, in.workers)));
  else
    t.rows.push_back(to_row(verify_sdz(f, p, l, c.sdz, in.workers)));
  if (in.spot || dumping) {
    const auto pt = to_text(p), lt = to_text(l);
    if (dumping) {
      dump(c.dump_dir, q, in.seed, "points", pt);
      dump(c.dump_dir, q, in.seed, "lines", lt);
    }
    if (in.spot) spot_check(t, naive_recount(f, pt, lt), {"cs1", "cs2", "vinh", "sdz"});
  }
}

void apps_trial(const TrialInput& in, Trial& t) {
  const auto& c = *in.config;
  const auto& f = *in.field;
  const std::uint32_t q = f.q();
  const auto ps = stream_seed(in.seed, q, kPointsRole);
  const auto a_target = c.targets.at(0);
  const auto b_target = c.targets.size() > 1 ? c.targets[1] : c.targets[0];
  auto maybe_dump = [&](const std::string& role, const PointSet& s) {
    if (!c.dump_dir.empty()) dump(c.dump_dir, q, in.seed, role, to_text(s));
  };
  const double qd = q;

  if (c.app == "dot_pair") {
    const auto e = make_points(c.points, Space{q, 2, 2}, ps);
    maybe_dump("e", e);
    const auto r = dot_product_pair_count(f, e, a_target, b_target, c.variant, in.workers);
    auto row = one_sided_row("dot_pair_" + std::string(to_string(c.variant)), r.count, r.main_term.value(), r.bound);
    if (c.variant == DotVariant::corrected) {
      row.checked = true;
      row.check_ok = r.count == r.reduction_count;
    }
    t.rows.push_back(row);
  } else if (c.app == "dot_single") {
    const auto e = make_points(c.points, Space{q, c.d1, 0}, ps);
    maybe_dump("e", e);
    const auto r = dot_product_single(f, e, a_target);
    const double size = static_cast<double>(e.size());
    t.rows.push_back(one_sided_row("dot_single", r.count, size * size / qd, r.bound));
  } else if (c.app == "dot_4d") {
    const auto e = make_points(c.points, Space{q, 4, 0}, ps);
    maybe_dump("e", e);
    const auto r = dot_product_4d(f, e, a_target, in.workers);
    const double size = static_cast<double>(e.size());
    auto row = one_sided_row("dot_4d", r.direct, size * size / qd, r.bound);
    row.checked = true;
    row.check_ok = r.direct == r.decomposed;
    t.rows.push_back(row);
  } else if (c.app == "sum_product") {
    const auto a = make_plane_set(c.points, q, c.points.a.value_or(c.points.n), stream_seed(in.seed, q, kSetARole));
    maybe_dump("a", a);
    const auto r = sum_product(f, a, in.workers);
    const double size = static_cast<double>(r.size);
    auto row = one_sided_row("sum_product", r.max_side, 0.0, std::pow(qd, -0.375) * size);
    row.ratio = r.conclusion_ratio;
    row.hypothesis_ok = r.hypothesis_ok;
    t.rows.push_back(row);
    auto inc = one_sided_row("sum_product_incidences", r.incidences, size * size * size,
                             std::pow(qd, 0.75) * size *
                                 std::sqrt(static_cast<double>(r.sumset) * static_cast<double>(r.productset)));
    inc.ratio = r.incidence_ratio;
    inc.checked = true;
    inc.check_ok = r.lower_bound_ok;
    t.rows.push_back(inc);
  } else {
    const auto [na, nb] = ab_sizes(c.points);
    const auto a = make_plane_set(c.points, q, na, stream_seed(in.seed, q, kSetARole));
    const auto b = make_plane_set(c.points, q, nb, stream_seed(in.seed, q, kSetBRole));
    maybe_dump("a", a);
    maybe_dump("b", b);
    const auto r = vector_valued(f, a, b, in.workers);
    const double ab = static_cast<double>(a.size()) * static_cast<double>(b.size());
    auto row = one_sided_row("vector_valued", r.image_size, 0.0, std::pow(qd, -0.375) * ab);
    row.ratio = r.ratio;
    row.hypothesis_ok = r.hypothesis_ok;
    row.checked = true;
    row.check_ok = r.chain_ok;
    t.rows.push_back(row);
    t.rows.push_back(one_sided_row("vector_valued_energy", r.energy, 0.0, 2.0 * static_cast<double>(r.incidences)));
  }
}

Trial run_trial(const TrialInput& in) {
  Trial t;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (in.config->command == Command::verify)
      verify_trial(in, t);
    else
      apps_trial(in, t);
  } catch (const OracleMismatch& e) {
    t.failures.push_back(std::string("oracle mismatch: ") + e.what());
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  for (auto& row : t.rows) {
    row.q = in.field->q();
    row.seed = in.seed;
    if (in.config->command == Command::verify && in.config->theorem == "hyperplane") {
      row.d1 = in.config->d1;
      row.d2 = in.config->d2;
    } else if (in.config->command == Command::apps && in.config->app == "dot_single") {
      row.d1 = in.config->d1;
      row.d2 = 0;
    } else if (in.config->command == Command::apps && in.config->app == "dot_4d") {
      row.d1 = 4;
      row.d2 = 0;
    } else if (in.config->command == Command::apps &&
               (in.config->app == "sum_product" || in.config->app == "vector_valued")) {
      row.d2 = 0;
    }
    if (in.config->timing) row.elapsed_ms = ms;
    if (row.checked && !row.check_ok) t.failures.push_back(row.theorem_id + ": hard check failed");
  }
  return t;
}

void validate_targets(const ExperimentConfig& c) {
  if (c.command != Command::apps) return;
  if (c.app == "dot_single" && c.d1 != 2 && c.d1 != 4) throw ConfigError("dot_single needs --d1 2 or --d1 4");
  if (c.targets.empty()) throw ConfigError("targets must not be empty");
  for (auto q : c.q_list)
    for (auto t : c.targets)
      if (t >= q) throw ConfigError("target " + std::to_string(t) + " is not an element of GF(" + std::to_string(q) + ")");
  if (c.app == "dot_single" && c.targets[0] == 0) throw ConfigError("dot_single needs a nonzero target");
}

// ---------------------------------------------------------------- oracle suite

struct SuiteBuilder {
  std::vector<OracleCheck> checks;
  void add(std::string name, bool ok, std::string detail) { checks.push_back({std::move(name), ok, std::move(detail)}); }
};

std::string counting_counterexample(std::uint64_t seed, std::uint64_t naive, std::uint64_t indexed, const std::string& p,
                                    const std::string& l) {
  return "seed " + std::to_string(seed) + ": naive " + std::to_string(naive) + " vs indexed " + std::to_string(indexed) +
         "\n" + p + l;
}

void oracle_counting(SuiteBuilder& s, const FieldSpec& f, unsigned workers) {
  const std::uint32_t q = f.q();
  const Space space{q, 2, 2};
  const std::string tag = "_q" + std::to_string(q);
  std::string failure;
  for (std::uint64_t seed = 0; seed < 200 && failure.empty(); ++seed) {
    Rng rng(stream_seed(seed, q, 11));
    const auto np = 1 + rng.below(std::min<std::uint64_t>(space.point_count(), 4ull * q * q));
    const auto nl = 1 + rng.below(std::min<std::uint64_t>(linepair_population(q, false), 4ull * q * q));
    const bool multi = seed % 2 == 1;
    const auto p = multi ? multiset_random_points(space, np, 5, stream_seed(seed, q, kPointsRole))
                         : random_points(space, np, stream_seed(seed, q, kPointsRole));
    const auto l = multi ? multiset_random_linepairs(q, nl, 5, false, stream_seed(seed, q, kLinesRole))
                         : random_linepairs(q, nl, false, stream_seed(seed, q, kLinesRole));
    const auto a = count_incidences(f, p, l, CountMethod::naive, workers).count;
    const auto b = count_incidences(f, p, l, CountMethod::indexed, workers).count;
    if (a != b) failure = counting_counterexample(seed, a, b, to_text(p), to_text(l));
  }
  s.add("counting_linepairs" + tag, failure.empty(), failure.empty() ? "200 instances agree" : failure);

  failure.clear();
  const Space hspace{q, 2, 3};
  for (std::uint64_t seed = 0; seed < 50 && failure.empty(); ++seed) {
    Rng rng(stream_seed(seed, q, 12));
    const auto np = 1 + rng.below(std::min<std::uint64_t>(hspace.point_count(), 200));
    const auto nh = 1 + rng.below(std::min<std::uint64_t>(hyperplanepair_count(hspace), 200));
    const auto p = random_points(hspace, np, stream_seed(seed, q, kPointsRole));
    const auto h = random_hyperplanepairs(hspace, nh, stream_seed(seed, q, kLinesRole));
    const auto a = count_incidences(f, p, h, CountMethod::naive, workers).count;
    const auto b = count_incidences(f, p, h, CountMethod::indexed, workers).count;
    if (a != b) failure = counting_counterexample(seed, a, b, to_text(p), to_text(f, h));
  }
  s.add("counting_hyperplanepairs" + tag, failure.empty(), failure.empty() ? "50 instances agree" : failure);
}

void oracle_full_space(SuiteBuilder& s, const FieldSpec& f, unsigned workers) {
  const std::uint32_t q = f.q();
  const std::string tag = "_q" + std::to_string(q);
  const auto p = full_points(Space{q, 2, 2});
  const auto l = full_linepairs(q);
  const auto incidences = checked_incidences(f, p, l, workers);
  const auto expected = l.size() * q * q;
  const auto vinh = verify_vinh(f, p, l, LambdaMode::paper, nullptr, workers);
  s.add("full_space" + tag, incidences == expected && vinh.discrepancy == 0.0,
        "I = " + std::to_string(incidences) + ", |L| q^2 = " + std::to_string(expected) +
            ", discrepancy " + format_double(vinh.discrepancy));
  if (q <= 3) {
    const Space s33{q, 3, 3};
    const auto hp = verify_hyperplane(f, full_points(s33), full_hyperplanepairs(s33), nullptr, workers);
    s.add("full_space_hyperplanes" + tag, hp.at(0).discrepancy == 0.0,
          "I = " + std::to_string(hp[0].lhs) + ", discrepancy " + format_double(hp[0].discrepancy));
  }
}

void oracle_graph(SuiteBuilder& s, const FieldSpec& f, const ExperimentConfig& c) {
  const std::uint32_t q = f.q();
  const std::string tag = "_q" + std::to_string(q);
  auto g = build_graph(f, 2, 2, c.workers);
  if (c.inject_fault) {
    // Flip the pair (0, v) for the first v that is not already a neighbour of 0.
    std::uint32_t v = 1;
    while (g.adjacent(0, v)) ++v;
    g.toggle_edge(0, v);
  }
  const auto reg = verify_regularity(g);
  s.add("regularity" + tag, reg.ok, reg.ok ? "every degree is " + std::to_string(g.k()) : reg.detail);
  const auto nb = verify_neighbor_formula(g, c.workers);
  s.add("neighbor_formula" + tag, nb.ok, nb.ok ? "all vertex pairs match" : nb.detail);
  if (g.n() <= kMaxDenseVertices) {
    const auto sq = verify_square_decomposition(g, c.workers);
    s.add("square_decomposition" + tag, sq.ok, sq.ok ? "A^2 decomposes entrywise" : sq.detail);
  }

  SpectralReport rep;
  try {
    rep = second_eigenvalue(g, c.tol, EigenMethod::automatic, c.workers);
  } catch (const ConvergenceError& e) {
    s.add("lambda2" + tag, false, e.what());
    return;
  }
  s.add("lambda2" + tag, rep.within_explicit_bound && rep.residual <= c.tol,
        "lambda2 " + format_double(rep.lambda2) + " <= " + format_double(rep.explicit_bound) + ", residual " +
            format_double(rep.residual));

  const auto n = g.n();
  Rng rng(stream_seed(0, q, 21));
  std::string failure;
  for (int trial = 0; trial < 500 && failure.empty(); ++trial) {
    auto draw = [&] {
      const auto ids = sample_without_replacement(n, 1 + rng.below(n), rng);
      return std::vector<std::uint32_t>(ids.begin(), ids.end());
    };
    const auto u = draw(), v = draw();
    const auto m = mixing_check(g, u, v, rep.lambda2);
    if (!m.ok)
      failure = "trial " + std::to_string(trial) + ": e(U, V) = " + std::to_string(m.edges) + ", main " +
                format_double(m.main_term) + ", bound " + format_double(m.bound);
  }
  s.add("mixing_sets" + tag, failure.empty(), failure.empty() ? "500 set pairs within bound" : failure);

  failure.clear();
  for (int trial = 0; trial < 200 && failure.empty(); ++trial) {
    std::vector<std::uint64_t> fa(n), fb(n);
    for (auto& x : fa) x = rng.below(2) ? rng.below(6) : 0;
    for (auto& x : fb) x = rng.below(2) ? rng.below(6) : 0;
    const auto m = mixing_check_l2(g, fa, fb, rep.lambda2);
    if (!m.ok)
      failure = "trial " + std::to_string(trial) + ": <f, A g> = " + std::to_string(m.edges) + ", main " +
                format_double(m.main_term) + ", bound " + format_double(m.bound);
  }
  s.add("mixing_functions" + tag, failure.empty(), failure.empty() ? "200 function pairs within bound" : failure);

  if (c.inject_fault) return;  // the incidence form needs the unmodified graph's spectrum
  const SpectralContext ctx{q, 2, 2, n, g.k(), rep.lambda2};
  failure.clear();
  for (std::uint64_t seed = 0; seed < 50 && failure.empty(); ++seed) {
    const Space space{q, 2, 2};
    const auto np = std::min<std::uint64_t>(1 + seed % 30, space.point_count());
    const auto p = multiset_random_points(space, np, 3, stream_seed(seed, q, kPointsRole));
    const auto l = multiset_random_linepairs(q, 1 + seed % 25, 3, false, stream_seed(seed, q, kLinesRole));
    const auto r = verify_vinh(f, p, l, LambdaMode::computed, &ctx, c.workers);
    if (!r.check_ok)
      failure = "seed " + std::to_string(seed) + ": I = " + std::to_string(r.lhs) + "\n" + to_text(p) + to_text(l);
  }
  s.add("mixing_incidences" + tag, failure.empty(), failure.empty() ? "50 incidence instances within bound" : failure);
}

int run_spectrum(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  nlohmann::ordered_json all = nlohmann::ordered_json::array();
  bool ok = true;
  for (auto q : c.q_list) {
    const auto f = field_of_order(q);
    const auto g = build_graph(f, c.d1, c.d2, c.workers);
    if (!c.dump_dir.empty()) {
      std::filesystem::create_directories(c.dump_dir);
      const auto path = std::filesystem::path(c.dump_dir) / ("graph_q" + std::to_string(q) + "_d" +
                                                             std::to_string(c.d1) + "_" + std::to_string(c.d2) + ".txt");
      std::ofstream file(path);
      write_graph(file, g);
    }
    SpectralReport rep;
    try {
      rep = second_eigenvalue(g, c.tol, EigenMethod::automatic, c.workers);
    } catch (const ConvergenceError& e) {
      err << "error: q=" << q << ": " << e.what() << '\n';
      return 1;
    }
    ok = ok && rep.within_explicit_bound;
    nlohmann::ordered_json o;
    o["q"] = q;
    o["d1"] = c.d1;
    o["d2"] = c.d2;
    o["n"] = g.n();
    o["k"] = g.k();
    o["lambda2"] = rep.lambda2;
    o["bound"] = rep.explicit_bound;
    o["order_bound"] = rep.order_bound;
    o["within_bound"] = rep.within_explicit_bound;
    o["method"] = std::string(to_string(rep.method));
    o["residual"] = rep.residual;
    o["iterations"] = rep.iterations;
    all.push_back(std::move(o));
  }
  if (c.out == OutputFormat::json || !c.out_set) {
    out << (all.size() == 1 ? all[0] : all).dump(2) << '\n';
  } else {
    bool header = true;
    for (const auto& o : all) {
      std::string line;
      for (const auto& [key, value] : o.items()) {
        if (header) line += (line.empty() ? "" : ",") + key;
      }
      if (header) out << line << '\n';
      header = false;
      line.clear();
      for (const auto& [key, value] : o.items()) {
        std::string v = value.is_string()           ? value.get<std::string>()
                         : value.is_number_float()  ? format_double(value.get<double>())
                                                    : value.dump();
        line += (line.empty() ? "" : ",") + csv_field(v);
      }
      out << line << '\n';
    }
  }
  if (!ok) err << "error: measured lambda2 exceeds the explicit bound\n";
  return ok ? 0 : 1;
}

int run_oracle(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const auto checks = run_oracle_suite(c);
  std::size_t failed = 0;
  for (const auto& check : checks) {
    out << (check.ok ? "PASS " : "FAIL ") << check.name;
    if (check.ok)
      out << ": " << check.detail << '\n';
    else {
      ++failed;
      out << '\n';
      if (failed == 1) err << "counterexample for " << check.name << ":\n" << check.detail << '\n';
    }
  }
  out << "oracle: " << checks.size() << " checks, " << failed << " failed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

// ---------------------------------------------------------------- public API

GeneratorSpec parse_generator(std::string_view text) {
  GeneratorSpec g;
  g.text = std::string(trim(text));
  const auto colon = g.text.find(':');
  const std::string name = g.text.substr(0, colon);
  static const std::map<std::string, GeneratorSpec::Kind, std::less<>> kinds{
      {"full", GeneratorSpec::Kind::full},
      {"full_points", GeneratorSpec::Kind::full},
      {"full_linepairs", GeneratorSpec::Kind::full},
      {"full_hyperplanepairs", GeneratorSpec::Kind::full},
      {"random", GeneratorSpec::Kind::random},
      {"random_points", GeneratorSpec::Kind::random},
      {"random_plane_points", GeneratorSpec::Kind::random},
      {"random_linepairs", GeneratorSpec::Kind::random},
      {"random_hyperplanepairs", GeneratorSpec::Kind::random},
      {"multiset", GeneratorSpec::Kind::multiset},
      {"multiset_random", GeneratorSpec::Kind::multiset},
      {"multiset_random_points", GeneratorSpec::Kind::multiset},
      {"multiset_random_linepairs", GeneratorSpec::Kind::multiset},
      {"multiset_random_hyperplanepairs", GeneratorSpec::Kind::multiset},
      {"cartesian", GeneratorSpec::Kind::cartesian},
  };
  const auto it = kinds.find(name);
  if (it == kinds.end()) throw ConfigError("unknown generator kind '" + name + "'");
  g.kind = it->second;
  if (colon == std::string::npos) return g;
  for (auto param : split(std::string_view(g.text).substr(colon + 1), ',')) {
    param = trim(param);
    if (param.empty()) continue;
    const auto eq = param.find('=');
    if (eq == std::string_view::npos) throw ConfigError("generator parameter '" + std::string(param) + "' needs key=value");
    const auto key = trim(param.substr(0, eq)), value = param.substr(eq + 1);
    if (key == "n")
      g.n = parse_uint(value, "generator n");
    else if (key == "a")
      g.a = parse_uint(value, "generator a");
    else if (key == "b")
      g.b = parse_uint(value, "generator b");
    else if (key == "max_mult" || key == "mult") {
      const auto m = parse_uint(value, "generator max_mult");
      if (m < 1 || m > kMaxMultiplicity) throw ConfigError("generator max_mult must lie in [1, 65536]");
      g.max_mult = static_cast<std::uint32_t>(m);
    } else if (key == "nonvertical")
      g.nonvertical = parse_bool(value, "generator nonvertical");
    else
      throw ConfigError("unknown generator parameter '" + std::string(key) + "'");
  }
  return g;
}

void apply_option(ExperimentConfig& c, std::string_view raw_key, std::string_view value) {
  std::string key(raw_key);
  while (!key.empty() && key.front() == '-') key.erase(0, 1);
  std::replace(key.begin(), key.end(), '_', '-');
  value = trim(value);

  if (key == "command") {
    if (value == "verify") c.command = Command::verify;
    else if (value == "spectrum") c.command = Command::spectrum;
    else if (value == "apps") c.command = Command::apps;
    else if (value == "oracle") c.command = Command::oracle;
    else throw ConfigError("unknown command '" + std::string(value) + "'");
  } else if (key == "theorem") {
    if (!kTheorems.count(value))
      throw ConfigError("unknown theorem '" + std::string(value) + "' (expected one of " + join_keys(kTheorems) + ")");
    c.theorem = std::string(value);
  } else if (key == "app") {
    if (!kApps.count(value))
      throw ConfigError("unknown app '" + std::string(value) + "' (expected one of " + join_keys(kApps) + ")");
    c.app = std::string(value);
  } else if (key == "q") {
    c.q_list = parse_q_list(value);
  } else if (key == "d1") {
    c.d1 = parse_dim(value, "d1");
  } else if (key == "d2") {
    c.d2 = parse_dim(value, "d2");
  } else if (key == "gen" || key == "gen-points") {
    c.points = parse_generator(value);
  } else if (key == "gen-lines") {
    c.lines = parse_generator(value);
  } else if (key == "seeds") {
    const auto dots = value.find("..");
    if (dots == std::string_view::npos) {
      c.seed_first = c.seed_last = parse_uint(value, "seeds");
    } else {
      c.seed_first = parse_uint(value.substr(0, dots), "seeds");
      c.seed_last = parse_uint(value.substr(dots + 2), "seeds");
    }
    if (c.seed_first > c.seed_last) throw ConfigError("seed range " + std::string(value) + " is empty");
    c.seeds_set = true;
  } else if (key == "lambda") {
    if (value == "paper") c.lambda_mode = LambdaMode::paper;
    else if (value == "computed") c.lambda_mode = LambdaMode::computed;
    else throw ConfigError("--lambda must be paper or computed");
  } else if (key == "variant") {
    if (value == "as_written") c.variant = DotVariant::as_written;
    else if (value == "corrected") c.variant = DotVariant::corrected;
    else throw ConfigError("--variant must be as_written or corrected");
  } else if (key == "threshold-exponent") {
    c.threshold_exponent = parse_double(value, "threshold-exponent");
  } else if (key == "out") {
    if (value == "csv") c.out = OutputFormat::csv;
    else if (value == "json") c.out = OutputFormat::json;
    else throw ConfigError("--out must be csv or json");
    c.out_set = true;
  } else if (key == "workers") {
    const auto w = parse_uint(value, "workers");
    if (w > 1024) throw ConfigError("workers must be at most 1024");
    c.workers = static_cast<unsigned>(w);
  } else if (key == "dump-sets") {
    c.dump_dir = std::string(value);
  } else if (key == "targets") {
    c.targets.clear();
    for (auto part : split(value, ',')) c.targets.push_back(static_cast<std::uint32_t>(parse_uint(part, "targets")));
  } else if (key == "timing") {
    c.timing = parse_bool(value, "timing");
  } else if (key == "tol") {
    c.tol = parse_double(value, "tol");
    if (!(c.tol > 0)) throw ConfigError("tol must be positive");
  } else if (key == "sdz-c") {
    c.sdz.c = parse_double(value, "sdz-c");
    if (!(c.sdz.c > 0)) throw ConfigError("sdz-c must be positive");
  } else if (key == "sdz-c-prime") {
    c.sdz.c_prime = parse_double(value, "sdz-c-prime");
    if (!(c.sdz.c_prime > 0)) throw ConfigError("sdz-c-prime must be positive");
  } else if (key == "inject-fault") {
    c.inject_fault = parse_bool(value, "inject-fault");
  } else {
    throw ConfigError("unknown option '" + std::string(raw_key) + "'");
  }
}

void apply_json_config(ExperimentConfig& c, const std::string& json_text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
  auto scalar = [](const nlohmann::ordered_json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw ConfigError("config values must be strings, numbers, booleans or arrays of those");
  };
  for (const auto& [key, value] : doc.items()) {
    std::string text;
    if (value.is_array()) {
      for (const auto& item : value) text += (text.empty() ? "" : ",") + scalar(item);
    } else {
      text = scalar(value);
    }
    apply_option(c, key, text);
  }
}

void finalize_config(ExperimentConfig& c, std::optional<std::uint64_t> seed_base) {
  if (c.q_list.empty()) throw ConfigError("empty q list");
  std::sort(c.q_list.begin(), c.q_list.end());
  c.q_list.erase(std::unique(c.q_list.begin(), c.q_list.end()), c.q_list.end());
  if (!c.seeds_set) c.seed_first = c.seed_last = seed_base.value_or(0);
  if (c.seed_last - c.seed_first >= 10'000'000) throw ConfigError("seed range is too large");
  if (c.command == Command::verify && c.theorem == "hyperplane" && (c.d1 < 2 || c.d1 > c.d2))
    throw ConfigError("the hyperplane bound needs 2 <= d1 <= d2");
  validate_targets(c);
}

GridOutcome run_grid(const ExperimentConfig& c) {
  if (c.command != Command::verify && c.command != Command::apps)
    throw ConfigError("run_grid handles the verify and apps commands");
  validate_targets(c);
  if (!c.dump_dir.empty()) std::filesystem::create_directories(c.dump_dir);

  std::vector<FieldSpec> fields;
  for (auto q : c.q_list) fields.push_back(field_of_order(q));

  std::vector<std::optional<SpectralContext>> contexts(fields.size());
  const bool wants_ctx = c.command == Command::verify &&
                         ((c.theorem == "vinh" && c.lambda_mode == LambdaMode::computed) || c.theorem == "hyperplane");
  if (wants_ctx) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const bool hyper = c.theorem == "hyperplane";
      if (hyper && c.lambda_mode == LambdaMode::paper) break;
      contexts[i] = spectral_context(fields[i], hyper ? c.d1 : 2, hyper ? c.d2 : 2, c.tol, c.workers);
    }
  }

  const std::uint64_t seeds = c.seed_last - c.seed_first + 1;
  const std::size_t total = fields.size() * seeds;
  const unsigned outer = c.workers == 0 ? default_workers() : c.workers;
  const unsigned inner = total >= outer ? 1 : outer;
  std::vector<Trial> slots(total);
  parallel_chunks(total, outer, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t qi = i / seeds;
      const TrialInput in{&c, &fields[qi], contexts[qi] ? &*contexts[qi] : nullptr, c.seed_first + i % seeds,
                          i % 100 == 0, inner};
      slots[i] = run_trial(in);
    }
  });

  GridOutcome outcome;
  for (std::size_t i = 0; i < total; ++i) {
    auto& t = slots[i];
    for (auto& row : t.rows) {
      row.run_id = outcome.rows.size();
      outcome.rows.push_back(std::move(row));
    }
    for (auto& msg : t.failures)
      outcome.failures.push_back("q=" + std::to_string(fields[i / seeds].q()) + " seed=" +
                                 std::to_string(c.seed_first + i % seeds) + ": " + msg);
    if (t.spot_checked) ++outcome.spot_checks;
  }
  return outcome;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "run_id,q,d1,d2,theorem_id,seed,lhs,main_term,bound_term,discrepancy,ratio,hypothesis_ok,elapsed_ms\n";
  for (const auto& r : rows) {
    out << r.run_id << ',' << r.q << ',' << r.d1 << ',' << r.d2 << ',' << csv_field(r.theorem_id) << ',' << r.seed << ','
        << r.lhs << ',' << format_double(r.main_term) << ',' << format_double(r.bound_term) << ','
        << format_double(r.discrepancy) << ',' << format_double(r.ratio) << ',' << (r.hypothesis_ok ? "true" : "false")
        << ',' << (r.elapsed_ms ? format_double(*r.elapsed_ms) : "") << '\n';
  }
}

void write_json(std::ostream& out, const std::vector<ResultRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["run_id"] = r.run_id;
    o["q"] = r.q;
    o["d1"] = r.d1;
    o["d2"] = r.d2;
    o["theorem_id"] = r.theorem_id;
    o["seed"] = r.seed;
    o["lhs"] = r.lhs;
    o["main_term"] = r.main_term;
    o["bound_term"] = r.bound_term;
    o["discrepancy"] = r.discrepancy;
    o["ratio"] = r.ratio;
    o["hypothesis_ok"] = r.hypothesis_ok;
    o["elapsed_ms"] = r.elapsed_ms ? nlohmann::ordered_json(*r.elapsed_ms) : nlohmann::ordered_json(nullptr);
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << '\n';
}

std::vector<OracleCheck> run_oracle_suite(const ExperimentConfig& c) {
  SuiteBuilder s;
  for (auto q : c.q_list) {
    const auto f = field_of_order(q);
    oracle_counting(s, f, c.workers);
    if (q <= 7) oracle_full_space(s, f, c.workers);
    oracle_graph(s, f, c);
  }
  return std::move(s.checks);
}

int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  try {
    switch (c.command) {
      case Command::spectrum: return run_spectrum(c, out, err);
      case Command::oracle: return run_oracle(c, out, err);
      case Command::verify:
      case Command::apps: break;
    }
    const auto outcome = run_grid(c);
    if (c.out == OutputFormat::csv)
      write_csv(out, outcome.rows);
    else
      write_json(out, outcome.rows);
    for (const auto& f : outcome.failures) err << "FAIL " << f << '\n';
    return outcome.failures.empty() ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ffincidence
