// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ffincidence/apps.hpp"
#include "ffincidence/counting.hpp"
#include "ffincidence/experiment.hpp"
#include "ffincidence/generate.hpp"
#include "ffincidence/spectral.hpp"
#include "ffincidence/theorems.hpp"

using namespace ffincidence;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome field_axioms() {
  Outcome o;
  std::uint64_t triples = 0;
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u}) {
    const auto f = field_of_order(q);
    for (Elem a = 0; a < q; ++a) {
      if (f.add(a, 0) != a || f.mul(a, 1) != a || f.add(a, f.neg(a)) != 0) o.fail("identity or negation, q=" + std::to_string(q));
      if (a != 0 && f.mul(a, f.inv(a)) != 1) o.fail("inverse of " + std::to_string(a) + " in GF(" + std::to_string(q) + ")");
      for (Elem b = 0; b < q; ++b) {
        if (f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a)) o.fail("commutativity, q=" + std::to_string(q));
        if (f.mul(a, b) != f.mul_untabled(a, b)) o.fail("table disagrees with polynomial product, q=" + std::to_string(q));
        for (Elem c = 0; c < q; ++c, ++triples) {
          if (f.add(f.add(a, b), c) != f.add(a, f.add(b, c))) o.fail("additive associativity, q=" + std::to_string(q));
          if (f.mul(f.mul(a, b), c) != f.mul(a, f.mul(b, c))) o.fail("multiplicative associativity, q=" + std::to_string(q));
          if (f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c))) o.fail("distributivity, q=" + std::to_string(q));
        }
      }
    }
  }
  if (o.ok) o.detail = "q in {2,3,4,5,7,8,9}, " + std::to_string(triples) + " triples, zero failures";
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::uint64_t instances = 0, multisets = 0;
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 9u}) {
    const auto f = field_of_order(q);
    const Space space{q, 2, 2};
    for (std::uint64_t seed = 0; seed < 200; ++seed, ++instances) {
      Rng rng(derive_seed(seed, 1000 + q));
      const auto np = 1 + rng.below(std::min<std::uint64_t>(space.point_count(), 400));
      const auto nl = 1 + rng.below(std::min<std::uint64_t>(linepair_population(q, false), 400));
      const bool multi = seed % 2 == 1;
      multisets += multi;
      const auto p = multi ? multiset_random_points(space, np, 9, derive_seed(seed, 2 * q))
                           : random_points(space, np, derive_seed(seed, 2 * q));
      const auto l = multi ? multiset_random_linepairs(q, nl, 9, false, derive_seed(seed, 2 * q + 1))
                           : random_linepairs(q, nl, false, derive_seed(seed, 2 * q + 1));
      const auto naive = count_incidences(f, p, l, CountMethod::naive).count;
      const auto indexed = count_incidences(f, p, l, CountMethod::indexed).count;
      if (naive != indexed)
        o.fail("q=" + std::to_string(q) + " seed=" + std::to_string(seed) + ": naive " + std::to_string(naive) +
               " vs indexed " + std::to_string(indexed));
    }
  }
  if (o.ok)
    o.detail = std::to_string(instances) + " instances over q in {2,3,4,5,7,9} (" + std::to_string(multisets) +
               " multisets), zero disagreements";
  return o;
}

Outcome full_space_identities() {
  Outcome o;
  std::string summary;
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u}) {
    const auto f = field_of_order(q);
    const auto p = full_points(Space{q, 2, 2});
    const auto l = full_linepairs(q);
    const auto i = checked_incidences(f, p, l);
    if (i != l.size() * q * q) o.fail("I(full, full) != |L| q^2 at q=" + std::to_string(q));
    const auto vinh = verify_vinh(f, p, l, LambdaMode::paper);
    if (vinh.discrepancy != 0.0) o.fail("Vinh discrepancy " + fmt(vinh.discrepancy) + " at q=" + std::to_string(q));
    if (q == 2) summary = "q=2: I = " + std::to_string(i) + " = |P||L|/q^2";
  }
  for (std::uint32_t q : {2u, 3u}) {
    const auto f = field_of_order(q);
    const Space s{q, 3, 3};
    const auto rows = verify_hyperplane(f, full_points(s), full_hyperplanepairs(s));
    if (rows.at(0).discrepancy != 0.0)
      o.fail("hyperplane-pair discrepancy " + fmt(rows[0].discrepancy) + " at q=" + std::to_string(q));
  }
  if (o.ok) o.detail = summary + "; line-pair identities for q <= 7 and d1 = d2 = 3 hyperplane-pairs for q in {2,3} exact";
  return o;
}

Outcome graph_structure() {
  Outcome o;
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto f = field_of_order(q);
    const auto g = build_graph(f, 2, 2);
    const std::string tag = " (q=" + std::to_string(q) + ")";
    if (g.k() != std::uint64_t{q + 1} * (q + 1)) o.fail("nominal degree is not (q+1)^2" + tag);
    if (const auto r = verify_regularity(g); !r.ok) o.fail(r.detail + tag);
    if (const auto r = verify_neighbor_formula(g); !r.ok) o.fail(r.detail + tag);
    if (const auto r = verify_square_decomposition(g); !r.ok) o.fail(r.detail + tag);
  }
  if (o.ok) o.detail = "q in {2,3,5}: (q+1)^2-regular, common neighbours match for every pair, A^2 decomposes entrywise";
  return o;
}

Outcome spectral_bound() {
  Outcome o;
  std::string measured;
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto g = build_graph(field_of_order(q), 2, 2);
    const auto r = second_eigenvalue(g, 1e-8);
    const double bound = std::sqrt(2.0 * q * q * q + 3.0 * q * q + 2.0 * q);
    if (r.residual > 1e-8) o.fail("residual " + fmt(r.residual) + " at q=" + std::to_string(q));
    if (!(r.lambda2 <= bound)) o.fail("lambda2 " + fmt(r.lambda2) + " > " + fmt(bound) + " at q=" + std::to_string(q));
    if (q == 2 && std::abs(r.lambda2 - 4.242640687119285) > 1e-6)
      o.fail("q=2 lambda2 " + fmt(r.lambda2, 12) + " differs from the dense recording 4.2426406871");
    measured += (measured.empty() ? "" : ", ") + std::string("q=") + std::to_string(q) + ": " + fmt(r.lambda2) +
                " <= " + fmt(bound);
  }
  // Generalized graphs: the proof's row-sum expression is asserted; the bare
  // power q^{(d1+2d2-3)/2} is the order of that expression, so its ratio is reported.
  std::string order;
  for (const auto& [d1, d2, q] : std::vector<std::tuple<int, int, std::uint32_t>>{{2, 3, 2}, {3, 3, 2}, {2, 3, 3}}) {
    const auto g = build_graph(field_of_order(q), d1, d2);
    const auto r = second_eigenvalue(g, 1e-8);
    const std::string tag = "(" + std::to_string(d1) + "," + std::to_string(d2) + "," + std::to_string(q) + ")";
    if (r.residual > 1e-8) o.fail("residual " + fmt(r.residual) + " at " + tag);
    if (!r.within_explicit_bound)
      o.fail("lambda2 " + fmt(r.lambda2) + " exceeds the explicit bound " + fmt(r.explicit_bound) + " at " + tag);
    order += " " + tag + " " + fmt(r.lambda2, 4) + "/" + fmt(r.order_bound, 4) + "=" + fmt(r.lambda2 / r.order_bound, 3) +
             " (explicit " + fmt(r.explicit_bound, 4) + ")";
  }
  if (o.ok)
    o.detail = measured + "; generalized lambda2 within the explicit bound of order q^{(d1+2d2-3)/2}; "
               "ratio to that power with constant 1:" + order;
  return o;
}

Outcome mixing_lemmas() {
  Outcome o;
  std::uint64_t set_trials = 0, function_trials = 0;
  for (const auto& [d1, d2, q] : std::vector<std::tuple<int, int, std::uint32_t>>{{2, 2, 2}, {2, 2, 3}, {2, 2, 5}, {2, 3, 2}}) {
    const auto g = build_graph(field_of_order(q), d1, d2);
    const double lambda = second_eigenvalue(g, 1e-8).lambda2;
    const auto n = g.n();
    Rng rng(derive_seed(q, 31 * d1 + d2));
    for (int t = 0; t < 500; ++t, ++set_trials) {
      auto draw = [&] {
        const auto ids = sample_without_replacement(n, 1 + rng.below(n), rng);
        return std::vector<std::uint32_t>(ids.begin(), ids.end());
      };
      const auto u = draw(), v = draw();
      const auto m = mixing_check(g, u, v, lambda);
      if (!m.ok) o.fail("set trial " + std::to_string(t) + " q=" + std::to_string(q) + ": e(U,V) = " + std::to_string(m.edges));
    }
    for (int t = 0; t < 200; ++t, ++function_trials) {
      std::vector<std::uint64_t> f(n), h(n);
      const auto cap = 1 + rng.below(50);
      for (auto& x : f) x = rng.below(3) == 0 ? rng.below(cap + 1) : 0;
      for (auto& x : h) x = rng.below(3) == 0 ? rng.below(cap + 1) : 0;
      const auto m = mixing_check_l2(g, f, h, lambda);
      if (!m.ok) o.fail("function trial " + std::to_string(t) + " q=" + std::to_string(q));
    }
  }
  if (o.ok)
    o.detail = std::to_string(set_trials) + " set pairs and " + std::to_string(function_trials) +
               " function pairs over 4 graphs with computed lambda2, zero violations";
  return o;
}

Outcome lemma_and_reductions() {
  Outcome o;
  Rng rng(0xe7e7);
  for (int t = 0; t < 500; ++t) {
    const auto size = 1 + rng.below(300), range = 1 + rng.below(40);
    EnergyQuery query;
    for (std::uint64_t i = 0; i < size; ++i) query.images.push_back(rng.below(range));
    const auto ny = rng.below(range + 1);
    for (std::uint64_t i = 0; i < ny; ++i) query.target.push_back(rng.below(range));
    const auto r = phi_solutions(query);
    // Independent brute force of both sides.
    std::vector<std::uint64_t> target = query.target;
    std::sort(target.begin(), target.end());
    target.erase(std::unique(target.begin(), target.end()), target.end());
    std::uint64_t solutions = 0, energy = 0;
    for (auto x : query.images) solutions += std::binary_search(target.begin(), target.end(), x);
    for (auto x : query.images)
      for (auto y : query.images) energy += x == y;
    if (r.solutions != solutions || r.energy != energy) o.fail("query " + std::to_string(t) + ": counts disagree");
    const unsigned __int128 lhs = static_cast<unsigned __int128>(solutions) * solutions;
    if (!(lhs <= static_cast<unsigned __int128>(target.size()) * energy) || !r.bound_ok)
      o.fail("query " + std::to_string(t) + ": solutions^2 > |Y| energy");
  }
  std::uint64_t reductions = 0;
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto f = field_of_order(q);
    for (std::uint64_t seed = 0; seed < 100; ++seed, ++reductions) {
      Rng sizes(derive_seed(seed, q));
      const auto a = random_plane_points(q, 1 + sizes.below(std::uint64_t{q} * q), derive_seed(seed, 7));
      const auto l = multiset_random_linepairs(q, 1 + sizes.below(std::min<std::uint64_t>(30, linepair_population(q, true))), 3, true,
                                              derive_seed(seed, 8));
      const auto red = build_energy_reduction(f, a, l);
      if (red.energy != red.direct_energy)
        o.fail("q=" + std::to_string(q) + " seed=" + std::to_string(seed) + ": energy " + std::to_string(red.energy) +
               " vs direct " + std::to_string(red.direct_energy));
    }
  }
  if (o.ok)
    o.detail = "500 energy queries satisfy solutions^2 <= |Y| energy; " + std::to_string(reductions) +
               " energy reductions agree with the direct collision count";
  return o;
}

Outcome applications() {
  Outcome o;
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto f = field_of_order(q);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(derive_seed(seed, 40 + q));
      const auto e = random_points(Space{q, 2, 2}, 1 + rng.below(std::min<std::uint64_t>(std::uint64_t{q} * q * q * q, 120)),
                                   derive_seed(seed, 41));
      const auto a = static_cast<Elem>(rng.below(q)), b = static_cast<Elem>(rng.below(q));
      const auto r = dot_product_pair_count(f, e, a, b, DotVariant::corrected);
      if (r.count != r.reduction_count)
        o.fail("dot-product reduction " + std::to_string(r.reduction_count) + " vs direct " + std::to_string(r.count) +
               " at q=" + std::to_string(q));
    }
  }
  const auto f3 = field_of_order(3);
  const auto as_written = dot_product_pair_count(f3, full_points(Space{3, 2, 2}), 1, 1, DotVariant::as_written);
  if (as_written.count != 648) o.fail("q=3 full-space as_written count " + std::to_string(as_written.count) + " != 648");

  for (std::uint32_t q : {2u, 3u}) {
    const auto f = field_of_order(q);
    const Space s4{q, 4, 0};
    for (Elem t = 0; t < q; ++t)
      for (const auto& e : {full_points(s4), random_points(s4, s4.point_count() / 3, 50 + t)}) {
        const auto r = dot_product_4d(f, e, t);
        if (r.direct != r.decomposed)
          o.fail("4-d decomposition " + std::to_string(r.decomposed) + " vs direct " + std::to_string(r.direct));
      }
  }
  for (std::uint32_t q : {3u, 5u}) {
    const auto f = field_of_order(q);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(derive_seed(seed, 60 + q));
      const auto a = random_plane_points(q, 1 + rng.below(std::uint64_t{q} * q), derive_seed(seed, 61));
      const auto r = sum_product(f, a);
      if (!r.lower_bound_ok) o.fail("|A|^3 > I(P, L) at q=" + std::to_string(q) + " seed=" + std::to_string(seed));
    }
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::uint32_t q = seed % 2 == 0 ? 3 : 5;
    Rng rng(derive_seed(seed, 70));
    const auto a = random_plane_points(q, 1 + rng.below(std::uint64_t{q} * q), derive_seed(seed, 71));
    const auto b = random_plane_points(q, 1 + rng.below(std::uint64_t{q} * q), derive_seed(seed, 72));
    if (!vector_valued(f3.q() == q ? f3 : field_of_order(q), a, b).chain_ok)
      o.fail("vector-valued chain fails at seed " + std::to_string(seed));
  }
  if (o.ok)
    o.detail = "dot-product reduction exact on 150 instances; q=3 full as_written count 648; 4-d decomposition exact "
               "for every t; |A|^3 <= I on 100 sum-product sets; vector-valued chain exact on 50 seeds";
  return o;
}

std::string report_csv(unsigned workers) {
  std::ostringstream all;
  struct Run {
    const char* theorem;
    const char* extra_key;
    const char* extra_value;
  };
  const std::vector<Run> runs{{"cs", nullptr, nullptr},          {"vinh", "lambda", "paper"},
                              {"hyperplane", nullptr, nullptr},  {"cartesian", "threshold-exponent", "3.5"},
                              {"cartesian", "threshold-exponent", "2"}, {"sdz", nullptr, nullptr}};
  bool header = true;
  for (const auto& r : runs) {
    ExperimentConfig c;
    apply_option(c, "theorem", r.theorem);
    apply_option(c, "q", "2,3,4,5,7");
    apply_option(c, "seeds", "0..99");
    apply_option(c, "gen", r.theorem == std::string("cartesian") ? "cartesian:a=12,b=20" : "multiset_random:n=30,max_mult=3");
    apply_option(c, "gen-lines", r.theorem == std::string("hyperplane") ? "random_hyperplanepairs:n=30" : "random_linepairs:n=30");
    if (r.extra_key) apply_option(c, r.extra_key, r.extra_value);
    c.workers = workers;
    finalize_config(c, std::nullopt);
    const auto outcome = run_grid(c);
    if (!outcome.failures.empty()) throw std::runtime_error(outcome.failures.front());
    std::ostringstream csv;
    write_csv(csv, outcome.rows);
    std::string text = csv.str();
    if (!header) text.erase(0, text.find('\n') + 1);
    header = false;
    all << text;
  }
  return all.str();
}

Outcome report_regressions() {
  Outcome o;
  std::string first;
  try {
    first = report_csv(0);
    if (report_csv(0) != first) o.fail("CSV differs between reruns");
    if (report_csv(1) != first) o.fail("CSV differs between worker counts");
  } catch (const std::exception& e) {
    o.fail(std::string("emission failed: ") + e.what());
    return o;
  }
  std::ofstream("acceptance_report.csv") << first;
  const auto rows = std::count(first.begin(), first.end(), '\n') - 1;

  const auto f2 = field_of_order(2);
  const auto cs = verify_cs(f2, full_points(Space{2, 2, 2}), full_linepairs(2));
  const double ratio = cs.at(1).ratio;
  if (std::abs(ratio - 144.0 / 132.0) > 1e-12 || !(ratio > 1.0))
    o.fail("CS part 2 full-space ratio at q=2 is " + fmt(ratio) + ", expected 144/132");
  if (o.ok)
    o.detail = std::to_string(rows) + " rows written to acceptance_report.csv, byte-identical across reruns and worker "
               "counts; CS part 2 full-space ratio at q=2 reproduced: " + fmt(ratio, 8) + " (known exceedance)";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "field axioms", 10, field_axioms},
      {2, "oracle equivalence", 60, oracle_equivalence},
      {3, "full-space identities", 120, full_space_identities},
      {4, "graph structure", 180, graph_structure},
      {5, "spectral bound", 300, spectral_bound},
      {6, "mixing lemmas", 180, mixing_lemmas},
      {7, "energy lemma and reductions", 120, lemma_and_reductions},
      {8, "applications", 300, applications},
      {9, "report-only regressions", 600, report_regressions},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_s) o.fail("took " + fmt(secs) + " s, limit " + fmt(c.limit_s) + " s");
    failed += !o.ok;
    std::printf("%s %d %s: %s [%.2f s]\n", o.ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
