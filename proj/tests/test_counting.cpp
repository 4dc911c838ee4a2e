#include "doctest.h"

#include <cmath>
#include <vector>

#include "ffincidence/counting.hpp"
#include "ffincidence/generate.hpp"

using namespace ffincidence;

TEST_CASE("full space incidences") {
  for (std::uint32_t q : {2u, 3u, 4u, 5u}) {
    CAPTURE(q);
    const auto f = field_of_order(q);
    const auto p = full_points(Space{q, 2, 2});
    const auto l = full_linepairs(q);
    const auto naive = count_incidences(f, p, l, CountMethod::naive);
    const auto indexed = count_incidences(f, p, l, CountMethod::indexed);
    CHECK(naive.count == l.size() * q * q);
    CHECK(indexed.count == naive.count);
  }
  const auto f2 = build_field(2, 1);
  CHECK(count_incidences(f2, full_points(Space{2, 2, 2}), full_linepairs(2), CountMethod::indexed).count == 144);
}

TEST_CASE("empty and weighted inputs") {
  const auto f = build_field(2, 1);
  const Space s{2, 2, 2};
  CHECK(count_incidences(f, PointSet(s, {}), full_linepairs(2), CountMethod::naive).count == 0);
  CHECK(count_incidences(f, full_points(s), LinePairSet(s, {}), CountMethod::indexed).count == 0);
  const PointSet p(s, {0}, {2});
  const LinePairSet l(s, {linepair_id(2, {Line::sloped(0, 0), Line::sloped(0, 0)})}, {3});
  CHECK(count_incidences(f, p, l, CountMethod::naive).count == 6);
  CHECK(count_incidences(f, p, l, CountMethod::indexed).count == 6);
}

TEST_CASE("naive and indexed counts agree on random instances") {
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 9u}) {
    const auto f = field_of_order(q);
    const Space s{q, 2, 2};
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      CAPTURE(q);
      CAPTURE(seed);
      Rng rng(seed);
      const auto np = 1 + rng.below(s.point_count());
      const auto nl = 1 + rng.below(linepair_population(q, false));
      const bool weighted = seed % 2 == 1;
      const auto p = weighted ? multiset_random_points(s, np, 5, derive_seed(seed, 1)) : random_points(s, np, derive_seed(seed, 1));
      const auto l = weighted ? multiset_random_linepairs(q, nl, 5, false, derive_seed(seed, 2))
                              : random_linepairs(q, nl, false, derive_seed(seed, 2));
      const auto a = count_incidences(f, p, l, CountMethod::naive, 1).count;
      REQUIRE(count_incidences(f, p, l, CountMethod::indexed, 1).count == a);
      REQUIRE(count_incidences(f, p, l, CountMethod::indexed, 3).count == a);
      REQUIRE(count_incidences(f, p, to_hyperplane_pairs(f, l), CountMethod::indexed, 2).count == a);
    }
  }
}

TEST_CASE("hyperplane-pair counting") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto f = field_of_order(q);
    const Space s{q, 3, 3};
    // Each hyperplane-pair holds q^2 * q^2 points.
    const auto h = full_hyperplanepairs(s);
    const auto full = count_incidences(f, full_points(s), h, CountMethod::indexed);
    CHECK(full.count == h.size() * q * q * q * q);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto p = random_points(s, 50, seed);
      const auto hs = random_hyperplanepairs(s, 40, seed + 100);
      CHECK(count_incidences(f, p, hs, CountMethod::naive).count == count_incidences(f, p, hs, CountMethod::indexed).count);
    }
  }
  const auto f = build_field(2, 1);
  const Space mixed{2, 2, 3};
  const auto p = random_points(mixed, 20, 4);
  const auto hs = random_hyperplanepairs(mixed, 30, 5);
  CHECK(count_incidences(f, p, hs, CountMethod::naive).count == count_incidences(f, p, hs, CountMethod::indexed).count);
}

TEST_CASE("degree profile of the full space") {
  const auto f = build_field(2, 1);
  const auto d = degree_profile(f, full_points(Space{2, 2, 2}), full_linepairs(2));
  CHECK(d.sum_sq_point == 1296);
  CHECK(d.sum_sq_line == 576);
  CHECK(d.sum_point == 144);
  CHECK(d.sum_line == 144);
  for (auto v : d.per_point) CHECK(v == 9);
  for (auto v : d.per_line) CHECK(v == 4);

  const Space s{2, 2, 2};
  const auto one = degree_profile(f, PointSet(s, {0}), LinePairSet(s, {0}));
  CHECK(one.sum_point == 1);
  CHECK(one.sum_line == 1);
}

TEST_CASE("degree identities and Cauchy-Schwarz steps") {
  for (std::uint32_t q : {3u, 4u, 5u}) {
    const auto f = field_of_order(q);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto p = multiset_random_points(Space{q, 2, 2}, 30 + seed, 3, seed);
      const auto l = multiset_random_linepairs(q, 40, 3, false, seed + 50);
      const auto i = count_incidences(f, p, l, CountMethod::indexed).count;
      const auto d = degree_profile(f, p, l);
      REQUIRE(d.sum_point == i);
      REQUIRE(d.sum_line == i);
      CHECK(static_cast<double>(i) * i <= static_cast<double>(p.size()) * d.sum_sq_point);
      CHECK(static_cast<double>(i) * i <= static_cast<double>(l.size()) * d.sum_sq_line);
    }
  }
}

TEST_CASE("solution counts against energy") {
  const std::vector<int> x2{1, 2}, y5{5}, x3{1, 2, 3}, x4{1, 2, 3, 4}, y0{0};
  auto r = phi_solutions(make_energy_query(x2, [](int) { return 5; }, y5));
  CHECK(r.solutions == 2);
  CHECK(r.energy == 4);
  CHECK(r.bound_ok);
  r = phi_solutions(make_energy_query(x3, [](int v) { return v; }, x3));
  CHECK(r.solutions == 3);
  CHECK(r.energy == 3);
  CHECK(r.bound_ok);
  r = phi_solutions(make_energy_query(x4, [](int v) { return v % 2; }, y0));
  CHECK(r.solutions == 2);
  CHECK(r.energy == 8);
  CHECK(r.bound_ok);
  const std::vector<std::uint64_t> images{1, 1, 2, 3, 3, 3};
  CHECK(collision_energy(images) == 4 + 1 + 9);
}
