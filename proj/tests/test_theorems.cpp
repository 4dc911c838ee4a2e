#include "doctest.h"

#include <cmath>

#include "ffincidence/counting.hpp"
#include "ffincidence/generate.hpp"
#include "ffincidence/theorems.hpp"

using namespace ffincidence;

namespace {

const Space kProduct2{2, 2, 2};

LinePairSet nonvertical_all(std::uint32_t q) { return random_linepairs(q, std::uint64_t{q} * q * q * q, true, 0); }

}  // namespace

TEST_CASE("rational terms") {
  CHECK(make_rational(144 * 36, 16) == Rational{324, 1});
  CHECK(make_rational(6, 4) == Rational{3, 2});
  CHECK(make_rational(0, 7) == Rational{0, 1});
  CHECK_THROWS_AS(make_rational(1, 0), std::invalid_argument);
}

TEST_CASE("Cauchy-Schwarz ratios on the full space") {
  const auto f = build_field(2, 1);
  const auto r = verify_cs(f, full_points(kProduct2), full_linepairs(2));
  REQUIRE(r.size() == 2);
  CHECK(r[0].lhs == 144);
  CHECK(r[0].bound_term == doctest::Approx(std::sqrt(2.0) * 4 * 36 + 16));
  CHECK(r[0].ratio == doctest::Approx(0.6557).epsilon(1e-3));
  CHECK(r[1].bound_term == doctest::Approx(132));
  CHECK(r[1].ratio == doctest::Approx(144.0 / 132));
  CHECK(r[1].ratio > 1.0);
  const auto empty = verify_cs(f, PointSet(kProduct2, {}), full_linepairs(2));
  CHECK(empty[0].ratio == 0.0);
  CHECK(empty[1].ratio == 0.0);
}

TEST_CASE("incidence bound with the stated constant") {
  const auto f = build_field(2, 1);
  const auto full = verify_vinh(f, full_points(kProduct2), full_linepairs(2), LambdaMode::paper);
  CHECK(full.lhs == 144);
  CHECK(full.main_term == Rational{144, 1});
  CHECK(full.discrepancy == 0.0);

  const PointSet p(kProduct2, {0}, {2});
  const LinePairSet l(kProduct2, {0});
  const auto m = verify_vinh(f, p, l, LambdaMode::paper);
  CHECK(m.lhs == 2);
  CHECK(m.main_term == Rational{1, 2});
  CHECK(m.discrepancy == doctest::Approx(1.5));
  CHECK(m.bound_term == doctest::Approx(std::pow(2.0, 1.5) * 2));
  CHECK_FALSE(m.checked);
  CHECK_THROWS_AS(verify_vinh(f, p, l, LambdaMode::computed), std::invalid_argument);
}

TEST_CASE("computed-lambda incidence bound never fails") {
  for (std::uint32_t q : {2u, 3u, 4u, 5u}) {
    const auto f = field_of_order(q);
    const auto ctx = spectral_context(f, 2, 2);
    const Space s{q, 2, 2};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      const auto np = 1 + rng.below(std::min<std::uint64_t>(s.point_count(), 200));
      const auto nl = 1 + rng.below(std::min<std::uint64_t>(linepair_population(q, false), 200));
      const bool weighted = seed % 3 == 0;
      const auto p = weighted ? multiset_random_points(s, np, 6, seed) : random_points(s, np, seed);
      const auto l = weighted ? multiset_random_linepairs(q, nl, 6, false, seed + 1000) : random_linepairs(q, nl, false, seed + 1000);
      const auto r = verify_vinh(f, p, l, LambdaMode::computed, &ctx);
      CAPTURE(q);
      CAPTURE(seed);
      REQUIRE(r.checked);
      REQUIRE(r.check_ok);
    }
    const auto whole = verify_vinh(f, full_points(s), full_linepairs(q), LambdaMode::computed, &ctx);
    CHECK(whole.check_ok);
  }
}

TEST_CASE("hyperplane bound") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto f = field_of_order(q);
    const Space s{q, 3, 3};
    const auto r = verify_hyperplane(f, full_points(s), full_hyperplanepairs(s));
    CHECK(r[0].discrepancy == 0.0);
    CHECK(r[0].lhs == full_hyperplanepairs(s).size() * q * q * q * q);
  }
  const auto f3 = build_field(3, 1);
  const Space s23{3, 2, 3};
  const auto ctx = spectral_context(f3, 2, 3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = verify_hyperplane(f3, random_points(s23, 200, seed), random_hyperplanepairs(s23, 200, seed + 9), &ctx);
    REQUIRE(r.size() == 2);
    CHECK(r[0].ratio <= 1.0);
    CHECK(r[1].check_ok);
  }
  const auto none = verify_hyperplane(f3, random_points(s23, 10, 1), HyperplanePairSet(s23, {}));
  CHECK(none[0].lhs == 0);
  CHECK(none[0].discrepancy == 0.0);
  CHECK(none[0].ratio == 0.0);
  CHECK_THROWS_AS(verify_hyperplane(f3, PointSet(Space{3, 3, 2}, {}), HyperplanePairSet(Space{3, 3, 2}, {})),
                  std::invalid_argument);
}

TEST_CASE("hyperplane bound matches the line-pair bound when d1 = d2 = 2") {
  const auto f = build_field(5, 1);
  const auto p = multiset_random_points(Space{5, 2, 2}, 80, 3, 4);
  const auto l = multiset_random_linepairs(5, 90, 3, false, 5);
  const auto v = verify_vinh(f, p, l, LambdaMode::paper);
  const auto h = verify_hyperplane(f, p, to_hyperplane_pairs(f, l))[0];
  CHECK(h.lhs == v.lhs);
  CHECK(h.main_term == v.main_term);
  CHECK(h.bound_term == doctest::Approx(v.bound_term).epsilon(1e-12));
  CHECK(h.discrepancy == v.discrepancy);
}

TEST_CASE("energy reduction") {
  const auto f2 = build_field(2, 1);
  const Space plane2{2, 2, 0};
  const auto single = build_energy_reduction(f2, PointSet(plane2, {0}), LinePairSet(kProduct2, {0}));
  CHECK(single.energy == 1);
  CHECK(single.direct_energy == 1);
  CHECK(single.points.size() == 1);
  CHECK(single.planes.size() == 1);
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto f = field_of_order(q);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      const auto a = random_plane_points(q, 1 + rng.below(q * q), seed);
      const auto l = random_linepairs(q, 1 + rng.below(12), true, seed + 7);
      const auto red = build_energy_reduction(f, a, l);
      REQUIRE(red.points.support_size() == a.size() * l.size());
      REQUIRE(red.planes.support_size() == a.size() * l.size());
      REQUIRE(red.energy == red.direct_energy);
    }
  }
  CHECK_THROWS_AS(build_energy_reduction(f2, PointSet(plane2, {0}), LinePairSet(kProduct2, {linepair_id(2, {Line::upright(0), Line::sloped(0, 0)})})),
                  std::invalid_argument);
}

TEST_CASE("A x B bound") {
  const auto f = build_field(3, 1);
  const Space plane{3, 2, 0};
  const auto all = full_points(plane);
  const auto r = verify_cartesian(f, all, all, random_linepairs(3, 10, true, 3));
  REQUIRE(r.size() == 3);
  CHECK(r[0].theorem_id == "cartesian");
  CHECK(r[0].checked);
  CHECK(r[0].check_ok);
  CHECK(r[1].theorem_id == "cartesian_small");
  const auto empty = verify_cartesian(f, all, all, LinePairSet(Space{3, 2, 2}, {}));
  CHECK(empty[0].lhs == 0);
  CHECK(empty[0].ratio == 0.0);
  CHECK_THROWS_AS(verify_cartesian(f, all, random_plane_points(3, 4, 1), nonvertical_all(3)), std::invalid_argument);
  CHECK_THROWS_AS(verify_cartesian(f, all, all, full_linepairs(3)), std::invalid_argument);

  const auto f5 = build_field(5, 1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_plane_points(5, 4, seed), b = random_plane_points(5, 8, seed + 1);
    const auto l = random_linepairs(5, 30, true, seed + 2);
    const auto rows = verify_cartesian(f5, a, b, l, 3.5);
    CHECK(rows[0].check_ok);
    CHECK(rows[1].hypothesis_ok);  // 4 * 30 <= 5^{3.5}
    CHECK_FALSE(verify_cartesian(f5, a, b, l, 2.0)[1].hypothesis_ok);
  }
}

TEST_CASE("Stevens-de Zeeuw style bound") {
  const auto f = build_field(3, 1);
  const auto l = nonvertical_all(3);
  const auto none = verify_sdz(f, PointSet(Space{3, 2, 2}, {}), l);
  CHECK(none.ratio == 0.0);
  const auto r = verify_sdz(f, random_points(Space{3, 2, 2}, 20, 1), l);
  CHECK(r.lhs > 0);
  CHECK_FALSE(r.hypothesis_ok);  // n = 81 is not below q^3 = 27
  const auto some = verify_sdz(f, random_points(Space{3, 2, 2}, 20, 1), random_linepairs(3, 20, true, 2));
  CHECK(some.hypothesis_ok == (20.0 * 20 * 20 * 20 >= 20.0 * 27));
  CHECK_THROWS_AS(verify_sdz(f, PointSet(Space{3, 2, 2}, {}), l, {0.0, 1.0}), std::invalid_argument);
}
