#include "doctest.h"

#include <cmath>

#include "ffincidence/apps.hpp"
#include "ffincidence/generate.hpp"

using namespace ffincidence;

TEST_CASE("pair dot products on the full space") {
  const auto f = build_field(3, 1);
  const auto e = full_points(Space{3, 2, 2});
  const auto literal = dot_product_pair_count(f, e, 1, 1, DotVariant::as_written);
  CHECK(literal.count == 648);
  const auto fixed = dot_product_pair_count(f, e, 1, 1, DotVariant::corrected);
  CHECK(fixed.count == 576);
  CHECK(fixed.reduction_count == 576);
  CHECK(fixed.main_term == Rational{729, 1});
  CHECK(dot_product_pair_count(f, PointSet(Space{3, 2, 2}, {}), 1, 1).count == 0);
}

TEST_CASE("line-pair reduction matches direct enumeration") {
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto f = field_of_order(q);
    const Space s{q, 2, 2};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed);
      const auto n = 1 + rng.below(std::min<std::uint64_t>(s.point_count(), 150));
      const auto e = seed % 4 == 0 ? multiset_random_points(s, n, 3, seed) : random_points(s, n, seed);
      const Elem a = static_cast<Elem>(rng.below(q)), b = static_cast<Elem>(rng.below(q));
      const auto r = dot_product_pair_count(f, e, a, b, DotVariant::corrected);
      CAPTURE(q);
      CAPTURE(seed);
      REQUIRE(r.count == r.reduction_count);
    }
  }
}

TEST_CASE("single dot products") {
  const auto f = build_field(3, 1);
  CHECK(dot_product_single(f, full_points(Space{3, 2, 0}), 1).count == 24);
  const Space plane{3, 2, 0};
  const Elem e0[2] = {1, 1};
  CHECK(dot_product_single(f, PointSet(plane, {encode_point(plane, e0)}), 2).count == 1);
  CHECK_THROWS_AS(dot_product_single(f, full_points(plane), 0), std::invalid_argument);
}

TEST_CASE("four-dimensional dot products split into two-parameter counts") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto f = field_of_order(q);
    const Space s{q, 4, 0};
    std::uint64_t total = 0;
    const auto e = random_points(s, s.point_count() / 2, 3);
    for (Elem t = 0; t < q; ++t) {
      const auto r = dot_product_4d(f, e, t);
      CHECK(r.direct == r.decomposed);
      total += r.direct;
    }
    CHECK(total == e.size() * e.size());
    const auto full = dot_product_4d(f, full_points(s), 0);
    CHECK(full.direct == full.decomposed);
  }
  CHECK(dot_product_4d(build_field(2, 1), PointSet(Space{2, 4, 0}, {0}), 0).direct == 1);
}

TEST_CASE("sum-product sizes and the incidence lower bound") {
  const auto f3 = build_field(3, 1);
  const Space plane3{3, 2, 0};
  const auto origin = sum_product(f3, PointSet(plane3, {0}));
  CHECK(origin.sumset == 1);
  CHECK(origin.productset == 1);
  const auto full = sum_product(f3, full_points(plane3));
  CHECK(full.sumset == 9);
  CHECK(full.productset == 9);
  CHECK(full.lower_bound_ok);
  // P covers F_3^2 x F_3^2 exactly once, so each of the 81 line-pairs meets q^2 points.
  CHECK(full.incidences == 729);
  for (std::uint32_t q : {3u, 5u}) {
    const auto f = field_of_order(q);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto r = sum_product(f, random_plane_points(q, 6, seed));
      REQUIRE(r.incidences >= 216);
      REQUIRE(r.incidences <= 36ull * q * q);
      REQUIRE(r.lower_bound_ok);
    }
  }
  CHECK_THROWS_AS(sum_product(f3, PointSet(plane3, {})), std::invalid_argument);
}

TEST_CASE("vector-valued image") {
  const auto f2 = build_field(2, 1);
  const Space plane2{2, 2, 0};
  const auto origin = vector_valued(f2, PointSet(plane2, {0}), PointSet(plane2, {0}));
  CHECK(origin.image_size == 1);
  const auto full = vector_valued(f2, full_points(plane2), full_points(plane2));
  CHECK(full.image_size == 4);
  CHECK(full.signs_collapse);
  const auto f3 = build_field(3, 1);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = vector_valued(f3, random_plane_points(3, 4, seed), random_plane_points(3, 4, seed + 100));
    REQUIRE(r.chain_ok);
    CHECK_FALSE(r.signs_collapse);
  }
}
