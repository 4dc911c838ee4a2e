#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "ffincidence/gf.hpp"

using namespace ffincidence;

TEST_CASE("prime field construction") {
  const auto f = build_field(5, 1);
  CHECK(f.q() == 5);
  CHECK(f.modulus().empty());
  CHECK(f.mul(3, 4) == 2);
  CHECK(build_field(7, 1).inv(3) == 5);
}

TEST_CASE("smallest irreducible moduli") {
  CHECK(build_field(2, 2).modulus() == std::vector<Elem>{1, 1, 1});
  CHECK(build_field(2, 3).modulus() == std::vector<Elem>{1, 0, 1, 1});
  CHECK(build_field(3, 2).modulus() == std::vector<Elem>{1, 0, 1});
}

TEST_CASE("GF(4) product of the generator with itself") {
  const auto f = build_field(2, 2);
  CHECK(f.mul(2, 2) == 3);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(build_field(4, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_field(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_field(2, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_field(1031, 2), std::invalid_argument);
  CHECK_THROWS_AS(field_of_order(6), std::invalid_argument);
  CHECK_THROWS_AS(build_field(3, 1).inv(0), std::domain_error);
}

TEST_CASE("field axioms hold exhaustively for small orders") {
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 25u, 27u, 49u}) {
    CAPTURE(q);
    const auto f = field_of_order(q);
    REQUIRE(f.q() == q);
    std::uint64_t failures = 0;
    for (Elem a = 0; a < q; ++a) {
      if (f.add(a, 0) != a || f.mul(a, 1) != a || f.add(a, f.neg(a)) != 0) ++failures;
      if (a != 0 && f.mul(a, f.inv(a)) != 1) ++failures;
      for (Elem b = 0; b < q; ++b) {
        if (f.add(a, b) != f.add(b, a) || f.mul(a, b) != f.mul(b, a)) ++failures;
        if (f.sub(f.add(a, b), b) != a) ++failures;
        for (Elem c = 0; c < q; ++c) {
          if (f.add(f.add(a, b), c) != f.add(a, f.add(b, c))) ++failures;
          if (f.mul(f.mul(a, b), c) != f.mul(a, f.mul(b, c))) ++failures;
          if (f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c))) ++failures;
        }
      }
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("tabulated and polynomial arithmetic agree") {
  for (std::uint32_t q : {4u, 8u, 9u, 16u, 27u, 81u, 125u, 625u}) {
    CAPTURE(q);
    const auto f = field_of_order(q);
    REQUIRE(f.tabulated());
    for (Elem a = 0; a < q; ++a) {
      for (Elem b = 0; b < q; ++b) REQUIRE(f.mul(a, b) == f.mul_untabled(a, b));
      if (a != 0) REQUIRE(f.inv(a) == f.inv_untabled(a));
    }
  }
}

TEST_CASE("large fields fall back to untabled arithmetic") {
  const auto f = build_field(2, 4);
  CHECK(f.tabulated());
  const auto big = build_field(8191, 1);
  CHECK_FALSE(big.tabulated());
  CHECK(big.mul(big.inv(1234), 1234) == 1);
  const auto ext = build_field(101, 3);
  CHECK_FALSE(ext.tabulated());
  for (Elem a : {1u, 2u, 777u, 1030300u}) CHECK(ext.mul(a, ext.inv(a)) == 1);
}

TEST_CASE("pow and construction determinism") {
  const auto f = build_field(3, 2);
  CHECK(f.pow(0, 0) == 1);
  for (Elem a = 1; a < 9; ++a) CHECK(f.pow(a, 8) == 1);
  CHECK(build_field(3, 2) == f);
  CHECK(is_irreducible(std::vector<Elem>{1, 1, 1}, 2));
  CHECK_FALSE(is_irreducible(std::vector<Elem>{1, 0, 1}, 2));
}
