#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "ffincidence/counting.hpp"
#include "ffincidence/generate.hpp"
#include "ffincidence/spectral.hpp"

using namespace ffincidence;

TEST_CASE("graph sizes and regularity") {
  const auto g2 = build_graph(build_field(2, 1), 2, 2);
  CHECK(g2.n() == 49);
  CHECK(g2.k() == 9);
  const auto g3 = build_graph(build_field(3, 1), 2, 2);
  CHECK(g3.n() == 169);
  CHECK(g3.k() == 16);
  const auto g33 = build_graph(build_field(3, 1), 3, 3);
  CHECK(g33.n() == 1600);
  CHECK(g33.k() == 169);
  for (const auto* g : {&g2, &g3, &g33}) CHECK(verify_regularity(*g).ok);
  CHECK(verify_regularity(build_graph(build_field(5, 1), 2, 2)).ok);
  CHECK(verify_regularity(build_graph(build_field(3, 1), 2, 3)).ok);
  CHECK_THROWS_AS(build_graph(build_field(17, 1), 3, 3), std::invalid_argument);
}

TEST_CASE("common neighbour cases") {
  const auto f = build_field(2, 1);
  const auto g = build_graph(f, 2, 2);
  const std::uint32_t n2 = static_cast<std::uint32_t>(g.n2());
  CHECK(common_neighbors(g, 10, 10) == 9);
  CHECK(common_neighbors(g, 1 * n2 + 2, 1 * n2 + 5) == 3);
  CHECK(common_neighbors(g, 1 * n2 + 2, 4 * n2 + 5) == 1);
  for (std::uint32_t q : {2u, 3u})
    for (auto [d1, d2] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 3}}) {
      CAPTURE(q);
      CAPTURE(d1);
      CAPTURE(d2);
      CHECK(verify_neighbor_formula(build_graph(field_of_order(q), d1, d2)).ok);
    }
}

TEST_CASE("square decomposition") {
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const auto r = verify_square_decomposition(build_graph(field_of_order(q), 2, 2));
    CHECK_MESSAGE(r.ok, r.detail);
  }
}

TEST_CASE("injected faults are detected") {
  auto g = build_graph(build_field(3, 1), 2, 2);
  std::uint32_t v = 1;
  while (g.adjacent(0, v)) ++v;
  g.toggle_edge(0, v);
  CHECK(g.adjacent(v, 0));
  CHECK_FALSE(verify_regularity(g).ok);
  CHECK_FALSE(verify_neighbor_formula(g).ok);
  CHECK_FALSE(verify_square_decomposition(g).ok);
  g.toggle_edge(0, v);
  CHECK(verify_square_decomposition(g).ok);
}

TEST_CASE("second eigenvalue") {
  const auto g2 = build_graph(build_field(2, 1), 2, 2);
  const auto r2 = second_eigenvalue(g2);
  CHECK(r2.method == EigenMethod::dense);
  CHECK(r2.lambda2 == doctest::Approx(3 * std::sqrt(2.0)).epsilon(1e-9));
  CHECK(r2.explicit_bound == doctest::Approx(std::sqrt(32.0)));
  CHECK(r2.within_explicit_bound);
  CHECK(r2.residual <= 1e-8);

  const auto g3 = build_graph(build_field(3, 1), 2, 2);
  const auto r3 = second_eigenvalue(g3);
  CHECK(r3.lambda2 == doctest::Approx(4 * std::sqrt(3.0)).epsilon(1e-9));
  CHECK(r3.explicit_bound == doctest::Approx(std::sqrt(87.0)));

  CHECK_THROWS_AS(second_eigenvalue(g2, 0.0), std::invalid_argument);
}

TEST_CASE("dense and power iteration agree") {
  const double tol = 1e-8;
  for (std::uint32_t q : {2u, 3u, 4u})
    for (auto [d1, d2] : {std::pair{2, 2}, std::pair{2, 3}}) {
      if (q == 4 && d2 == 3) continue;
      const auto g = build_graph(field_of_order(q), d1, d2);
      const auto dense = second_eigenvalue(g, tol, EigenMethod::dense);
      const auto power = second_eigenvalue(g, tol, EigenMethod::power);
      CAPTURE(q);
      CHECK(std::abs(dense.lambda2 - power.lambda2) <= 10 * tol);
      CHECK(power.residual <= tol);
      CHECK(dense.within_explicit_bound);
    }
}

TEST_CASE("explicit eigenvalue expression") {
  CHECK(explicit_lambda_bound(2, 3, 2) == doctest::Approx(std::sqrt(110.0)));
  CHECK(explicit_lambda_bound(5, 2, 2) == doctest::Approx(std::sqrt(2.0 * 125 + 3 * 25 + 10)));
  CHECK(order_lambda_bound(2, 2, 2) == doctest::Approx(std::pow(2.0, 1.5)));
}

TEST_CASE("mixing lemma") {
  const auto f = build_field(2, 1);
  const auto g = build_graph(f, 2, 2);
  const double lambda = second_eigenvalue(g).lambda2;
  std::vector<std::uint32_t> all(g.n());
  for (std::uint32_t i = 0; i < g.n(); ++i) all[i] = i;
  const auto whole = mixing_check(g, all, all, lambda);
  CHECK(whole.edges == g.n() * g.k());
  CHECK(whole.discrepancy == 0.0);
  const auto none = mixing_check(g, {}, all, lambda);
  CHECK(none.edges == 0);
  CHECK(none.ok);

  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint32_t> u, v;
    std::vector<std::uint64_t> fu(g.n(), 0), fv(g.n(), 0);
    for (std::uint32_t i = 0; i < g.n(); ++i) {
      if (rng.below(2)) u.push_back(i), fu[i] = 1;
      if (rng.below(3) == 0) v.push_back(i), fv[i] = 1;
    }
    const auto a = mixing_check(g, u, v, lambda);
    const auto b = mixing_check_l2(g, fu, fv, lambda);
    REQUIRE(a.ok);
    REQUIRE(b.ok);
    REQUIRE(a.edges == b.edges);
    REQUIRE(a.discrepancy == doctest::Approx(b.discrepancy));
  }
  std::vector<std::uint64_t> ones(g.n(), 1);
  CHECK(mixing_check_l2(g, ones, ones, lambda).discrepancy == 0.0);
}

TEST_CASE("incidences are edges between embedded vertices") {
  const auto f = build_field(3, 1);
  const auto g = build_graph(f, 2, 2);
  const auto p = random_points(Space{3, 2, 2}, 30, 1);
  const auto l = random_linepairs(3, 40, false, 2);
  std::vector<std::uint32_t> u, v;
  for (auto id : p.ids()) u.push_back(point_vertex(f, g, id));
  for (auto id : l.ids()) v.push_back(linepair_vertex(f, g, id));
  CHECK(mixing_check(g, u, v, 1.0).edges == count_incidences(f, p, l, CountMethod::naive).count);

  const auto g23 = build_graph(f, 2, 3);
  const Space s{3, 2, 3};
  const auto ps = random_points(s, 60, 3);
  const auto hs = random_hyperplanepairs(s, 70, 4);
  u.clear();
  v.clear();
  for (auto id : ps.ids()) u.push_back(point_vertex(f, g23, id));
  for (auto id : hs.ids()) v.push_back(hyperplanepair_vertex(f, g23, id));
  CHECK(mixing_check(g23, u, v, 1.0).edges == count_incidences(f, ps, hs, CountMethod::naive).count);
}

TEST_CASE("graph dump") {
  const auto g = build_graph(build_field(2, 1), 2, 2);
  std::ostringstream os;
  write_graph(os, g);
  std::istringstream in(os.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "# ffincidence-graph v1 q=2 d1=2 d2=2");
  std::uint64_t edges = 0, loops = 0;
  std::uint32_t a, b;
  while (in >> a >> b) {
    ++edges;
    loops += a == b;
  }
  CHECK(2 * (edges - loops) + loops == g.n() * g.k());
  CHECK(loops == 9);  // absolute points of PG(2,2): 3 per factor
}
