#include "ffincidence/apps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ffincidence/counting.hpp"
#include "ffincidence/generate.hpp"
#include "ffincidence/parallel.hpp"

namespace ffincidence {

namespace {

using u128 = unsigned __int128;

struct Weighted {
  Coords c;
  std::uint64_t w;
};

std::vector<Weighted> decode_all(const PointSet& s) {
  std::vector<Weighted> out;
  out.reserve(s.support_size());
  for (std::size_t i = 0; i < s.support_size(); ++i) out.push_back({decode_point(s.space(), s.ids()[i]), s.multiplicity(i)});
  return out;
}

Elem dot2(const FieldSpec& f, Elem x0, Elem x1, Elem y0, Elem y1) { return f.add(f.mul(x0, y0), f.mul(x1, y1)); }

void require_space(const PointSet& s, const Space& want, const char* what) {
  if (!(s.space() == want)) throw std::invalid_argument(std::string(what) + " lives in the wrong space");
}

void require_plain_set(const PointSet& s, const char* what) {
  require_space(s, Space{s.space().q, 2, 0}, what);
  if (s.has_multiplicity()) throw std::invalid_argument(std::string(what) + " must be a set, not a multiset");
  if (s.empty()) throw std::invalid_argument(std::string(what) + " must be nonempty");
}

// The line u . X = c of F_q^2 for u != 0.
Line line_of(const FieldSpec& f, Elem u0, Elem u1, Elem c) {
  if (u1 != 0) return Line::sloped(f.neg(f.div(u0, u1)), f.div(c, u1));
  return Line::upright(f.div(c, u0));
}

// I(E, {(u . X = a, v . Y = b)}) for E in F_q^2 x F_q^2; elements with u = 0
// or v = 0 describe no line and are matched against E directly.
std::uint64_t reduction_pair_count(const FieldSpec& f, const PointSet& e, const std::vector<Weighted>& elems, Elem a,
                                   Elem b, std::uint64_t& degenerate, unsigned workers) {
  const std::uint32_t q = f.q();
  std::vector<std::uint64_t> ids;
  std::vector<std::uint32_t> mult;
  std::uint64_t extra = 0;
  degenerate = 0;
  for (const auto& [c, w] : elems) {
    const bool u_zero = c[0] == 0 && c[1] == 0, v_zero = c[2] == 0 && c[3] == 0;
    if (!u_zero && !v_zero) {
      ids.push_back(linepair_id(q, {line_of(f, c[0], c[1], a), line_of(f, c[2], c[3], b)}));
      mult.push_back(static_cast<std::uint32_t>(w));
      continue;
    }
    ++degenerate;
    for (const auto& [x, wx] : elems)
      if (dot2(f, c[0], c[1], x[0], x[1]) == a && dot2(f, c[2], c[3], x[2], x[3]) == b) extra += w * wx;
  }
  const LinePairSet lines(e.space(), std::move(ids), std::move(mult));
  return count_incidences(f, e, lines, CountMethod::indexed, workers).count + extra;
}

}  // namespace

std::string_view to_string(DotVariant v) { return v == DotVariant::as_written ? "as_written" : "corrected"; }

DotProductReport dot_product_pair_count(const FieldSpec& field, const PointSet& e, Elem a, Elem b, DotVariant variant,
                                        unsigned workers) {
  const std::uint32_t q = field.q();
  require_space(e, Space{q, 2, 2}, "E");
  if (a >= q || b >= q) throw std::invalid_argument("dot-product targets must be field elements");
  const auto elems = decode_all(e);

  DotProductReport r;
  r.a = a;
  r.b = b;
  r.variant = variant;
  r.count = parallel_sum(elems.size(), workers, [&](std::size_t begin, std::size_t end) {
    std::uint64_t s = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& x = elems[i].c;
      for (const auto& [z, wz] : elems) {
        const bool first = dot2(field, x[0], x[1], z[0], z[1]) == a;
        const bool second = variant == DotVariant::as_written ? dot2(field, x[2], x[3], z[0], z[1]) == b
                                                              : dot2(field, x[2], x[3], z[2], z[3]) == b;
        if (first && second) s += elems[i].w * wz;
      }
    }
    return s;
  });
  r.reduction_count = reduction_pair_count(field, e, elems, a, b, r.degenerate, workers);
  const double n = static_cast<double>(e.size());
  r.main_term = make_rational(static_cast<u128>(e.size()) * e.size(), static_cast<u128>(q) * q);
  r.bound = r.main_term.value() + std::pow(static_cast<double>(q), 1.5) * n;
  return r;
}

DotSingleReport dot_product_single(const FieldSpec& field, const PointSet& e, Elem a) {
  const int d = e.space().d1;
  if (e.space().d2 != 0 || (d != 2 && d != 4)) throw std::invalid_argument("E must be a set of F_q^2 or F_q^4");
  if (a == 0) throw std::invalid_argument("the single dot-product bound is stated for a != 0");
  const auto elems = decode_all(e);
  DotSingleReport r;
  for (const auto& [x, wx] : elems)
    for (const auto& [y, wy] : elems)
      if (field.dot(std::span<const Elem>(x.data(), d), std::span<const Elem>(y.data(), d)) == a) r.count += wx * wy;
  const double n = static_cast<double>(e.size()), q = field.q();
  r.bound = n * n / q + std::pow(q, (d - 1) / 2.0) * n;
  return r;
}

Dot4Report dot_product_4d(const FieldSpec& field, const PointSet& e, Elem t, unsigned workers) {
  const std::uint32_t q = field.q();
  require_space(e, Space{q, 4, 0}, "E");
  const auto elems = decode_all(e);
  Dot4Report r;
  for (const auto& [x, wx] : elems)
    for (const auto& [y, wy] : elems)
      if (field.dot(std::span<const Elem>(x.data(), 4), std::span<const Elem>(y.data(), 4)) == t) r.direct += wx * wy;

  // F_q^4 and F_q^2 x F_q^2 share point ids.
  std::vector<std::uint32_t> mult(e.multiplicities().begin(), e.multiplicities().end());
  const PointSet pairs(Space{q, 2, 2}, std::vector<std::uint64_t>(e.ids().begin(), e.ids().end()), std::move(mult));
  for (Elem a = 0; a < q; ++a) {
    std::uint64_t degenerate = 0;
    r.decomposed += reduction_pair_count(field, pairs, elems, a, field.sub(t, a), degenerate, workers);
  }
  const double n = static_cast<double>(e.size());
  r.bound = n * n / q + std::sqrt(static_cast<double>(q)) * n;
  return r;
}

SumProductReport sum_product(const FieldSpec& field, const PointSet& a, unsigned workers) {
  require_plain_set(a, "A");
  const std::uint32_t q = field.q();
  const Space plane{q, 2, 0};
  const auto pts = decode_all(a);

  std::vector<std::uint64_t> sums, products;
  for (const auto& [x, wx] : pts)
    for (const auto& [y, wy] : pts) {
      const Elem s[2] = {field.add(x[0], y[0]), field.add(x[1], y[1])};
      const Elem p[2] = {field.mul(x[0], y[0]), field.mul(x[1], y[1])};
      sums.push_back(encode_point(plane, s));
      products.push_back(encode_point(plane, p));
    }
  // Plain sets: merging duplicates would otherwise weight each element by its representation count.
  for (auto* v : {&sums, &products}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  const PointSet sumset(plane, std::move(sums)), productset(plane, std::move(products));

  SumProductReport r;
  r.size = a.size();
  r.sumset = sumset.support_size();
  r.productset = productset.support_size();
  r.min_side = std::min(r.sumset, r.productset);
  r.max_side = std::max(r.sumset, r.productset);
  const double na = static_cast<double>(r.size), qd = q;
  r.hypothesis_ok = static_cast<double>(r.min_side) <= std::pow(qd, 3.5) / (na * na);
  r.conclusion_ratio = static_cast<double>(r.max_side) / (std::pow(qd, -0.375) * na);

  // Slopes from one element of A, shifts from another: the line-pair
  // (Y = s1 (X - h1), Y = s2 (X - h2)) meets (A + A) x (A (x) A) at
  // (g + h, s (x) g) for every g in A.
  std::vector<std::uint64_t> ids;
  for (const auto& [s, ws] : pts)
    for (const auto& [h, wh] : pts)
      ids.push_back(linepair_id(q, {Line::sloped(s[0], field.neg(field.mul(s[0], h[0]))),
                                    Line::sloped(s[1], field.neg(field.mul(s[1], h[1])))}));
  std::vector<std::uint32_t> ones(ids.size(), 1);
  const LinePairSet lines(Space{q, 2, 2}, std::move(ids), std::move(ones));
  r.incidences = count_incidences(field, cartesian(sumset, productset), lines, CountMethod::indexed, workers).count;
  r.lower_bound_ok = static_cast<u128>(r.size) * r.size * r.size <= r.incidences;
  r.incidence_ratio = static_cast<double>(r.incidences) /
                      (std::pow(qd, 0.75) * na * std::sqrt(static_cast<double>(r.sumset) * static_cast<double>(r.productset)));
  return r;
}

VectorValuedReport vector_valued(const FieldSpec& field, const PointSet& a, const PointSet& b, unsigned workers) {
  require_plain_set(a, "A");
  require_plain_set(b, "B");
  const std::uint32_t q = field.q();
  const Space plane{q, 2, 0};
  const auto as = decode_all(a), bs = decode_all(b);

  auto f_at = [&](const Coords& x, const Coords& y) {
    const Elem v[2] = {field.sub(field.mul(x[0], x[0]), field.mul(x[0], y[0])),
                       field.sub(field.mul(x[1], x[1]), field.mul(x[1], y[1]))};
    return encode_point(plane, v);
  };
  std::vector<std::uint64_t> images;
  for (const auto& x : as)
    for (const auto& y : bs) images.push_back(f_at(x.c, y.c));

  VectorValuedReport r;
  r.energy = collision_energy(images);
  std::sort(images.begin(), images.end());
  r.image_size = static_cast<std::uint64_t>(std::unique(images.begin(), images.end()) - images.begin());
  const u128 ab = static_cast<u128>(a.size()) * b.size();
  r.chain_ok = ab * ab <= static_cast<u128>(r.image_size) * r.energy;

  // (b, b') lies on l_{a,a'} iff a_i^2 - a_i b_i = a'_i^2 - a'_i b'_i for i = 1, 2.
  const PointSet grid = cartesian(b, b);
  const auto grid_pts = decode_all(grid);
  auto component = [&](Elem x, Elem xp, bool& whole) {
    whole = x == 0 && xp == 0;
    if (xp != 0) return Line::sloped(field.div(x, xp), field.div(field.sub(field.mul(xp, xp), field.mul(x, x)), xp));
    return Line::upright(x);
  };
  std::vector<std::uint64_t> ids;
  std::uint64_t extra = 0;
  for (const auto& [x, wx] : as)
    for (const auto& [y, wy] : as) {
      const bool keep = (x[0] != y[0] && x[0] != field.neg(y[0])) || (x[1] != y[1] && x[1] != field.neg(y[1]));
      if (!keep) continue;
      bool whole1 = false, whole2 = false;
      const Line l1 = component(x[0], y[0], whole1), l2 = component(x[1], y[1], whole2);
      if (!whole1 && !whole2) {
        ids.push_back(linepair_id(q, {l1, l2}));
        continue;
      }
      ++r.degenerate;
      for (const auto& [p, wp] : grid_pts) {
        // p = ((b1, b'1), (b2, b'2)).
        const bool on1 = field.sub(field.mul(x[0], x[0]), field.mul(x[0], p[0])) ==
                         field.sub(field.mul(y[0], y[0]), field.mul(y[0], p[1]));
        const bool on2 = field.sub(field.mul(x[1], x[1]), field.mul(x[1], p[2])) ==
                         field.sub(field.mul(y[1], y[1]), field.mul(y[1], p[3]));
        extra += on1 && on2;
      }
    }
  std::vector<std::uint32_t> ones(ids.size(), 1);
  const LinePairSet lines(Space{q, 2, 2}, std::move(ids), std::move(ones));
  r.incidences = count_incidences(field, grid, lines, CountMethod::indexed, workers).count + extra;
  r.energy_claim_ok = r.energy <= 2 * r.incidences;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size()), qd = q;
  r.hypothesis_ok = na * na * nb <= std::pow(qd, 3.5);
  r.signs_collapse = field.p() == 2;
  r.ratio = static_cast<double>(r.image_size) / (std::pow(qd, -0.375) * na * nb);
  return r;
}

}  // namespace ffincidence
