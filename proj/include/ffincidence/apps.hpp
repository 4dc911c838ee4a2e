#pragma once

#include <cstdint>
#include <string_view>

#include "ffincidence/geometry.hpp"
#include "ffincidence/theorems.hpp"

namespace ffincidence {

/// `as_written`: x.z = a and y.z = b (t unused). `corrected`: x.z = a and y.t = b.
enum class DotVariant { as_written, corrected };
std::string_view to_string(DotVariant v);

struct DotProductReport {
  Elem a = 0, b = 0;
  DotVariant variant = DotVariant::corrected;
  std::uint64_t count = 0;            // direct enumeration over E x E
  std::uint64_t reduction_count = 0;  // I(E, {(u.X = a, v.Y = b) : (u, v) in E})
  std::uint64_t degenerate = 0;       // elements with u = 0 or v = 0, counted outside the line-pair set
  Rational main_term;                 // |E|^2 / q^2
  double bound = 0.0;                 // |E|^2 / q^2 + q^{3/2} |E|
};

/// Ordered pairs ((x, y), (z, t)) of E x E meeting the chosen predicate, with
/// E a multiset of F_q^2 x F_q^2. The reduction count always realises the
/// corrected predicate; it equals `count` for that variant.
DotProductReport dot_product_pair_count(const FieldSpec& field, const PointSet& e, Elem a, Elem b,
                                        DotVariant variant = DotVariant::corrected, unsigned workers = 0);

struct DotSingleReport {
  std::uint64_t count = 0;
  double bound = 0.0;  // |E|^2 / q + q^{(d-1)/2} |E|
};

/// Pairs (x, y) in E x E with x . y = a, E in F_q^d (Space{q, d, 0}, d in {2, 4}).
/// Throws std::invalid_argument for a = 0.
DotSingleReport dot_product_single(const FieldSpec& field, const PointSet& e, Elem a);

struct Dot4Report {
  std::uint64_t direct = 0;      // x . y = t in F_q^4
  std::uint64_t decomposed = 0;  // sum over a + b = t of the corrected pair counts
  double bound = 0.0;            // |E|^2 / q + q^{1/2} |E|
};

Dot4Report dot_product_4d(const FieldSpec& field, const PointSet& e, Elem t, unsigned workers = 0);

struct SumProductReport {
  std::uint64_t size = 0;          // |A|
  std::uint64_t sumset = 0;        // |A + A|
  std::uint64_t productset = 0;    // |A (x) A|, element-wise
  std::uint64_t min_side = 0, max_side = 0;
  bool hypothesis_ok = false;      // min_side <= q^{7/2} |A|^{-2}
  double conclusion_ratio = 0.0;   // max_side / (q^{-3/8} |A|)
  std::uint64_t incidences = 0;    // I((A+A) x (A (x) A), L) for the |A|^2 line-pairs Y = a_i (X - b_i)
  bool lower_bound_ok = false;     // |A|^3 <= incidences
  double incidence_ratio = 0.0;    // incidences / (q^{3/4} |A| sqrt(|A+A| |A (x) A|))
};

/// A is a nonempty set of F_q^2.
SumProductReport sum_product(const FieldSpec& field, const PointSet& a, unsigned workers = 0);

struct VectorValuedReport {
  std::uint64_t image_size = 0;   // |F(A, B)|, F(x, y) = (x1^2 - x1 y1, x2^2 - x2 y2)
  std::uint64_t energy = 0;       // #{F(a, b) = F(a', b')}
  bool chain_ok = false;          // (|A||B|)^2 <= |F(A, B)| |E|
  std::uint64_t incidences = 0;   // I(B x B, L) over the sign-filtered pairs (a, a')
  std::uint64_t degenerate = 0;   // filtered pairs with a component 0 = 0 (whole plane)
  bool energy_claim_ok = false;   // |E| <= 2 I(B x B, L)
  bool hypothesis_ok = false;     // |A|^2 |B| <= q^{7/2}
  bool signs_collapse = false;    // characteristic 2: +a and -a coincide
  double ratio = 0.0;             // |F(A, B)| / (q^{-3/8} |A||B|)
};

/// A, B nonempty sets of F_q^2.
VectorValuedReport vector_valued(const FieldSpec& field, const PointSet& a, const PointSet& b, unsigned workers = 0);

}  // namespace ffincidence
