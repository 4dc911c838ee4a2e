#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ffincidence/gf.hpp"

namespace ffincidence {

/// The product space F_q^{d1} x F_q^{d2}. d2 == 0 denotes the single factor
/// F_q^{d1}; points of F_q^4 and of F_q^2 x F_q^2 share one encoding.
struct Space {
  std::uint32_t q = 0;
  int d1 = 2;
  int d2 = 2;

  int dim() const { return d1 + d2; }
  std::uint64_t point_count() const;
  bool operator==(const Space&) const = default;
};

inline constexpr int kMaxFactorDim = 4;
inline constexpr std::uint32_t kMaxMultiplicity = 1u << 16;

/// Coordinates of a point of a Space, first factor first.
using Coords = std::array<Elem, 2 * kMaxFactorDim>;

/// Point ids are the coordinates read as a base-q number, first coordinate most significant.
std::uint64_t encode_point(const Space& space, std::span<const Elem> coords);
Coords decode_point(const Space& space, std::uint64_t id);

/// A line of F_q^2: Y = sX + t, or X = x0 when vertical (stored in `t`, with s = 0).
struct Line {
  bool vertical = false;
  Elem s = 0;
  Elem t = 0;

  static Line sloped(Elem slope, Elem intercept) { return {false, slope, intercept}; }
  static Line upright(Elem x0) { return {true, 0, x0}; }
  auto operator<=>(const Line&) const = default;
};

/// Ids: s*q + t for Y = sX + t, q^2 + x0 for X = x0.
std::uint64_t line_count(std::uint32_t q);
std::uint64_t line_id(std::uint32_t q, const Line& line);
Line line_from_id(std::uint32_t q, std::uint64_t id);
bool on_line(const FieldSpec& field, const Line& line, Elem x, Elem y);

/// All q^2 + q lines: sloped lines by (s, t), then vertical lines by x0. Requires q <= 2^10.
std::vector<Line> enumerate_lines(const FieldSpec& field);
/// The q + 1 lines through (x, y): sloped by increasing s, then the vertical one.
std::vector<Line> lines_through(const FieldSpec& field, Elem x, Elem y);

struct LinePair {
  Line first;
  Line second;

  bool nonvertical() const { return !first.vertical && !second.vertical; }
  auto operator<=>(const LinePair&) const = default;
};

std::uint64_t linepair_id(std::uint32_t q, const LinePair& pair);
LinePair linepair_from_id(std::uint32_t q, std::uint64_t id);

/// Point-pair of F_q^2 x F_q^2.
struct PointPair {
  std::array<Elem, 2> first{};
  std::array<Elem, 2> second{};
  auto operator<=>(const PointPair&) const = default;
};

std::uint64_t pointpair_id(std::uint32_t q, const PointPair& x);
PointPair pointpair_from_id(std::uint32_t q, std::uint64_t id);

bool incident(const FieldSpec& field, const PointPair& x, const LinePair& line);

/// Hyperplane a . X = c of F_q^d with canonical normal (first nonzero entry 1).
struct Hyperplane {
  std::vector<Elem> normal;
  Elem offset = 0;
  auto operator<=>(const Hyperplane&) const = default;
};

/// Scales (normal, offset) to canonical form; throws std::invalid_argument for a zero normal.
Hyperplane make_hyperplane(const FieldSpec& field, std::span<const Elem> normal, Elem offset);
/// The same line written as a hyperplane of F_q^2.
Hyperplane as_hyperplane(const FieldSpec& field, const Line& line);
bool on_hyperplane(const FieldSpec& field, const Hyperplane& h, std::span<const Elem> x);

/// q (q^d - 1) / (q - 1) hyperplanes in F_q^d; id = rank(normal) * q + offset.
std::uint64_t hyperplane_count(std::uint32_t q, int d);
std::uint64_t hyperplane_id(const FieldSpec& field, const Hyperplane& h);
Hyperplane hyperplane_from_id(const FieldSpec& field, int d, std::uint64_t id);

struct HyperplanePair {
  Hyperplane first;
  Hyperplane second;
  auto operator<=>(const HyperplanePair&) const = default;
};

std::uint64_t hyperplanepair_id(const FieldSpec& field, const HyperplanePair& h);
HyperplanePair hyperplanepair_from_id(const FieldSpec& field, int d1, int d2, std::uint64_t id);
/// x given as d1 + d2 coordinates.
bool incident(const FieldSpec& field, std::span<const Elem> x, const HyperplanePair& h);

/// Finite multiset of encoded objects over one Space. The support is kept
/// sorted and unique; an empty multiplicity vector means every element has
/// multiplicity 1. size() is the total multiplicity.
template <class Tag>
class IdMultiset {
public:
  IdMultiset() = default;
  /// Duplicate ids are merged by adding multiplicities; `mult` may be empty.
  IdMultiset(Space space, std::vector<std::uint64_t> ids, std::vector<std::uint32_t> mult = {});

  const Space& space() const { return space_; }
  std::span<const std::uint64_t> ids() const { return ids_; }
  std::size_t support_size() const { return ids_.size(); }
  bool has_multiplicity() const { return !mult_.empty(); }
  std::uint32_t multiplicity(std::size_t i) const { return mult_.empty() ? 1 : mult_[i]; }
  std::span<const std::uint32_t> multiplicities() const { return mult_; }
  bool empty() const { return ids_.empty(); }

  std::uint64_t size() const;
  /// sum over the support of m(x)^2.
  std::uint64_t sum_sq_multiplicity() const;
  bool contains(std::uint64_t id) const;

  bool operator==(const IdMultiset&) const = default;

private:
  Space space_{};
  std::vector<std::uint64_t> ids_;
  std::vector<std::uint32_t> mult_;
};

struct PointTag {};
struct LinePairTag {};
struct HyperplanePairTag {};

using PointSet = IdMultiset<PointTag>;
using LinePairSet = IdMultiset<LinePairTag>;
using HyperplanePairSet = IdMultiset<HyperplanePairTag>;

extern template class IdMultiset<PointTag>;
extern template class IdMultiset<LinePairTag>;
extern template class IdMultiset<HyperplanePairTag>;

/// Number of distinct hyperplane-pairs of a Space (line-pairs when d1 = d2 = 2).
std::uint64_t hyperplanepair_count(const Space& space);

/// Line-pairs rewritten as hyperplane-pairs of F_q^2 x F_q^2, multiplicities kept.
HyperplanePairSet to_hyperplane_pairs(const FieldSpec& field, const LinePairSet& lines);

bool all_nonvertical(const LinePairSet& lines);

}  // namespace ffincidence
