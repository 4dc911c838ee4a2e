#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "ffincidence/gf.hpp"

namespace ffincidence {

/// Point of PF_q^d in canonical form: homogeneous coordinates of length d+1
/// whose first nonzero entry is 1.
struct ProjPoint {
  std::vector<Elem> coords;

  int dim() const { return static_cast<int>(coords.size()) - 1; }
  auto operator<=>(const ProjPoint&) const = default;
};

inline constexpr std::uint64_t kMaxProjPoints = 10'000'000;

/// Unique scalar multiple of v whose first nonzero coordinate is 1.
/// Throws std::invalid_argument for the zero vector.
ProjPoint canonicalize(const FieldSpec& field, std::span<const Elem> v);

/// True iff sum_i x_i y_i = 0. Throws std::invalid_argument on dimension mismatch.
bool orthogonal(const FieldSpec& field, const ProjPoint& x, const ProjPoint& y);

/// (q^{d+1} - 1) / (q - 1).
std::uint64_t proj_point_count(std::uint64_t q, int d);

/// All canonical points of PF_q^d, lexicographic on coordinates.
std::vector<ProjPoint> enumerate_proj_points(const FieldSpec& field, int d);

/// Position of a canonical point in enumerate_proj_points order, and its inverse.
std::uint64_t proj_rank(const FieldSpec& field, const ProjPoint& x);
ProjPoint proj_unrank(const FieldSpec& field, int d, std::uint64_t rank);

/// (x_1, ..., x_d) -> [x_1 : ... : x_d : 1].
ProjPoint embed_affine(const FieldSpec& field, std::span<const Elem> point);

/// Hyperplane sum a_i X_i = c -> [a_1 : ... : a_d : -c]. An affine point lies
/// on the hyperplane iff the two embeddings are orthogonal.
/// Throws std::invalid_argument for an all-zero normal.
ProjPoint embed_hyperplane(const FieldSpec& field, std::span<const Elem> normal, Elem offset);

}  // namespace ffincidence
