#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ffincidence/geometry.hpp"

namespace ffincidence {

/// Deterministic stream: std::mt19937_64 with hand-written bounded draws, so
/// output depends only on the seed and never on the standard library vendor.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer over (seed, stream); used to derive independent streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// n distinct values of [0, population), sorted. Partial Fisher-Yates over the
/// virtual identity permutation; throws std::invalid_argument if n > population.
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t population, std::uint64_t n, Rng& rng);

PointSet full_points(const Space& space);
LinePairSet full_linepairs(std::uint32_t q);
HyperplanePairSet full_hyperplanepairs(const Space& space);

PointSet random_points(const Space& space, std::uint64_t n, std::uint64_t seed);
LinePairSet random_linepairs(std::uint32_t q, std::uint64_t n, bool nonvertical_only, std::uint64_t seed);
HyperplanePairSet random_hyperplanepairs(const Space& space, std::uint64_t n, std::uint64_t seed);

/// n distinct support elements, each with multiplicity uniform in [1, max_mult].
PointSet multiset_random_points(const Space& space, std::uint64_t n, std::uint32_t max_mult, std::uint64_t seed);
LinePairSet multiset_random_linepairs(std::uint32_t q, std::uint64_t n, std::uint32_t max_mult, bool nonvertical_only,
                                      std::uint64_t seed);

/// Points of F_q^2 (Space{q, 2, 0}) from a uniform sample.
PointSet random_plane_points(std::uint32_t q, std::uint64_t n, std::uint64_t seed);

/// A x B as point-pairs ((a1, b1), (a2, b2)): A supplies the abscissae of the
/// two components and B the ordinates. A and B are sets of F_q^2.
PointSet cartesian(const PointSet& a, const PointSet& b);

/// Number of line-pairs available to random_linepairs.
std::uint64_t linepair_population(std::uint32_t q, bool nonvertical_only);

}  // namespace ffincidence
