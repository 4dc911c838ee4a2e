#include "ffincidence/generate.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace ffincidence {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
  // Rejection on the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::uint64_t> sample_without_replacement(std::uint64_t population, std::uint64_t n, Rng& rng) {
  if (n > population)
    throw std::invalid_argument("sample size " + std::to_string(n) + " exceeds population " + std::to_string(population));
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto at = [&](std::uint64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<std::uint64_t> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t j = i + rng.below(population - i);
    const std::uint64_t vi = at(i), vj = at(j);
    swapped[j] = vi;
    out.push_back(vj);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<std::uint64_t> iota_ids(std::uint64_t n) {
  std::vector<std::uint64_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::uint64_t{0});
  return ids;
}

// Index in [0, q^4) of a nonvertical pair -> line-pair id.
std::uint64_t nonvertical_pair_id(std::uint32_t q, std::uint64_t index) {
  const std::uint64_t qq = static_cast<std::uint64_t>(q) * q;
  return (index / qq) * line_count(q) + index % qq;
}

std::vector<std::uint64_t> sample_linepair_ids(std::uint32_t q, std::uint64_t n, bool nonvertical_only, Rng& rng) {
  auto ids = sample_without_replacement(linepair_population(q, nonvertical_only), n, rng);
  if (nonvertical_only)
    for (auto& id : ids) id = nonvertical_pair_id(q, id);
  return ids;
}

std::vector<std::uint32_t> draw_multiplicities(std::size_t n, std::uint32_t max_mult, Rng& rng) {
  if (max_mult < 1 || max_mult > kMaxMultiplicity) throw std::invalid_argument("max multiplicity outside [1, 2^16]");
  std::vector<std::uint32_t> mult(n);
  for (auto& m : mult) m = static_cast<std::uint32_t>(1 + rng.below(max_mult));
  return mult;
}

}  // namespace

std::uint64_t linepair_population(std::uint32_t q, bool nonvertical_only) {
  const std::uint64_t per_factor = nonvertical_only ? static_cast<std::uint64_t>(q) * q : line_count(q);
  return per_factor * per_factor;
}

PointSet full_points(const Space& space) { return PointSet(space, iota_ids(space.point_count())); }

LinePairSet full_linepairs(std::uint32_t q) {
  return LinePairSet(Space{q, 2, 2}, iota_ids(linepair_population(q, false)));
}

HyperplanePairSet full_hyperplanepairs(const Space& space) {
  return HyperplanePairSet(space, iota_ids(hyperplanepair_count(space)));
}

PointSet random_points(const Space& space, std::uint64_t n, std::uint64_t seed) {
  Rng rng(seed);
  return PointSet(space, sample_without_replacement(space.point_count(), n, rng));
}

LinePairSet random_linepairs(std::uint32_t q, std::uint64_t n, bool nonvertical_only, std::uint64_t seed) {
  Rng rng(seed);
  return LinePairSet(Space{q, 2, 2}, sample_linepair_ids(q, n, nonvertical_only, rng));
}

HyperplanePairSet random_hyperplanepairs(const Space& space, std::uint64_t n, std::uint64_t seed) {
  Rng rng(seed);
  return HyperplanePairSet(space, sample_without_replacement(hyperplanepair_count(space), n, rng));
}

PointSet multiset_random_points(const Space& space, std::uint64_t n, std::uint32_t max_mult, std::uint64_t seed) {
  Rng rng(seed);
  auto ids = sample_without_replacement(space.point_count(), n, rng);
  auto mult = draw_multiplicities(ids.size(), max_mult, rng);
  return PointSet(space, std::move(ids), std::move(mult));
}

LinePairSet multiset_random_linepairs(std::uint32_t q, std::uint64_t n, std::uint32_t max_mult, bool nonvertical_only,
                                      std::uint64_t seed) {
  Rng rng(seed);
  auto ids = sample_linepair_ids(q, n, nonvertical_only, rng);
  auto mult = draw_multiplicities(ids.size(), max_mult, rng);
  return LinePairSet(Space{q, 2, 2}, std::move(ids), std::move(mult));
}

PointSet random_plane_points(std::uint32_t q, std::uint64_t n, std::uint64_t seed) {
  return random_points(Space{q, 2, 0}, n, seed);
}

PointSet cartesian(const PointSet& a, const PointSet& b) {
  const Space plane{a.space().q, 2, 0};
  if (!(a.space() == plane) || !(b.space() == plane)) throw std::invalid_argument("cartesian: A and B must be sets of F_q^2");
  const Space product{plane.q, 2, 2};
  std::vector<std::uint64_t> ids;
  std::vector<std::uint32_t> mult;
  const bool weighted = a.has_multiplicity() || b.has_multiplicity();
  ids.reserve(a.support_size() * b.support_size());
  for (std::size_t i = 0; i < a.support_size(); ++i) {
    const Coords x = decode_point(plane, a.ids()[i]);
    for (std::size_t j = 0; j < b.support_size(); ++j) {
      const Coords y = decode_point(plane, b.ids()[j]);
      const Elem c[4] = {x[0], y[0], x[1], y[1]};
      ids.push_back(encode_point(product, c));
      if (weighted) mult.push_back(a.multiplicity(i) * b.multiplicity(j));
    }
  }
  return PointSet(product, std::move(ids), std::move(mult));
}

}  // namespace ffincidence
