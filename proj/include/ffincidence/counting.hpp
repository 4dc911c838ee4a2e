#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ffincidence/geometry.hpp"

namespace ffincidence {

enum class CountMethod { naive, indexed };

std::string_view to_string(CountMethod m);

/// I(P, L), weighted by m(p) m(l) when multiplicities are present.
struct IncidenceReport {
  std::uint64_t count = 0;
  CountMethod method = CountMethod::naive;
  double elapsed = 0.0;  // wall-clock seconds
};

/// `naive` tests every (point, object) pair. `indexed` either walks the
/// objects through each point against an index of L, or the points on each
/// object against an index of P, whichever costs fewer lookups. `workers` = 0
/// means one per hardware thread; the count never depends on it.
IncidenceReport count_incidences(const FieldSpec& field, const PointSet& points, const LinePairSet& lines,
                                 CountMethod method, unsigned workers = 0);
/// Point / hyperplane-pair incidences in F_q^{d1} x F_q^{d2}; the sets must share one Space.
IncidenceReport count_incidences(const FieldSpec& field, const PointSet& points, const HyperplanePairSet& planes,
                                 CountMethod method, unsigned workers = 0);

/// Per-element degrees. per_point[i] = sum of m(l) over line-pairs through
/// support point i; per_line[j] = sum of m(p) over points on line-pair j.
/// The squared sums are weighted by the element's own multiplicity, so that
/// sum m(u)|L_u| = sum m(l)|P_l| = I holds for multisets too.
struct DegreeProfile {
  std::vector<std::uint64_t> per_point;
  std::vector<std::uint64_t> per_line;
  std::uint64_t sum_point = 0;
  std::uint64_t sum_line = 0;
  std::uint64_t sum_sq_point = 0;
  std::uint64_t sum_sq_line = 0;
};

DegreeProfile degree_profile(const FieldSpec& field, const PointSet& points, const LinePairSet& lines,
                             unsigned workers = 0);

/// A map phi on a finite list X, given by its values, and a target set Y.
struct EnergyQuery {
  std::vector<std::uint64_t> images;  // phi(x) for each x in X
  std::vector<std::uint64_t> target;  // Y; duplicates are ignored
};

template <class Domain, class Phi, class Target>
EnergyQuery make_energy_query(const Domain& xs, Phi&& phi, const Target& ys) {
  EnergyQuery q;
  for (const auto& x : xs) q.images.push_back(static_cast<std::uint64_t>(phi(x)));
  for (const auto& y : ys) q.target.push_back(static_cast<std::uint64_t>(y));
  return q;
}

struct EnergyResult {
  std::uint64_t solutions = 0;  // |{(x, y) : phi(x) = y}|
  std::uint64_t energy = 0;     // |{(x, x') : phi(x) = phi(x')}|, diagonal included
  std::uint64_t target_size = 0;
  bool bound_ok = false;        // solutions <= sqrt(|Y| energy), decided in integers
};

EnergyResult phi_solutions(const EnergyQuery& query);

/// sum over values z of (#occurrences of z)^2.
std::uint64_t collision_energy(std::span<const std::uint64_t> images);

}  // namespace ffincidence
