#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffincidence/geometry.hpp"

namespace ffincidence {

/// Non-negative fraction in lowest terms.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

/// Reduces num/den; throws std::overflow_error if the reduced parts exceed 64 bits.
Rational make_rational(unsigned __int128 num, unsigned __int128 den);

/// One side-by-side comparison of an exact count against a stated bound.
///
/// Two-sided statements report discrepancy = |lhs - main_term| and ratio =
/// discrepancy / bound_term. One-sided statements have main_term = 0, so the
/// ratio is lhs / bound_term. `checked` marks rows that carry a hard
/// assertion (an unconditional inequality or a cross-check); `check_ok` is its
/// outcome. Ratios above 1 on unchecked rows are findings, not failures.
struct BoundReport {
  std::string theorem_id;
  std::uint64_t lhs = 0;
  Rational main_term;
  double bound_term = 0.0;
  double discrepancy = 0.0;
  double ratio = 0.0;
  bool hypothesis_ok = true;
  bool checked = false;
  bool check_ok = true;
  std::string note;
};

/// Raised when two independent counters disagree.
class OracleMismatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Graph data for the exact mixing-lemma form of the incidence bounds.
struct SpectralContext {
  std::uint32_t q = 0;
  int d1 = 2, d2 = 2;
  std::uint64_t n = 0, k = 0;
  double lambda2 = 0.0;
};

SpectralContext spectral_context(const FieldSpec& field, int d1, int d2, double tol = 1e-8, unsigned workers = 0);

/// I(P, L) from the indexed counter, confirmed by the naive one.
std::uint64_t checked_incidences(const FieldSpec& field, const PointSet& p, const LinePairSet& l, unsigned workers = 0);
std::uint64_t checked_incidences(const FieldSpec& field, const PointSet& p, const HyperplanePairSet& h,
                                 unsigned workers = 0);

/// "cs1": I against q^{1/2}|P|^{1/2}|L| + |P|; "cs2": I against |P||L|^{1/2} + |L|.
std::vector<BoundReport> verify_cs(const FieldSpec& field, const PointSet& p, const LinePairSet& l, unsigned workers = 0);

enum class LambdaMode { paper, computed };

/// "vinh": LambdaMode::paper uses the stated constants, comparing with |P||L|/q^2
/// and q^{3/2} sqrt(sum m(p)^2 sum m(l)^2); computed mode compares with (k/n)|P||L| and lambda2 times the same root, and
/// asserts it. `ctx` is required in computed mode.
BoundReport verify_vinh(const FieldSpec& field, const PointSet& p, const LinePairSet& l, LambdaMode mode,
                        const SpectralContext* ctx = nullptr, unsigned workers = 0);

/// "hyperplane": |I - |P||H|/q^2| against q^{(d1+2d2-3)/2} sqrt(|P||H|), reported.
/// With `ctx`, a second row "hyperplane_computed" asserts the exact
/// mixing-lemma form. Requires 2 <= d1 <= d2.
std::vector<BoundReport> verify_hyperplane(const FieldSpec& field, const PointSet& p, const HyperplanePairSet& h,
                                           const SpectralContext* ctx = nullptr, unsigned workers = 0);

/// The point-plane instance whose incidences count the energy of
/// phi(a, l) = (s1 a1 + t1, s2 a2 + t2) over A x L.
struct EnergyReduction {
  PointSet points;             // in F_q^3 x F_q^3
  HyperplanePairSet planes;    // s_i X - a'_i Y - Z = -t_i
  std::uint64_t energy = 0;         // I(points, planes)
  std::uint64_t direct_energy = 0;  // collisions of phi, counted directly
};

/// A is a set of F_q^2 (Space{q, 2, 0}); L must have no vertical component.
/// Multiplicities carry over as m(a) m(l). Throws std::invalid_argument on a
/// vertical component.
EnergyReduction build_energy_reduction(const FieldSpec& field, const PointSet& a, const LinePairSet& l,
                                       unsigned workers = 0);

/// "cartesian": I(A x B, L) against |A||B|^{1/2}|L|/q + q^{3/4} sqrt(|A||B||L|),
/// asserting I <= sqrt(|B| E) and the agreement of both energy counts.
/// "cartesian_small": I against q^{3/4} sqrt(|A||B||L|), hypothesis
/// |A||L| <= q^threshold_exponent.
/// "energy": |E - |A|^2|L|^2/q^2| against q^{3/2}|A||L|, reported.
/// Throws std::invalid_argument for |A| > |B| or a vertical component.
std::vector<BoundReport> verify_cartesian(const FieldSpec& field, const PointSet& a, const PointSet& b,
                                          const LinePairSet& l, double threshold_exponent = 3.5, unsigned workers = 0);

struct SdzParams {
  double c = 1.0;
  double c_prime = 1.0;
};

/// "sdz": I against C n^2 sqrt(m / q) with m = |P|, n = |L|;
/// hypothesis q^3 > n > q / C and n^4 >= C' m q^3.
BoundReport verify_sdz(const FieldSpec& field, const PointSet& p, const LinePairSet& l, SdzParams params = {},
                       unsigned workers = 0);

}  // namespace ffincidence
