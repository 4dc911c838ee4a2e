#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ffincidence/geometry.hpp"
#include "ffincidence/projective.hpp"

namespace ffincidence {

inline constexpr std::uint64_t kMaxGraphVertices = 100'000;
inline constexpr std::uint64_t kMaxDenseVertices = 5'000;
inline constexpr std::uint64_t kMaxGraphEntries = 400'000'000;

/// G_q^{d1,d2}: vertices are pairs ([x1], [x2]) in PF_q^{d1} x PF_q^{d2},
/// indexed rank([x1]) * n2 + rank([x2]); [x] ~ [y] iff <x1, y1> = <x2, y2> = 0.
/// Self-orthogonal vertices carry a loop, which keeps every degree equal to k.
class IncidenceGraph {
public:
  IncidenceGraph(std::uint32_t q, int d1, int d2, std::uint64_t n1, std::uint64_t n2, std::uint64_t k,
                 std::vector<std::uint64_t> offsets, std::vector<std::uint32_t> neighbors);

  std::uint32_t q() const { return q_; }
  int d1() const { return d1_; }
  int d2() const { return d2_; }
  std::uint64_t n() const { return n1_ * n2_; }
  std::uint64_t n1() const { return n1_; }
  std::uint64_t n2() const { return n2_; }
  /// Nominal common degree ((q^{d1}-1)/(q-1)) ((q^{d2}-1)/(q-1)).
  std::uint64_t k() const { return k_; }

  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  bool adjacent(std::uint32_t u, std::uint32_t v) const;
  std::uint64_t entries() const { return neighbors_.size(); }

  /// Adds the edge {u, v} if absent, removes it if present (both directions).
  /// Only used to inject faults into the verification suite.
  void toggle_edge(std::uint32_t u, std::uint32_t v);

  std::pair<ProjPoint, ProjPoint> vertex(const FieldSpec& field, std::uint32_t v) const;
  std::uint32_t vertex_index(const FieldSpec& field, const ProjPoint& a, const ProjPoint& b) const;

private:
  std::uint32_t q_;
  int d1_, d2_;
  std::uint64_t n1_, n2_, k_;
  std::vector<std::uint64_t> offsets_;
  std::vector<std::uint32_t> neighbors_;
};

/// Throws std::invalid_argument above kMaxGraphVertices vertices.
IncidenceGraph build_graph(const FieldSpec& field, int d1, int d2, unsigned workers = 0);

/// Vertex of an affine point (id in Space{q, d1, d2}) under x -> [x : 1].
std::uint32_t point_vertex(const FieldSpec& field, const IncidenceGraph& g, std::uint64_t point_id);
/// Vertex of a hyperplane-pair (a . X = c) -> [a : -c].
std::uint32_t hyperplanepair_vertex(const FieldSpec& field, const IncidenceGraph& g, std::uint64_t pair_id);
/// Vertex of a line-pair (line-pair ids of F_q^2 x F_q^2).
std::uint32_t linepair_vertex(const FieldSpec& field, const IncidenceGraph& g, std::uint64_t pair_id);

struct CheckResult {
  bool ok = true;
  std::string detail;  // first offending entry when !ok
};

std::uint64_t common_neighbors(const IncidenceGraph& g, std::uint32_t u, std::uint32_t v);
/// Common-neighbour count predicted from which components coincide.
std::uint64_t expected_common_neighbors(std::uint32_t q, int d1, int d2, bool same_first, bool same_second);

CheckResult verify_regularity(const IncidenceGraph& g);
/// Every vertex pair, via rows of A^2.
CheckResult verify_neighbor_formula(const IncidenceGraph& g, unsigned workers = 0);
/// A^2 = J + ((q+1)^2 - 1) I + q E with E a symmetric 0/1, zero-diagonal,
/// 2q(q+1)-regular structure. d1 = d2 = 2 and n <= kMaxDenseVertices.
CheckResult verify_square_decomposition(const IncidenceGraph& g, unsigned workers = 0);

enum class EigenMethod { automatic, dense, power };
std::string_view to_string(EigenMethod m);

struct SpectralReport {
  double lambda2 = 0.0;  // largest |eigenvalue| on the complement of the all-ones vector
  EigenMethod method = EigenMethod::dense;
  double residual = 0.0;
  std::uint64_t iterations = 0;
  double explicit_bound = 0.0;  // row-sum bound on |lambda| for G_q^{d1,d2}
  double order_bound = 0.0;     // q^{(d1 + 2 d2 - 3) / 2}
  bool within_explicit_bound = false;
};

class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

inline constexpr std::uint64_t kMaxPowerIterations = 100'000;

/// Dense symmetric eigensolve of (I - J/n) A (I - J/n) when n <= 5000 (or when
/// asked), otherwise power iteration on A^2 restricted to the complement of
/// the all-ones vector. Throws std::invalid_argument for tol <= 0 and
/// ConvergenceError when the iteration cap is hit.
SpectralReport second_eigenvalue(const IncidenceGraph& g, double tol = 1e-8, EigenMethod method = EigenMethod::automatic,
                                 unsigned workers = 0);

/// sqrt of the row-sum expression bounding lambda^2; equals sqrt(2q^3 + 3q^2 + 2q) for d1 = d2 = 2.
double explicit_lambda_bound(std::uint32_t q, int d1, int d2);
double order_lambda_bound(std::uint32_t q, int d1, int d2);

struct MixingResult {
  std::uint64_t edges = 0;     // ordered adjacent pairs, or <f, A g> for the L2 form
  double main_term = 0.0;
  double discrepancy = 0.0;
  double bound = 0.0;
  bool ok = false;
};

/// e(U, V) against (k/n)|U||V| +- lambda sqrt(|U||V|). Duplicate vertices are ignored.
MixingResult mixing_check(const IncidenceGraph& g, std::span<const std::uint32_t> u, std::span<const std::uint32_t> v,
                          double lambda);
/// <f, A g> against (k/n)(sum f)(sum g) +- lambda |f| |g| with Euclidean norms.
MixingResult mixing_check_l2(const IncidenceGraph& g, std::span<const std::uint64_t> f,
                             std::span<const std::uint64_t> g_fn, double lambda);

/// `# ffincidence-graph v1 q=<q> d1=<d1> d2=<d2>` then one `u v` line per edge with u <= v.
void write_graph(std::ostream& out, const IncidenceGraph& g);

}  // namespace ffincidence
