#include "ffincidence/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ffincidence/generate.hpp"
#include "ffincidence/parallel.hpp"

namespace ffincidence {

namespace {

std::uint64_t gaussian_count(std::uint64_t q, int m) {  // (q^m - 1) / (q - 1)
  std::uint64_t s = 0, p = 1;
  for (int i = 0; i < m; ++i, p *= q) s += p;
  return s;
}

// Orthogonality lists of PF_q^d, each sorted by rank; absolute points list themselves.
std::vector<std::vector<std::uint32_t>> polarity_lists(const FieldSpec& field, int d, unsigned workers) {
  const auto pts = enumerate_proj_points(field, d);
  std::vector<std::vector<std::uint32_t>> out(pts.size());
  parallel_chunks(pts.size(), workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (field.dot(pts[i].coords, pts[j].coords) == 0) out[i].push_back(static_cast<std::uint32_t>(j));
  });
  return out;
}

void check_vertex(const IncidenceGraph& g, std::uint64_t v) {
  if (v >= g.n()) throw std::out_of_range("vertex " + std::to_string(v) + " outside [0, " + std::to_string(g.n()) + ")");
}

// Calls row(u, counts) with counts[w] = (A^2)_{uw}; returns the first failing
// message over all rows (smallest u), independent of the worker count.
template <class Row>
CheckResult scan_square_rows(const IncidenceGraph& g, unsigned workers, Row&& row) {
  const std::size_t n = g.n();
  if (workers == 0) workers = default_workers();
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
  std::vector<CheckResult> found(chunks);
  parallel_chunks(chunks, workers, [&](std::size_t cb, std::size_t ce) {
    std::vector<std::uint64_t> counts(n);
    for (std::size_t c = cb; c < ce; ++c) {
      for (std::size_t u = n * c / chunks; u < n * (c + 1) / chunks; ++u) {
        std::fill(counts.begin(), counts.end(), 0);
        for (auto w : g.neighbors(static_cast<std::uint32_t>(u)))
          for (auto x : g.neighbors(w)) ++counts[x];
        std::string msg = row(static_cast<std::uint32_t>(u), counts);
        if (!msg.empty()) {
          found[c] = {false, std::move(msg)};
          break;
        }
      }
    }
  });
  for (auto& r : found)
    if (!r.ok) return r;
  return {};
}

double norm(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

void center(std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (auto& x : v) x -= mean;
}

void multiply(const IncidenceGraph& g, const std::vector<double>& x, std::vector<double>& y, unsigned workers) {
  parallel_chunks(g.n(), workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t u = b; u < e; ++u) {
      double s = 0.0;
      for (auto w : g.neighbors(static_cast<std::uint32_t>(u))) s += x[w];
      y[u] = s;
    }
  });
}

SpectralReport dense_eigen(const IncidenceGraph& g) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.n());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u)
    for (auto w : g.neighbors(static_cast<std::uint32_t>(u))) a(u, w) = 1.0;
  // (I - J/n) A (I - J/n): the all-ones direction is sent to 0.
  const Eigen::VectorXd rows = a.rowwise().sum() / static_cast<double>(n);
  const Eigen::RowVectorXd cols = a.colwise().sum() / static_cast<double>(n);
  const double total = a.sum() / static_cast<double>(n) / static_cast<double>(n);
  a.colwise() -= rows;
  a.rowwise() -= cols;
  a.array() += total;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0.0);
  const auto& values = solver.eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < n; ++i)
    if (std::abs(values[i]) > std::abs(values[best])) best = i;
  const Eigen::VectorXd v = solver.eigenvectors().col(best);

  SpectralReport r;
  r.method = EigenMethod::dense;
  r.lambda2 = std::abs(values[best]);
  r.residual = (a * v - values[best] * v).norm();
  return r;
}

SpectralReport power_eigen(const IncidenceGraph& g, double tol, unsigned workers) {
  const std::size_t n = g.n();
  std::vector<double> v(n), t(n), w(n);
  Rng rng(0x5eed);
  for (auto& x : v) x = static_cast<double>(rng.below(1u << 20)) / (1u << 20) - 0.5;
  center(v);
  double nv = norm(v);
  for (auto& x : v) x /= nv;

  SpectralReport r;
  r.method = EigenMethod::power;
  double residual = 0.0;
  for (std::uint64_t it = 1; it <= kMaxPowerIterations; ++it) {
    multiply(g, v, t, workers);
    multiply(g, t, w, workers);
    center(w);  // deflate the all-ones vector
    const double mu = std::inner_product(v.begin(), v.end(), w.begin(), 0.0);
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += (w[i] - mu * v[i]) * (w[i] - mu * v[i]);
    residual = std::sqrt(residual);
    const double nw = norm(w);
    if (residual <= tol || nw == 0.0) {
      r.lambda2 = std::sqrt(std::max(mu, 0.0));
      r.residual = residual;
      r.iterations = it;
      return r;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
  }
  throw ConvergenceError("power iteration hit the cap of " + std::to_string(kMaxPowerIterations) +
                             " iterations (residual " + std::to_string(residual) + ")",
                         residual);
}

}  // namespace

IncidenceGraph::IncidenceGraph(std::uint32_t q, int d1, int d2, std::uint64_t n1, std::uint64_t n2, std::uint64_t k,
                               std::vector<std::uint64_t> offsets, std::vector<std::uint32_t> neighbors)
    : q_(q), d1_(d1), d2_(d2), n1_(n1), n2_(n2), k_(k), offsets_(std::move(offsets)), neighbors_(std::move(neighbors)) {}

bool IncidenceGraph::adjacent(std::uint32_t u, std::uint32_t v) const {
  check_vertex(*this, u);
  check_vertex(*this, v);
  const auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

void IncidenceGraph::toggle_edge(std::uint32_t u, std::uint32_t v) {
  check_vertex(*this, u);
  check_vertex(*this, v);
  const bool present = adjacent(u, v);
  auto flip = [&](std::uint32_t a, std::uint32_t b) {
    auto first = neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[a]);
    auto last = neighbors_.begin() + static_cast<std::ptrdiff_t>(offsets_[a + 1]);
    auto pos = std::lower_bound(first, last, b);
    if (present)
      neighbors_.erase(pos);
    else
      neighbors_.insert(pos, b);
    for (std::size_t i = a + 1; i < offsets_.size(); ++i) offsets_[i] = present ? offsets_[i] - 1 : offsets_[i] + 1;
  };
  flip(u, v);
  if (u != v) flip(v, u);
}

std::pair<ProjPoint, ProjPoint> IncidenceGraph::vertex(const FieldSpec& field, std::uint32_t v) const {
  check_vertex(*this, v);
  return {proj_unrank(field, d1_, v / n2_), proj_unrank(field, d2_, v % n2_)};
}

std::uint32_t IncidenceGraph::vertex_index(const FieldSpec& field, const ProjPoint& a, const ProjPoint& b) const {
  if (a.dim() != d1_ || b.dim() != d2_) throw std::invalid_argument("vertex_index: dimension mismatch");
  return static_cast<std::uint32_t>(proj_rank(field, a) * n2_ + proj_rank(field, b));
}

IncidenceGraph build_graph(const FieldSpec& field, int d1, int d2, unsigned workers) {
  if (d1 < 1 || d2 < 1 || d1 > kMaxFactorDim || d2 > kMaxFactorDim)
    throw std::invalid_argument("graph dimensions must lie in [1, " + std::to_string(kMaxFactorDim) + "]");
  const std::uint64_t q = field.q();
  const std::uint64_t n1 = proj_point_count(q, d1), n2 = proj_point_count(q, d2);
  const std::uint64_t k = gaussian_count(q, d1) * gaussian_count(q, d2);
  if (n1 * n2 > kMaxGraphVertices || n1 * n2 * k > kMaxGraphEntries)
    throw std::invalid_argument("graph with " + std::to_string(n1 * n2) + " vertices exceeds the cap of " +
                                std::to_string(kMaxGraphVertices));
  const auto nb1 = polarity_lists(field, d1, workers);
  const auto nb2 = polarity_lists(field, d2, workers);

  std::vector<std::uint64_t> offsets(n1 * n2 + 1, 0);
  for (std::uint64_t a = 0; a < n1; ++a)
    for (std::uint64_t b = 0; b < n2; ++b) offsets[a * n2 + b + 1] = nb1[a].size() * nb2[b].size();
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::uint32_t> neighbors(offsets.back());
  parallel_chunks(n1, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a)
      for (std::uint64_t b = 0; b < n2; ++b) {
        auto out = neighbors.begin() + static_cast<std::ptrdiff_t>(offsets[a * n2 + b]);
        for (auto x : nb1[a])
          for (auto y : nb2[b]) *out++ = static_cast<std::uint32_t>(x * n2 + y);
      }
  });
  return IncidenceGraph(field.q(), d1, d2, n1, n2, k, std::move(offsets), std::move(neighbors));
}

std::uint32_t point_vertex(const FieldSpec& field, const IncidenceGraph& g, std::uint64_t point_id) {
  const Space space{g.q(), g.d1(), g.d2()};
  const Coords c = decode_point(space, point_id);
  const std::span<const Elem> all(c.data(), static_cast<std::size_t>(space.dim()));
  return g.vertex_index(field, embed_affine(field, all.first(g.d1())), embed_affine(field, all.subspan(g.d1())));
}

std::uint32_t hyperplanepair_vertex(const FieldSpec& field, const IncidenceGraph& g, std::uint64_t pair_id) {
  const auto h = hyperplanepair_from_id(field, g.d1(), g.d2(), pair_id);
  return g.vertex_index(field, embed_hyperplane(field, h.first.normal, h.first.offset),
                        embed_hyperplane(field, h.second.normal, h.second.offset));
}

std::uint32_t linepair_vertex(const FieldSpec& field, const IncidenceGraph& g, std::uint64_t pair_id) {
  if (g.d1() != 2 || g.d2() != 2) throw std::invalid_argument("line-pairs need the graph with d1 = d2 = 2");
  const auto lp = linepair_from_id(g.q(), pair_id);
  const auto h1 = as_hyperplane(field, lp.first), h2 = as_hyperplane(field, lp.second);
  return g.vertex_index(field, embed_hyperplane(field, h1.normal, h1.offset), embed_hyperplane(field, h2.normal, h2.offset));
}

std::uint64_t common_neighbors(const IncidenceGraph& g, std::uint32_t u, std::uint32_t v) {
  check_vertex(g, u);
  check_vertex(g, v);
  const auto a = g.neighbors(u), b = g.neighbors(v);
  std::uint64_t count = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count, ++i, ++j;
    }
  }
  return count;
}

std::uint64_t expected_common_neighbors(std::uint32_t q, int d1, int d2, bool same_first, bool same_second) {
  return gaussian_count(q, same_first ? d1 : d1 - 1) * gaussian_count(q, same_second ? d2 : d2 - 1);
}

CheckResult verify_regularity(const IncidenceGraph& g) {
  for (std::uint32_t u = 0; u < g.n(); ++u) {
    const auto deg = g.neighbors(u).size();
    if (deg != g.k())
      return {false, "vertex " + std::to_string(u) + " has degree " + std::to_string(deg) + ", expected " +
                         std::to_string(g.k())};
    for (auto w : g.neighbors(u))
      if (!g.adjacent(w, u))
        return {false, "edge " + std::to_string(u) + "-" + std::to_string(w) + " is not symmetric"};
  }
  return {};
}

CheckResult verify_neighbor_formula(const IncidenceGraph& g, unsigned workers) {
  const std::uint64_t n2 = g.n2();
  return scan_square_rows(g, workers, [&](std::uint32_t u, const std::vector<std::uint64_t>& counts) -> std::string {
    for (std::uint32_t v = 0; v < g.n(); ++v) {
      const auto want = expected_common_neighbors(g.q(), g.d1(), g.d2(), u / n2 == v / n2, u % n2 == v % n2);
      if (counts[v] != want) {
        std::ostringstream os;
        os << "N(" << u << ", " << v << ") = " << counts[v] << ", expected " << want;
        return os.str();
      }
    }
    return {};
  });
}

CheckResult verify_square_decomposition(const IncidenceGraph& g, unsigned workers) {
  if (g.d1() != 2 || g.d2() != 2) throw std::invalid_argument("square decomposition is stated for d1 = d2 = 2");
  if (g.n() > kMaxDenseVertices) throw std::invalid_argument("square decomposition needs n <= 5000");
  const std::uint64_t q = g.q(), n = g.n();
  const std::uint64_t diag = (q + 1) * (q + 1) - 1, degree = 2 * q * (q + 1);
  std::vector<std::uint8_t> e(n * n, 0);
  auto result = scan_square_rows(g, workers, [&](std::uint32_t u, const std::vector<std::uint64_t>& counts) -> std::string {
    std::uint64_t row_sum = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
      // E_uv = (A^2_uv - 1 - diag [u = v]) / q must be an integer in {0, 1}.
      const std::int64_t rest = static_cast<std::int64_t>(counts[v]) - 1 - (u == v ? static_cast<std::int64_t>(diag) : 0);
      if (rest < 0 || rest % static_cast<std::int64_t>(q) != 0 || rest / static_cast<std::int64_t>(q) > 1) {
        std::ostringstream os;
        os << "(A^2)[" << u << "][" << v << "] = " << counts[v] << " leaves E entry " << rest << "/" << q;
        return os.str();
      }
      const auto entry = static_cast<std::uint8_t>(rest / static_cast<std::int64_t>(q));
      if (u == v && entry != 0) return "E has a nonzero diagonal at " + std::to_string(u);
      e[u * n + v] = entry;
      row_sum += entry;
    }
    if (row_sum != degree) return "E row " + std::to_string(u) + " sums to " + std::to_string(row_sum);
    return {};
  });
  if (!result.ok) return result;
  for (std::uint64_t u = 0; u < n; ++u)
    for (std::uint64_t v = u + 1; v < n; ++v)
      if (e[u * n + v] != e[v * n + u])
        return {false, "E is not symmetric at (" + std::to_string(u) + ", " + std::to_string(v) + ")"};
  return {};
}

std::string_view to_string(EigenMethod m) {
  switch (m) {
    case EigenMethod::automatic: return "automatic";
    case EigenMethod::dense: return "dense";
    case EigenMethod::power: return "power";
  }
  return "?";
}

double explicit_lambda_bound(std::uint32_t q, int d1, int d2) {
  const double k = static_cast<double>(gaussian_count(q, d1) * gaussian_count(q, d2));
  const double both = static_cast<double>(gaussian_count(q, d1 - 1) * gaussian_count(q, d2 - 1));
  const double first = std::pow(q, d2 - 1) * static_cast<double>(gaussian_count(q, d1 - 1)) *
                       static_cast<double>(gaussian_count(q, d2 + 1) - 1);
  const double second = std::pow(q, d1 - 1) * static_cast<double>(gaussian_count(q, d2 - 1)) *
                        static_cast<double>(gaussian_count(q, d1 + 1) - 1);
  return std::sqrt(k - both + first + second);
}

double order_lambda_bound(std::uint32_t q, int d1, int d2) {
  return std::pow(static_cast<double>(q), (d1 + 2 * d2 - 3) / 2.0);
}

SpectralReport second_eigenvalue(const IncidenceGraph& g, double tol, EigenMethod method, unsigned workers) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (method == EigenMethod::automatic) method = g.n() <= kMaxDenseVertices ? EigenMethod::dense : EigenMethod::power;
  if (method == EigenMethod::dense && g.n() > kMaxDenseVertices)
    throw std::invalid_argument("dense eigensolve needs n <= 5000");
  SpectralReport r = method == EigenMethod::dense ? dense_eigen(g) : power_eigen(g, tol, workers);
  if (r.residual > tol)
    throw ConvergenceError("eigensolver residual " + std::to_string(r.residual) + " exceeds tolerance", r.residual);
  r.explicit_bound = explicit_lambda_bound(g.q(), g.d1(), g.d2());
  r.order_bound = order_lambda_bound(g.q(), g.d1(), g.d2());
  r.within_explicit_bound = r.lambda2 <= r.explicit_bound;
  return r;
}

namespace {

// |edges * n - k * a * b| <= n * lambda * sqrt(norms), evaluated with the
// integer side exact and a relative slack of 1e-12 on the real side.
MixingResult finish_mixing(const IncidenceGraph& g, __int128 edges, __int128 mass, long double norms, double lambda) {
  MixingResult r;
  r.edges = static_cast<std::uint64_t>(edges);
  const __int128 n = g.n(), k = g.k();
  r.main_term = static_cast<double>(static_cast<long double>(k * mass) / static_cast<long double>(n));
  const __int128 diff = edges * n - k * mass;
  const long double abs_diff = static_cast<long double>(diff < 0 ? -diff : diff);
  r.discrepancy = static_cast<double>(abs_diff / static_cast<long double>(n));
  const long double rhs = static_cast<long double>(lambda) * std::sqrt(norms);
  r.bound = static_cast<double>(rhs);
  r.ok = abs_diff <= rhs * static_cast<long double>(n) * (1.0L + 1e-12L) + 1e-9L;
  return r;
}

std::vector<std::uint32_t> unique_vertices(const IncidenceGraph& g, std::span<const std::uint32_t> s) {
  std::vector<std::uint32_t> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (!v.empty()) check_vertex(g, v.back());
  return v;
}

}  // namespace

MixingResult mixing_check(const IncidenceGraph& g, std::span<const std::uint32_t> u, std::span<const std::uint32_t> v,
                          double lambda) {
  const auto us = unique_vertices(g, u), vs = unique_vertices(g, v);
  std::vector<std::uint8_t> in_v(g.n(), 0);
  for (auto x : vs) in_v[x] = 1;
  __int128 edges = 0;
  for (auto x : us)
    for (auto w : g.neighbors(x)) edges += in_v[w];
  const __int128 mass = static_cast<__int128>(us.size()) * static_cast<__int128>(vs.size());
  return finish_mixing(g, edges, mass, static_cast<long double>(us.size()) * static_cast<long double>(vs.size()), lambda);
}

MixingResult mixing_check_l2(const IncidenceGraph& g, std::span<const std::uint64_t> f,
                             std::span<const std::uint64_t> g_fn, double lambda) {
  if (f.size() != g.n() || g_fn.size() != g.n())
    throw std::invalid_argument("vertex functions must have one value per vertex");
  __int128 inner = 0, sum_f = 0, sum_g = 0, sq_f = 0, sq_g = 0;
  for (std::uint32_t x = 0; x < g.n(); ++x) {
    __int128 ag = 0;
    for (auto w : g.neighbors(x)) ag += g_fn[w];
    inner += static_cast<__int128>(f[x]) * ag;
    sum_f += f[x];
    sum_g += g_fn[x];
    sq_f += static_cast<__int128>(f[x]) * f[x];
    sq_g += static_cast<__int128>(g_fn[x]) * g_fn[x];
  }
  return finish_mixing(g, inner, sum_f * sum_g, static_cast<long double>(sq_f) * static_cast<long double>(sq_g), lambda);
}

void write_graph(std::ostream& out, const IncidenceGraph& g) {
  out << "# ffincidence-graph v1 q=" << g.q() << " d1=" << g.d1() << " d2=" << g.d2() << '\n';
  for (std::uint32_t u = 0; u < g.n(); ++u)
    for (auto w : g.neighbors(u))
      if (u <= w) out << u << ' ' << w << '\n';
}

}  // namespace ffincidence
