#include "ffincidence/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "ffincidence/counting.hpp"
#include "ffincidence/generate.hpp"
#include "ffincidence/spectral.hpp"

namespace ffincidence {

namespace {

using u128 = unsigned __int128;

u128 gcd128(u128 a, u128 b) {
  while (b != 0) a = std::exchange(b, a % b);
  return a;
}

// |lhs - main| as a real, from lhs * den - num in exact integers.
double exact_gap(std::uint64_t lhs, const Rational& main) {
  const u128 scaled = static_cast<u128>(lhs) * main.den;
  const u128 gap = scaled >= main.num ? scaled - main.num : main.num - scaled;
  return static_cast<double>(static_cast<long double>(gap) / static_cast<long double>(main.den));
}

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

BoundReport two_sided(std::string id, std::uint64_t lhs, Rational main, double bound) {
  BoundReport r;
  r.theorem_id = std::move(id);
  r.lhs = lhs;
  r.main_term = main;
  r.bound_term = bound;
  r.discrepancy = exact_gap(lhs, main);
  r.ratio = safe_ratio(r.discrepancy, bound);
  return r;
}

BoundReport one_sided(std::string id, std::uint64_t lhs, double bound) {
  BoundReport r;
  r.theorem_id = std::move(id);
  r.lhs = lhs;
  r.bound_term = bound;
  r.discrepancy = static_cast<double>(lhs);
  r.ratio = safe_ratio(r.discrepancy, bound);
  return r;
}

// |lhs n - k S| <= n lambda sqrt(norms), S = |P||L|, with a 1e-12 relative slack on the real side.
BoundReport mixing_form(std::string id, std::uint64_t lhs, u128 mass, long double norms, const SpectralContext& ctx) {
  const double bound = static_cast<double>(ctx.lambda2 * std::sqrt(norms));
  auto r = two_sided(std::move(id), lhs, make_rational(mass * ctx.k, ctx.n), bound);
  const u128 scaled = static_cast<u128>(lhs) * ctx.n, main = mass * ctx.k;
  const long double gap = static_cast<long double>(scaled >= main ? scaled - main : main - scaled);
  r.checked = true;
  r.check_ok = gap <= static_cast<long double>(ctx.n) * ctx.lambda2 * std::sqrt(norms) * (1.0L + 1e-12L) + 1e-9L;
  return r;
}

void require_plane(const PointSet& s, const char* name) {
  if (s.space().d1 != 2 || s.space().d2 != 0)
    throw std::invalid_argument(std::string(name) + " must be a set of F_q^2");
}

}  // namespace

Rational make_rational(u128 num, u128 den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  const u128 g = num == 0 ? den : gcd128(num, den);
  num /= g;
  den /= g;
  constexpr u128 limit = static_cast<u128>(UINT64_MAX);
  if (num > limit || den > limit) throw std::overflow_error("rational term exceeds 64 bits");
  return {static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den)};
}

SpectralContext spectral_context(const FieldSpec& field, int d1, int d2, double tol, unsigned workers) {
  const auto g = build_graph(field, d1, d2, workers);
  const auto s = second_eigenvalue(g, tol, EigenMethod::automatic, workers);
  return {field.q(), d1, d2, g.n(), g.k(), s.lambda2};
}

std::uint64_t checked_incidences(const FieldSpec& field, const PointSet& p, const LinePairSet& l, unsigned workers) {
  const auto fast = count_incidences(field, p, l, CountMethod::indexed, workers).count;
  const auto slow = count_incidences(field, p, l, CountMethod::naive, workers).count;
  if (fast != slow)
    throw OracleMismatch("indexed count " + std::to_string(fast) + " differs from naive count " + std::to_string(slow));
  return fast;
}

std::uint64_t checked_incidences(const FieldSpec& field, const PointSet& p, const HyperplanePairSet& h,
                                 unsigned workers) {
  const auto fast = count_incidences(field, p, h, CountMethod::indexed, workers).count;
  const auto slow = count_incidences(field, p, h, CountMethod::naive, workers).count;
  if (fast != slow)
    throw OracleMismatch("indexed count " + std::to_string(fast) + " differs from naive count " + std::to_string(slow));
  return fast;
}

std::vector<BoundReport> verify_cs(const FieldSpec& field, const PointSet& p, const LinePairSet& l, unsigned workers) {
  const auto i = checked_incidences(field, p, l, workers);
  const double np = static_cast<double>(p.size()), nl = static_cast<double>(l.size());
  const double q = field.q();
  return {one_sided("cs1", i, std::sqrt(q) * std::sqrt(np) * nl + np), one_sided("cs2", i, np * std::sqrt(nl) + nl)};
}

BoundReport verify_vinh(const FieldSpec& field, const PointSet& p, const LinePairSet& l, LambdaMode mode,
                        const SpectralContext* ctx, unsigned workers) {
  const auto i = checked_incidences(field, p, l, workers);
  const u128 mass = static_cast<u128>(p.size()) * l.size();
  const long double norms =
      static_cast<long double>(p.sum_sq_multiplicity()) * static_cast<long double>(l.sum_sq_multiplicity());
  if (mode == LambdaMode::computed) {
    if (ctx == nullptr || ctx->q != field.q() || ctx->d1 != 2 || ctx->d2 != 2)
      throw std::invalid_argument("computed mode needs the spectral data of the d1 = d2 = 2 graph");
    return mixing_form("vinh", i, mass, norms, *ctx);
  }
  const u128 q = field.q();
  return two_sided("vinh", i, make_rational(mass, q * q), std::pow(static_cast<double>(q), 1.5) * std::sqrt(norms));
}

std::vector<BoundReport> verify_hyperplane(const FieldSpec& field, const PointSet& p, const HyperplanePairSet& h,
                                           const SpectralContext* ctx, unsigned workers) {
  const Space s = p.space();
  if (!(s == h.space())) throw std::invalid_argument("points and hyperplane-pairs live in different spaces");
  if (s.d1 < 2 || s.d1 > s.d2) throw std::invalid_argument("hyperplane bound needs 2 <= d1 <= d2");
  const auto i = checked_incidences(field, p, h, workers);
  const u128 mass = static_cast<u128>(p.size()) * h.size();
  const long double norms =
      static_cast<long double>(p.sum_sq_multiplicity()) * static_cast<long double>(h.sum_sq_multiplicity());
  const u128 q = field.q();
  std::vector<BoundReport> out;
  out.push_back(two_sided("hyperplane", i, make_rational(mass, q * q),
                          order_lambda_bound(field.q(), s.d1, s.d2) * static_cast<double>(std::sqrt(norms))));
  if (ctx != nullptr) {
    if (ctx->q != field.q() || ctx->d1 != s.d1 || ctx->d2 != s.d2)
      throw std::invalid_argument("spectral data does not match the space");
    out.push_back(mixing_form("hyperplane_computed", i, mass, norms, *ctx));
  }
  return out;
}

EnergyReduction build_energy_reduction(const FieldSpec& field, const PointSet& a, const LinePairSet& l,
                                       unsigned workers) {
  require_plane(a, "A");
  if (!all_nonvertical(l)) throw std::invalid_argument("energy reduction needs line-pairs without vertical components");
  const std::uint32_t q = field.q();
  const Space plane{q, 2, 0}, product{q, 3, 3};

  std::vector<Coords> as;
  std::vector<LinePair> ls;
  for (auto id : a.ids()) as.push_back(decode_point(plane, id));
  for (auto id : l.ids()) ls.push_back(linepair_from_id(q, id));

  std::vector<std::uint64_t> q_ids, r_ids;
  std::vector<std::uint32_t> q_mult, r_mult;
  const bool weighted = a.has_multiplicity() || l.has_multiplicity();
  // phi(a, l) packed as (s1 a1 + t1) q + (s2 a2 + t2), with its weight.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> images;
  for (std::size_t i = 0; i < as.size(); ++i) {
    const Elem x1 = as[i][0], x2 = as[i][1];
    for (std::size_t j = 0; j < ls.size(); ++j) {
      const Line& l1 = ls[j].first;
      const Line& l2 = ls[j].second;
      const std::uint32_t w = a.multiplicity(i) * l.multiplicity(j);

      const Elem point[6] = {x1, l1.s, l1.t, x2, l2.s, l2.t};
      q_ids.push_back(encode_point(product, point));

      const Elem one = field.one();
      const Elem n1[3] = {l1.s, field.neg(x1), field.neg(one)}, n2[3] = {l2.s, field.neg(x2), field.neg(one)};
      HyperplanePair h{make_hyperplane(field, n1, field.neg(l1.t)), make_hyperplane(field, n2, field.neg(l2.t))};
      r_ids.push_back(hyperplanepair_id(field, h));
      if (weighted) {
        q_mult.push_back(w);
        r_mult.push_back(w);
      }

      const Elem y1 = field.add(field.mul(l1.s, x1), l1.t), y2 = field.add(field.mul(l2.s, x2), l2.t);
      images.emplace_back(static_cast<std::uint64_t>(y1) * q + y2, w);
    }
  }

  EnergyReduction red;
  red.points = PointSet(product, std::move(q_ids), std::move(q_mult));
  red.planes = HyperplanePairSet(product, std::move(r_ids), std::move(r_mult));
  red.energy = count_incidences(field, red.points, red.planes, CountMethod::indexed, workers).count;

  std::sort(images.begin(), images.end());
  for (std::size_t i = 0; i < images.size();) {
    std::uint64_t weight = 0;
    std::size_t j = i;
    for (; j < images.size() && images[j].first == images[i].first; ++j) weight += images[j].second;
    red.direct_energy += weight * weight;
    i = j;
  }
  return red;
}

std::vector<BoundReport> verify_cartesian(const FieldSpec& field, const PointSet& a, const PointSet& b,
                                          const LinePairSet& l, double threshold_exponent, unsigned workers) {
  require_plane(a, "A");
  require_plane(b, "B");
  if (a.size() > b.size()) throw std::invalid_argument("the A x B bound needs |A| <= |B|");
  if (!all_nonvertical(l)) throw std::invalid_argument("the A x B bound needs line-pairs without vertical components");

  const std::uint32_t q = field.q();
  const auto lhs = checked_incidences(field, cartesian(a, b), l, workers);
  const auto red = build_energy_reduction(field, a, l, workers);
  if (red.energy != red.direct_energy)
    throw OracleMismatch("energy from incidences " + std::to_string(red.energy) + " differs from direct count " +
                         std::to_string(red.direct_energy));

  // Solutions of phi(a, l) in B, counted independently of the incidence engine.
  const Space plane{q, 2, 0};
  std::uint64_t solutions = 0;
  for (std::size_t i = 0; i < a.support_size(); ++i) {
    const Coords x = decode_point(plane, a.ids()[i]);
    for (std::size_t j = 0; j < l.support_size(); ++j) {
      const auto lp = linepair_from_id(q, l.ids()[j]);
      const Elem y[2] = {field.add(field.mul(lp.first.s, x[0]), lp.first.t),
                         field.add(field.mul(lp.second.s, x[1]), lp.second.t)};
      const auto id = encode_point(plane, y);
      const auto it = std::lower_bound(b.ids().begin(), b.ids().end(), id);
      if (it != b.ids().end() && *it == id)
        solutions += std::uint64_t{a.multiplicity(i)} * l.multiplicity(j) * b.multiplicity(it - b.ids().begin());
    }
  }
  if (solutions != lhs)
    throw OracleMismatch("phi solution count " + std::to_string(solutions) + " differs from I(A x B, L) " +
                         std::to_string(lhs));

  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size()), nl = static_cast<double>(l.size());
  const double qd = q;
  const double root = std::pow(qd, 0.75) * std::sqrt(na * nb * nl);

  auto main = one_sided("cartesian", lhs, na * std::sqrt(nb) * nl / qd + root);
  main.checked = true;
  main.check_ok = static_cast<u128>(lhs) * lhs <= static_cast<u128>(b.sum_sq_multiplicity()) * red.energy;
  if (!main.check_ok) main.note = "I^2 exceeds |B| E";

  auto small = one_sided("cartesian_small", lhs, root);
  small.hypothesis_ok = na * nl <= std::pow(qd, threshold_exponent);

  const u128 al = static_cast<u128>(a.size()) * l.size();
  auto energy = two_sided("energy", red.energy, make_rational(al * al, static_cast<u128>(q) * q), std::pow(qd, 1.5) * na * nl);
  return {main, small, energy};
}

BoundReport verify_sdz(const FieldSpec& field, const PointSet& p, const LinePairSet& l, SdzParams params,
                       unsigned workers) {
  if (!(params.c > 0.0) || !(params.c_prime > 0.0)) throw std::invalid_argument("C and C' must be positive");
  const auto i = checked_incidences(field, p, l, workers);
  const long double m = p.size(), n = l.size(), q = field.q();
  auto r = one_sided("sdz", i, static_cast<double>(params.c * n * n * std::sqrt(m / q)));
  r.hypothesis_ok = q * q * q > n && n > q / params.c && n * n * n * n >= params.c_prime * m * q * q * q;
  return r;
}

}  // namespace ffincidence
