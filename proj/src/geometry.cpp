#include "ffincidence/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "ffincidence/projective.hpp"

namespace ffincidence {

std::uint64_t Space::point_count() const {
  std::uint64_t n = 1;
  for (int i = 0; i < dim(); ++i) n *= q;
  return n;
}

std::uint64_t encode_point(const Space& space, std::span<const Elem> coords) {
  if (coords.size() != static_cast<std::size_t>(space.dim()))
    throw std::invalid_argument("encode_point: wrong coordinate count");
  std::uint64_t id = 0;
  for (auto c : coords) id = id * space.q + c;
  return id;
}

Coords decode_point(const Space& space, std::uint64_t id) {
  Coords out{};
  for (int i = space.dim() - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = static_cast<Elem>(id % space.q);
    id /= space.q;
  }
  return out;
}

std::uint64_t line_count(std::uint32_t q) { return static_cast<std::uint64_t>(q) * q + q; }

std::uint64_t line_id(std::uint32_t q, const Line& line) {
  const std::uint64_t qq = static_cast<std::uint64_t>(q) * q;
  return line.vertical ? qq + line.t : static_cast<std::uint64_t>(line.s) * q + line.t;
}

Line line_from_id(std::uint32_t q, std::uint64_t id) {
  const std::uint64_t qq = static_cast<std::uint64_t>(q) * q;
  if (id >= qq) return Line::upright(static_cast<Elem>(id - qq));
  return Line::sloped(static_cast<Elem>(id / q), static_cast<Elem>(id % q));
}

bool on_line(const FieldSpec& field, const Line& line, Elem x, Elem y) {
  if (line.vertical) return x == line.t;
  return y == field.add(field.mul(line.s, x), line.t);
}

std::vector<Line> enumerate_lines(const FieldSpec& field) {
  if (field.q() > (1u << 10)) throw std::invalid_argument("enumerate_lines: q above 2^10");
  std::vector<Line> out;
  out.reserve(line_count(field.q()));
  for (std::uint64_t id = 0; id < line_count(field.q()); ++id) out.push_back(line_from_id(field.q(), id));
  return out;
}

std::vector<Line> lines_through(const FieldSpec& field, Elem x, Elem y) {
  std::vector<Line> out;
  out.reserve(field.q() + 1);
  for (Elem s = 0; s < field.q(); ++s) out.push_back(Line::sloped(s, field.sub(y, field.mul(s, x))));
  out.push_back(Line::upright(x));
  return out;
}

std::uint64_t linepair_id(std::uint32_t q, const LinePair& pair) {
  return line_id(q, pair.first) * line_count(q) + line_id(q, pair.second);
}

LinePair linepair_from_id(std::uint32_t q, std::uint64_t id) {
  const std::uint64_t lc = line_count(q);
  return {line_from_id(q, id / lc), line_from_id(q, id % lc)};
}

std::uint64_t pointpair_id(std::uint32_t q, const PointPair& x) {
  const Elem c[4] = {x.first[0], x.first[1], x.second[0], x.second[1]};
  return encode_point(Space{q, 2, 2}, c);
}

PointPair pointpair_from_id(std::uint32_t q, std::uint64_t id) {
  const Coords c = decode_point(Space{q, 2, 2}, id);
  return {{c[0], c[1]}, {c[2], c[3]}};
}

bool incident(const FieldSpec& field, const PointPair& x, const LinePair& line) {
  return on_line(field, line.first, x.first[0], x.first[1]) && on_line(field, line.second, x.second[0], x.second[1]);
}

Hyperplane make_hyperplane(const FieldSpec& field, std::span<const Elem> normal, Elem offset) {
  std::size_t lead = 0;
  while (lead < normal.size() && normal[lead] == 0) ++lead;
  if (lead == normal.size()) throw std::invalid_argument("hyperplane: zero normal vector");
  const Elem scale = field.inv(normal[lead]);
  Hyperplane h;
  h.normal.reserve(normal.size());
  for (auto c : normal) h.normal.push_back(field.mul(c, scale));
  h.offset = field.mul(offset, scale);
  return h;
}

Hyperplane as_hyperplane(const FieldSpec& field, const Line& line) {
  if (line.vertical) {
    const Elem normal[2] = {1, 0};
    return make_hyperplane(field, normal, line.t);
  }
  // Y = sX + t  <=>  -s X + Y = t
  const Elem normal[2] = {field.neg(line.s), 1};
  return make_hyperplane(field, normal, line.t);
}

bool on_hyperplane(const FieldSpec& field, const Hyperplane& h, std::span<const Elem> x) {
  return field.dot(h.normal, x) == h.offset;
}

std::uint64_t hyperplane_count(std::uint32_t q, int d) { return proj_point_count(q, d - 1) * q; }

std::uint64_t hyperplane_id(const FieldSpec& field, const Hyperplane& h) {
  return proj_rank(field, ProjPoint{h.normal}) * field.q() + h.offset;
}

Hyperplane hyperplane_from_id(const FieldSpec& field, int d, std::uint64_t id) {
  Hyperplane h;
  h.normal = proj_unrank(field, d - 1, id / field.q()).coords;
  h.offset = static_cast<Elem>(id % field.q());
  return h;
}

std::uint64_t hyperplanepair_id(const FieldSpec& field, const HyperplanePair& h) {
  const int d2 = static_cast<int>(h.second.normal.size());
  return hyperplane_id(field, h.first) * hyperplane_count(field.q(), d2) + hyperplane_id(field, h.second);
}

HyperplanePair hyperplanepair_from_id(const FieldSpec& field, int d1, int d2, std::uint64_t id) {
  const std::uint64_t h2 = hyperplane_count(field.q(), d2);
  return {hyperplane_from_id(field, d1, id / h2), hyperplane_from_id(field, d2, id % h2)};
}

bool incident(const FieldSpec& field, std::span<const Elem> x, const HyperplanePair& h) {
  const std::size_t d1 = h.first.normal.size();
  if (x.size() != d1 + h.second.normal.size()) throw std::invalid_argument("incident: dimension mismatch");
  return on_hyperplane(field, h.first, x.subspan(0, d1)) && on_hyperplane(field, h.second, x.subspan(d1));
}

namespace {

std::uint64_t universe(const Space& s, PointTag) { return s.point_count(); }
std::uint64_t universe(const Space& s, LinePairTag) { return line_count(s.q) * line_count(s.q); }
std::uint64_t universe(const Space& s, HyperplanePairTag) { return hyperplanepair_count(s); }

}  // namespace

template <class Tag>
IdMultiset<Tag>::IdMultiset(Space space, std::vector<std::uint64_t> ids, std::vector<std::uint32_t> mult)
    : space_(space) {
  if (!mult.empty() && mult.size() != ids.size())
    throw std::invalid_argument("multiset: multiplicity vector length mismatch");
  for (auto m : mult)
    if (m == 0 || m > kMaxMultiplicity) throw std::invalid_argument("multiset: multiplicity outside [1, 2^16]");

  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });

  std::vector<std::uint32_t> merged_mult;
  ids_.reserve(ids.size());
  merged_mult.reserve(ids.size());
  for (auto i : order) {
    const std::uint32_t m = mult.empty() ? 1 : mult[i];
    if (!ids_.empty() && ids_.back() == ids[i]) {
      merged_mult.back() += m;
      if (merged_mult.back() > kMaxMultiplicity) throw std::invalid_argument("multiset: merged multiplicity above 2^16");
    } else {
      ids_.push_back(ids[i]);
      merged_mult.push_back(m);
    }
  }
  if (!ids_.empty() && ids_.back() >= universe(space_, Tag{}))
    throw std::invalid_argument("multiset: id " + std::to_string(ids_.back()) + " outside the space");
  const bool any_above_one = std::any_of(merged_mult.begin(), merged_mult.end(), [](auto m) { return m != 1; });
  if (any_above_one) mult_ = std::move(merged_mult);
}

template <class Tag>
std::uint64_t IdMultiset<Tag>::size() const {
  if (mult_.empty()) return ids_.size();
  return std::accumulate(mult_.begin(), mult_.end(), std::uint64_t{0});
}

template <class Tag>
std::uint64_t IdMultiset<Tag>::sum_sq_multiplicity() const {
  if (mult_.empty()) return ids_.size();
  std::uint64_t s = 0;
  for (auto m : mult_) s += static_cast<std::uint64_t>(m) * m;
  return s;
}

template <class Tag>
bool IdMultiset<Tag>::contains(std::uint64_t id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

template class IdMultiset<PointTag>;
template class IdMultiset<LinePairTag>;
template class IdMultiset<HyperplanePairTag>;

std::uint64_t hyperplanepair_count(const Space& space) {
  return hyperplane_count(space.q, space.d1) * hyperplane_count(space.q, space.d2);
}

HyperplanePairSet to_hyperplane_pairs(const FieldSpec& field, const LinePairSet& lines) {
  std::vector<std::uint64_t> ids;
  std::vector<std::uint32_t> mult;
  ids.reserve(lines.support_size());
  for (std::size_t i = 0; i < lines.support_size(); ++i) {
    const LinePair lp = linepair_from_id(field.q(), lines.ids()[i]);
    ids.push_back(hyperplanepair_id(field, {as_hyperplane(field, lp.first), as_hyperplane(field, lp.second)}));
    if (lines.has_multiplicity()) mult.push_back(lines.multiplicity(i));
  }
  return HyperplanePairSet(Space{field.q(), 2, 2}, std::move(ids), std::move(mult));
}

bool all_nonvertical(const LinePairSet& lines) {
  const std::uint32_t q = lines.space().q;
  for (auto id : lines.ids())
    if (!linepair_from_id(q, id).nonvertical()) return false;
  return true;
}

}  // namespace ffincidence
