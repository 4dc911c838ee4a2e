#include "ffincidence/projective.hpp"

#include <stdexcept>

namespace ffincidence {

ProjPoint canonicalize(const FieldSpec& field, std::span<const Elem> v) {
  std::size_t lead = 0;
  while (lead < v.size() && v[lead] == 0) ++lead;
  if (lead == v.size()) throw std::invalid_argument("canonicalize: zero vector");
  const Elem scale = field.inv(v[lead]);
  ProjPoint out;
  out.coords.reserve(v.size());
  for (auto c : v) out.coords.push_back(field.mul(c, scale));
  return out;
}

bool orthogonal(const FieldSpec& field, const ProjPoint& x, const ProjPoint& y) {
  if (x.coords.size() != y.coords.size()) throw std::invalid_argument("orthogonal: dimension mismatch");
  return field.dot(x.coords, y.coords) == 0;
}

std::uint64_t proj_point_count(std::uint64_t q, int d) {
  std::uint64_t total = 0, power = 1;
  for (int i = 0; i <= d; ++i) {
    total += power;
    power *= q;
  }
  return total;
}

std::vector<ProjPoint> enumerate_proj_points(const FieldSpec& field, int d) {
  if (d < 1) throw std::invalid_argument("enumerate_proj_points: dimension must be >= 1");
  const std::uint64_t count = proj_point_count(field.q(), d);
  if (count > kMaxProjPoints) throw std::invalid_argument("enumerate_proj_points: size cap exceeded");
  std::vector<ProjPoint> out;
  out.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) out.push_back(proj_unrank(field, d, r));
  return out;
}

// Groups by leading position: lead = d first (fewest free coordinates), then
// d-1, ..., 0. Group with lead j holds q^{d-j} points and starts at
// (q^{d-j} - 1) / (q - 1); inside a group the free tail counts in base q.
std::uint64_t proj_rank(const FieldSpec& field, const ProjPoint& x) {
  const std::uint64_t q = field.q();
  const int d = x.dim();
  int lead = 0;
  while (lead <= d && x.coords[static_cast<std::size_t>(lead)] == 0) ++lead;
  if (lead > d || x.coords[static_cast<std::size_t>(lead)] != 1)
    throw std::invalid_argument("proj_rank: point not canonical");
  const int free = d - lead;
  std::uint64_t offset = 0, power = 1;
  for (int i = 0; i < free; ++i) {
    offset += power;
    power *= q;
  }
  std::uint64_t tail = 0;
  for (int i = lead + 1; i <= d; ++i) tail = tail * q + x.coords[static_cast<std::size_t>(i)];
  return offset + tail;
}

ProjPoint proj_unrank(const FieldSpec& field, int d, std::uint64_t rank) {
  const std::uint64_t q = field.q();
  int free = 0;
  std::uint64_t group = 1;
  while (rank >= group) {
    rank -= group;
    group *= q;
    ++free;
    if (free > d) throw std::out_of_range("proj_unrank: rank out of range");
  }
  ProjPoint out;
  out.coords.assign(static_cast<std::size_t>(d) + 1, 0);
  const int lead = d - free;
  out.coords[static_cast<std::size_t>(lead)] = 1;
  for (int i = d; i > lead; --i) {
    out.coords[static_cast<std::size_t>(i)] = static_cast<Elem>(rank % q);
    rank /= q;
  }
  return out;
}

ProjPoint embed_affine(const FieldSpec& field, std::span<const Elem> point) {
  std::vector<Elem> v(point.begin(), point.end());
  v.push_back(1);
  return canonicalize(field, v);
}

ProjPoint embed_hyperplane(const FieldSpec& field, std::span<const Elem> normal, Elem offset) {
  bool nonzero = false;
  for (auto c : normal) nonzero = nonzero || c != 0;
  if (!nonzero) throw std::invalid_argument("embed_hyperplane: zero normal vector");
  std::vector<Elem> v(normal.begin(), normal.end());
  v.push_back(field.neg(offset));
  return canonicalize(field, v);
}

}  // namespace ffincidence
