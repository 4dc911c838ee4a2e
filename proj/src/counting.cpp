#include "ffincidence/counting.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <unordered_map>

#include "ffincidence/parallel.hpp"
#include "ffincidence/projective.hpp"

namespace ffincidence {

std::string_view to_string(CountMethod m) { return m == CountMethod::naive ? "naive" : "indexed"; }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// id -> multiplicity, 0 when absent. Dense array for small universes.
class MultiplicityIndex {
public:
  template <class Tag>
  MultiplicityIndex(const IdMultiset<Tag>& set, std::uint64_t universe) {
    constexpr std::uint64_t kDenseLimit = 1ull << 22;
    if (universe <= kDenseLimit) {
      dense_.assign(universe, 0);
      for (std::size_t i = 0; i < set.support_size(); ++i) dense_[set.ids()[i]] = set.multiplicity(i);
    } else {
      sparse_.reserve(set.support_size());
      for (std::size_t i = 0; i < set.support_size(); ++i) sparse_.emplace(set.ids()[i], set.multiplicity(i));
    }
  }

  std::uint32_t operator[](std::uint64_t id) const {
    if (!dense_.empty()) return dense_[id];
    auto it = sparse_.find(id);
    return it == sparse_.end() ? 0 : it->second;
  }

private:
  std::vector<std::uint32_t> dense_;
  std::unordered_map<std::uint64_t, std::uint32_t> sparse_;
};

std::uint64_t ipow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  while (e-- > 0) r *= base;
  return r;
}

// Incidence structure of one factor: affine points of F_q^d against either
// lines (slope/vertical ids, d = 2) or canonical hyperplanes.
class Factor {
public:
  static Factor lines(const FieldSpec& field) {
    Factor f(field, 2);
    f.line_mode_ = true;
    f.object_count_ = line_count(field.q());
    f.through_count_ = field.q() + 1;
    return f;
  }

  static Factor hyperplanes(const FieldSpec& field, int d) {
    Factor f(field, d);
    for (auto& p : enumerate_proj_points(field, d - 1)) f.normals_.push_back(std::move(p.coords));
    f.object_count_ = hyperplane_count(field.q(), d);
    f.through_count_ = f.normals_.size();
    return f;
  }

  std::uint64_t point_count() const { return point_count_; }
  std::uint64_t object_count() const { return object_count_; }
  std::uint64_t through_count() const { return through_count_; }
  std::uint64_t points_per_object() const { return point_count_ / q_; }

  void decode(std::uint64_t point, Elem* out) const {
    for (int i = d_ - 1; i >= 0; --i) {
      out[i] = static_cast<Elem>(point % q_);
      point /= q_;
    }
  }

  bool contains(std::uint64_t object, const Elem* x) const {
    if (line_mode_) return on_line(*field_, line_from_id(q_, object), x[0], x[1]);
    const auto& a = normals_[object / q_];
    Elem acc = 0;
    for (int i = 0; i < d_; ++i) acc = field_->add(acc, field_->mul(a[static_cast<std::size_t>(i)], x[i]));
    return acc == object % q_;
  }

  void through(std::uint64_t point, std::vector<std::uint64_t>& out) const {
    out.clear();
    Elem x[kMaxFactorDim];
    decode(point, x);
    if (line_mode_) {
      for (Elem s = 0; s < q_; ++s) out.push_back(line_id(q_, Line::sloped(s, field_->sub(x[1], field_->mul(s, x[0])))));
      out.push_back(line_id(q_, Line::upright(x[0])));
      return;
    }
    for (std::size_t r = 0; r < normals_.size(); ++r) {
      Elem c = 0;
      for (int i = 0; i < d_; ++i) c = field_->add(c, field_->mul(normals_[r][static_cast<std::size_t>(i)], x[i]));
      out.push_back(r * q_ + c);
    }
  }

  void points_on(std::uint64_t object, std::vector<std::uint64_t>& out) const {
    out.clear();
    if (line_mode_) {
      const Line line = line_from_id(q_, object);
      for (Elem u = 0; u < q_; ++u) {
        if (line.vertical)
          out.push_back(static_cast<std::uint64_t>(line.t) * q_ + u);
        else
          out.push_back(static_cast<std::uint64_t>(u) * q_ + field_->add(field_->mul(line.s, u), line.t));
      }
      return;
    }
    const auto& a = normals_[object / q_];
    const Elem c = static_cast<Elem>(object % q_);
    int pivot = 0;
    while (a[static_cast<std::size_t>(pivot)] == 0) ++pivot;  // canonical: a[pivot] == 1
    const std::uint64_t free_count = ipow(q_, d_ - 1);
    Elem x[kMaxFactorDim];
    for (std::uint64_t code = 0; code < free_count; ++code) {
      std::uint64_t rest = code;
      Elem partial = 0;
      for (int i = d_ - 1; i >= 0; --i) {
        if (i == pivot) continue;
        x[i] = static_cast<Elem>(rest % q_);
        rest /= q_;
        partial = field_->add(partial, field_->mul(a[static_cast<std::size_t>(i)], x[i]));
      }
      x[pivot] = field_->sub(c, partial);
      std::uint64_t id = 0;
      for (int i = 0; i < d_; ++i) id = id * q_ + x[i];
      out.push_back(id);
    }
  }

private:
  Factor(const FieldSpec& field, int d) : field_(&field), q_(field.q()), d_(d), point_count_(ipow(field.q(), d)) {}

  const FieldSpec* field_;
  std::uint32_t q_;
  int d_;
  bool line_mode_ = false;
  std::uint64_t point_count_;
  std::uint64_t object_count_ = 0;
  std::uint64_t through_count_ = 0;
  std::vector<std::vector<Elem>> normals_;
};

template <class Tag>
std::uint64_t count_product(const Factor& f1, const Factor& f2, const PointSet& points,
                            const IdMultiset<Tag>& objects, CountMethod method, unsigned workers) {
  const std::uint64_t q2_points = f2.point_count();
  const std::uint64_t n2_objects = f2.object_count();
  const std::size_t np = points.support_size(), nl = objects.support_size();
  if (np == 0 || nl == 0) return 0;

  if (method == CountMethod::naive) {
    return parallel_sum(np, workers, [&](std::size_t begin, std::size_t end) {
      std::uint64_t acc = 0;
      Elem x1[kMaxFactorDim], x2[kMaxFactorDim];
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint64_t pid = points.ids()[i];
        f1.decode(pid / q2_points, x1);
        f2.decode(pid % q2_points, x2);
        std::uint64_t row = 0;
        for (std::size_t j = 0; j < nl; ++j) {
          const std::uint64_t oid = objects.ids()[j];
          if (f1.contains(oid / n2_objects, x1) && f2.contains(oid % n2_objects, x2)) row += objects.multiplicity(j);
        }
        acc += row * points.multiplicity(i);
      }
      return acc;
    });
  }

  const std::uint64_t cost_points = np * f1.through_count() * f2.through_count();
  const std::uint64_t cost_objects = nl * f1.points_per_object() * f2.points_per_object();
  if (cost_points <= cost_objects) {
    const MultiplicityIndex index(objects, f1.object_count() * n2_objects);
    return parallel_sum(np, workers, [&](std::size_t begin, std::size_t end) {
      std::uint64_t acc = 0;
      std::vector<std::uint64_t> t1, t2;
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint64_t pid = points.ids()[i];
        f1.through(pid / q2_points, t1);
        f2.through(pid % q2_points, t2);
        std::uint64_t row = 0;
        for (auto a : t1)
          for (auto b : t2) row += index[a * n2_objects + b];
        acc += row * points.multiplicity(i);
      }
      return acc;
    });
  }
  const MultiplicityIndex index(points, f1.point_count() * q2_points);
  return parallel_sum(nl, workers, [&](std::size_t begin, std::size_t end) {
    std::uint64_t acc = 0;
    std::vector<std::uint64_t> p1, p2;
    for (std::size_t j = begin; j < end; ++j) {
      const std::uint64_t oid = objects.ids()[j];
      f1.points_on(oid / n2_objects, p1);
      f2.points_on(oid % n2_objects, p2);
      std::uint64_t row = 0;
      for (auto u : p1)
        for (auto v : p2) row += index[u * q2_points + v];
      acc += row * objects.multiplicity(j);
    }
    return acc;
  });
}

void require_field(const FieldSpec& field, const Space& space) {
  if (space.q != field.q()) throw std::invalid_argument("set built over a different field");
}

}  // namespace

IncidenceReport count_incidences(const FieldSpec& field, const PointSet& points, const LinePairSet& lines,
                                 CountMethod method, unsigned workers) {
  const auto start = Clock::now();
  const Space expected{field.q(), 2, 2};
  if (!(points.space() == expected) || !(lines.space() == expected))
    throw std::invalid_argument("count_incidences: line-pairs live in F_q^2 x F_q^2");
  const Factor f = Factor::lines(field);
  IncidenceReport r;
  r.count = count_product(f, f, points, lines, method, workers);
  r.method = method;
  r.elapsed = seconds_since(start);
  return r;
}

IncidenceReport count_incidences(const FieldSpec& field, const PointSet& points, const HyperplanePairSet& planes,
                                 CountMethod method, unsigned workers) {
  const auto start = Clock::now();
  require_field(field, points.space());
  if (!(points.space() == planes.space())) throw std::invalid_argument("count_incidences: space mismatch");
  const Space& s = points.space();
  if (s.d1 < 1 || s.d2 < 1 || s.d1 > kMaxFactorDim || s.d2 > kMaxFactorDim)
    throw std::invalid_argument("count_incidences: factor dimensions must lie in [1, 4]");
  const Factor f1 = Factor::hyperplanes(field, s.d1);
  const Factor f2 = Factor::hyperplanes(field, s.d2);
  IncidenceReport r;
  r.count = count_product(f1, f2, points, planes, method, workers);
  r.method = method;
  r.elapsed = seconds_since(start);
  return r;
}

DegreeProfile degree_profile(const FieldSpec& field, const PointSet& points, const LinePairSet& lines,
                             unsigned workers) {
  const Space expected{field.q(), 2, 2};
  if (!(points.space() == expected) || !(lines.space() == expected))
    throw std::invalid_argument("degree_profile: line-pairs live in F_q^2 x F_q^2");
  const Factor f = Factor::lines(field);
  const std::uint64_t qq = f.point_count(), nl = f.object_count();
  const MultiplicityIndex line_index(lines, nl * nl);
  const MultiplicityIndex point_index(points, qq * qq);

  DegreeProfile out;
  out.per_point.assign(points.support_size(), 0);
  out.per_line.assign(lines.support_size(), 0);
  parallel_chunks(points.support_size(), workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint64_t> t1, t2;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t pid = points.ids()[i];
      f.through(pid / qq, t1);
      f.through(pid % qq, t2);
      std::uint64_t deg = 0;
      for (auto a : t1)
        for (auto b : t2) deg += line_index[a * nl + b];
      out.per_point[i] = deg;
    }
  });
  parallel_chunks(lines.support_size(), workers, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint64_t> p1, p2;
    for (std::size_t j = begin; j < end; ++j) {
      const std::uint64_t lid = lines.ids()[j];
      f.points_on(lid / nl, p1);
      f.points_on(lid % nl, p2);
      std::uint64_t deg = 0;
      for (auto u : p1)
        for (auto v : p2) deg += point_index[u * qq + v];
      out.per_line[j] = deg;
    }
  });
  for (std::size_t i = 0; i < out.per_point.size(); ++i) {
    const std::uint64_t m = points.multiplicity(i), d = out.per_point[i];
    out.sum_point += m * d;
    out.sum_sq_point += m * d * d;
  }
  for (std::size_t j = 0; j < out.per_line.size(); ++j) {
    const std::uint64_t m = lines.multiplicity(j), d = out.per_line[j];
    out.sum_line += m * d;
    out.sum_sq_line += m * d * d;
  }
  return out;
}

std::uint64_t collision_energy(std::span<const std::uint64_t> images) {
  std::vector<std::uint64_t> sorted(images.begin(), images.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t energy = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const std::uint64_t c = j - i;
    energy += c * c;
    i = j;
  }
  return energy;
}

EnergyResult phi_solutions(const EnergyQuery& query) {
  std::vector<std::uint64_t> target(query.target);
  std::sort(target.begin(), target.end());
  target.erase(std::unique(target.begin(), target.end()), target.end());

  EnergyResult r;
  r.target_size = target.size();
  for (auto z : query.images)
    if (std::binary_search(target.begin(), target.end(), z)) ++r.solutions;
  r.energy = collision_energy(query.images);
  const unsigned __int128 lhs = static_cast<unsigned __int128>(r.solutions) * r.solutions;
  const unsigned __int128 rhs = static_cast<unsigned __int128>(r.target_size) * r.energy;
  r.bound_ok = lhs <= rhs;
  return r;
}

}  // namespace ffincidence
