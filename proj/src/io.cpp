#include "ffincidence/io.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ffincidence {

namespace {

void header(std::ostream& out, const Space& s, const char* kind) {
  out << "# ffincidence-set v1 q=" << s.q << " kind=" << kind << " d1=" << s.d1 << " d2=" << s.d2 << '\n';
}

struct Parsed {
  Space space;
  std::vector<std::vector<std::uint64_t>> rows;
};

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::runtime_error("set file line " + std::to_string(line) + ": " + what);
}

Parsed parse(std::istream& in, const std::string& kind, std::size_t fields_without_mult) {
  std::string line;
  if (!std::getline(in, line)) fail(1, "missing header");
  std::istringstream hs(line);
  std::string hash, magic, version, token;
  hs >> hash >> magic >> version;
  if (hash != "#" || magic != "ffincidence-set" || version != "v1") fail(1, "not an ffincidence-set v1 header");
  std::map<std::string, std::string> kv;
  while (hs >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) fail(1, "bad header token '" + token + "'");
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  if (kv["kind"] != kind) fail(1, "expected kind=" + kind + ", found kind=" + kv["kind"]);
  Parsed p;
  try {
    p.space.q = static_cast<std::uint32_t>(std::stoul(kv.at("q")));
    p.space.d1 = kv.count("d1") ? std::stoi(kv["d1"]) : 2;
    p.space.d2 = kv.count("d2") ? std::stoi(kv["d2"]) : 2;
  } catch (const std::exception&) {
    fail(1, "header needs numeric q, d1, d2");
  }

  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::uint64_t> row;
    const char* ptr = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      std::uint64_t v = 0;
      const auto [next, ec] = std::from_chars(ptr, end, v);
      if (ec != std::errc()) fail(number, "expected an unsigned integer");
      row.push_back(v);
      if (next == end) break;
      if (*next != ',') fail(number, "fields must be comma-separated");
      ptr = next + 1;
    }
    if (row.size() != fields_without_mult + 1)
      fail(number, "expected " + std::to_string(fields_without_mult + 1) + " fields, found " + std::to_string(row.size()));
    p.rows.push_back(std::move(row));
  }
  return p;
}

std::uint32_t checked_mult(std::uint64_t m, std::size_t row) {
  if (m == 0 || m > kMaxMultiplicity) fail(row + 2, "multiplicity outside [1, 2^16]");
  return static_cast<std::uint32_t>(m);
}

Elem checked_elem(std::uint64_t v, std::uint32_t q, std::size_t row) {
  if (v >= q) fail(row + 2, "field element " + std::to_string(v) + " >= q");
  return static_cast<Elem>(v);
}

Line line_from_fields(std::uint64_t flag, Elem a, Elem b, std::size_t row) {
  if (flag == 0) return Line::sloped(a, b);
  if (flag == 1 && b == 0) return Line::upright(a);
  fail(row + 2, "line flag must be 0 (Y = aX + b) or 1 (X = a, b = 0)");
}

void write_line(std::ostream& out, const Line& l) {
  if (l.vertical)
    out << "1," << l.t << ",0";
  else
    out << "0," << l.s << ',' << l.t;
}

void write_hyperplane(std::ostream& out, const Hyperplane& h) {
  for (auto c : h.normal) out << c << ',';
  out << h.offset;
}

}  // namespace

void write_set(std::ostream& out, const PointSet& s) {
  header(out, s.space(), "points");
  const int dim = s.space().dim();
  for (std::size_t i = 0; i < s.support_size(); ++i) {
    const Coords c = decode_point(s.space(), s.ids()[i]);
    for (int j = 0; j < dim; ++j) out << c[j] << ',';
    out << s.multiplicity(i) << '\n';
  }
}

void write_set(std::ostream& out, const LinePairSet& s) {
  header(out, s.space(), "linepairs");
  for (std::size_t i = 0; i < s.support_size(); ++i) {
    const auto lp = linepair_from_id(s.space().q, s.ids()[i]);
    write_line(out, lp.first);
    out << ',';
    write_line(out, lp.second);
    out << ',' << s.multiplicity(i) << '\n';
  }
}

void write_set(std::ostream& out, const FieldSpec& field, const HyperplanePairSet& s) {
  header(out, s.space(), "hyperplanepairs");
  for (std::size_t i = 0; i < s.support_size(); ++i) {
    const auto h = hyperplanepair_from_id(field, s.space().d1, s.space().d2, s.ids()[i]);
    write_hyperplane(out, h.first);
    out << ',';
    write_hyperplane(out, h.second);
    out << ',' << s.multiplicity(i) << '\n';
  }
}

PointSet read_points(std::istream& in) {
  // Field count depends on the header, so parse the header first with a placeholder.
  std::string head;
  std::getline(in, head);
  std::istringstream probe(head);
  std::string tok;
  int d1 = 2, d2 = 2;
  while (probe >> tok) {
    if (tok.rfind("d1=", 0) == 0) d1 = std::atoi(tok.c_str() + 3);
    if (tok.rfind("d2=", 0) == 0) d2 = std::atoi(tok.c_str() + 3);
  }
  if (d1 < 1 || d1 > kMaxFactorDim || d2 < 0 || d2 > kMaxFactorDim) fail(1, "dimensions out of range");
  std::stringstream rest;
  rest << head << '\n' << in.rdbuf();
  auto p = parse(rest, "points", static_cast<std::size_t>(d1 + d2));
  std::vector<std::uint64_t> ids;
  std::vector<std::uint32_t> mult;
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    Elem c[2 * kMaxFactorDim];
    for (int j = 0; j < d1 + d2; ++j) c[j] = checked_elem(p.rows[r][j], p.space.q, r);
    ids.push_back(encode_point(p.space, std::span<const Elem>(c, static_cast<std::size_t>(d1 + d2))));
    mult.push_back(checked_mult(p.rows[r].back(), r));
  }
  return PointSet(p.space, std::move(ids), std::move(mult));
}

LinePairSet read_linepairs(std::istream& in) {
  auto p = parse(in, "linepairs", 6);
  const std::uint32_t q = p.space.q;
  std::vector<std::uint64_t> ids;
  std::vector<std::uint32_t> mult;
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    const auto& f = p.rows[r];
    const LinePair lp{line_from_fields(f[0], checked_elem(f[1], q, r), checked_elem(f[2], q, r), r),
                      line_from_fields(f[3], checked_elem(f[4], q, r), checked_elem(f[5], q, r), r)};
    ids.push_back(linepair_id(q, lp));
    mult.push_back(checked_mult(f[6], r));
  }
  return LinePairSet(Space{q, 2, 2}, std::move(ids), std::move(mult));
}

HyperplanePairSet read_hyperplanepairs(std::istream& in, const FieldSpec& field) {
  std::string head;
  std::getline(in, head);
  std::istringstream probe(head);
  std::string tok;
  int d1 = 2, d2 = 2;
  while (probe >> tok) {
    if (tok.rfind("d1=", 0) == 0) d1 = std::atoi(tok.c_str() + 3);
    if (tok.rfind("d2=", 0) == 0) d2 = std::atoi(tok.c_str() + 3);
  }
  if (d1 < 1 || d1 > kMaxFactorDim || d2 < 1 || d2 > kMaxFactorDim) fail(1, "dimensions out of range");
  std::stringstream rest;
  rest << head << '\n' << in.rdbuf();
  auto p = parse(rest, "hyperplanepairs", static_cast<std::size_t>(d1 + d2 + 2));
  if (p.space.q != field.q()) fail(1, "q does not match the field");
  std::vector<std::uint64_t> ids;
  std::vector<std::uint32_t> mult;
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    const auto& f = p.rows[r];
    std::vector<Elem> n1, n2;
    for (int j = 0; j < d1; ++j) n1.push_back(checked_elem(f[j], field.q(), r));
    const Elem c1 = checked_elem(f[d1], field.q(), r);
    for (int j = 0; j < d2; ++j) n2.push_back(checked_elem(f[d1 + 1 + j], field.q(), r));
    const Elem c2 = checked_elem(f[d1 + 1 + d2], field.q(), r);
    try {
      ids.push_back(hyperplanepair_id(field, {make_hyperplane(field, n1, c1), make_hyperplane(field, n2, c2)}));
    } catch (const std::invalid_argument& e) {
      fail(r + 2, e.what());
    }
    mult.push_back(checked_mult(f.back(), r));
  }
  return HyperplanePairSet(p.space, std::move(ids), std::move(mult));
}

}  // namespace ffincidence
