#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ffincidence {

/// Field element encoding: an integer in [0, q) read as base-p digits, digit i
/// being the coefficient of x^i. For prime fields it is the residue itself.
using Elem = std::uint32_t;

/// Largest supported field order.
inline constexpr std::uint32_t kMaxFieldOrder = 1u << 20;
/// Fields at or below this order get log/antilog and inverse tables.
inline constexpr std::uint32_t kTableFieldOrder = 1u << 12;

bool is_prime(std::uint64_t n);

/// Exact arithmetic in GF(p^k), 1 <= k <= 4, p^k <= 2^20.
///
/// Immutable after construction. The modulus is the lexicographically
/// smallest monic irreducible of degree k, coefficients compared from the
/// constant term upwards, so two builds of the same (p, k) are identical.
class FieldSpec {
public:
  FieldSpec(std::uint32_t p, unsigned k);

  std::uint32_t p() const { return p_; }
  unsigned k() const { return k_; }
  std::uint32_t q() const { return q_; }
  /// Monic modulus, coefficients low-to-high including the leading 1. Empty for k == 1.
  const std::vector<Elem>& modulus() const { return modulus_; }
  bool tabulated() const { return !inv_.empty(); }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }

  Elem add(Elem a, Elem b) const {
    if (k_ == 1) {
      const Elem s = a + b;
      return s >= p_ ? s - p_ : s;
    }
    if (p_ == 2) return a ^ b;
    return add_digits(a, b);
  }
  Elem neg(Elem a) const {
    if (k_ == 1) return a == 0 ? 0 : p_ - a;
    if (p_ == 2) return a;
    return neg_digits(a);
  }
  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }

  Elem mul(Elem a, Elem b) const {
    if (k_ == 1) return static_cast<Elem>(static_cast<std::uint64_t>(a) * b % p_);
    if (a == 0 || b == 0) return 0;
    if (!exp_.empty()) return exp_[log_[a] + log_[b]];
    return mul_poly(a, b);
  }
  /// Throws std::domain_error for a == 0.
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, std::uint64_t e) const;

  /// Table-free arithmetic, kept callable so the two paths can be compared.
  Elem mul_untabled(Elem a, Elem b) const;
  Elem inv_untabled(Elem a) const;

  /// Dot product of equal-length coordinate vectors.
  Elem dot(std::span<const Elem> x, std::span<const Elem> y) const;

  bool operator==(const FieldSpec& other) const = default;

private:
  Elem add_digits(Elem a, Elem b) const;
  Elem neg_digits(Elem a) const;
  Elem mul_poly(Elem a, Elem b) const;
  void build_tables();

  std::uint32_t p_;
  unsigned k_;
  std::uint32_t q_;
  std::vector<Elem> modulus_;
  // exp_ has length 2(q-1) so log sums never need a reduction.
  std::vector<Elem> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<Elem> inv_;
};

/// Builds GF(p^k); throws std::invalid_argument for a non-prime p, k outside
/// [1, 4], or p^k above the size cap.
FieldSpec build_field(std::uint32_t p, unsigned k);

/// Builds the field of order q; throws std::invalid_argument when q is not a
/// supported prime power.
FieldSpec field_of_order(std::uint64_t q);

/// Monic polynomial over GF(p) given low-to-high with the leading 1 included.
bool is_irreducible(std::span<const std::uint32_t> monic, std::uint32_t p);

}  // namespace ffincidence
