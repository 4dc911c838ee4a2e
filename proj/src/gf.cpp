#include "ffincidence/gf.hpp"

#include <string>

namespace ffincidence {

namespace {

using Poly = std::vector<std::uint32_t>;

std::uint32_t inv_mod_prime(std::uint32_t a, std::uint32_t p) {
  // Extended Euclid on (a, p); p is prime so gcd is 1 for a != 0.
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = p, new_r = a;
  while (new_r != 0) {
    const std::int64_t quotient = r / new_r;
    t -= quotient * new_t;
    std::swap(t, new_t);
    r -= quotient * new_r;
    std::swap(r, new_r);
  }
  if (t < 0) t += p;
  return static_cast<std::uint32_t>(t);
}

// Remainder of num modulo a monic divisor, both low-to-high.
Poly poly_mod(Poly num, const Poly& monic, std::uint32_t p) {
  const std::size_t dd = monic.size() - 1;
  while (num.size() > dd) {
    const std::uint64_t lead = num.back();
    if (lead != 0) {
      const std::size_t shift = num.size() - 1 - dd;
      for (std::size_t i = 0; i < dd; ++i) {
        const std::uint64_t sub = lead * monic[i] % p;
        num[shift + i] = static_cast<std::uint32_t>((num[shift + i] + p - sub) % p);
      }
    }
    num.pop_back();
  }
  return num;
}

bool all_zero(const Poly& v) {
  for (auto c : v)
    if (c != 0) return false;
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t f = 2; f * f <= n; ++f) {
    if (n % f == 0) {
      out.push_back(f);
      while (n % f == 0) n /= f;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t f = 2; f * f <= n; ++f)
    if (n % f == 0) return false;
  return true;
}

bool is_irreducible(std::span<const std::uint32_t> monic, std::uint32_t p) {
  const std::size_t degree = monic.size() - 1;
  if (degree == 0) return false;
  if (degree == 1) return true;
  const Poly target(monic.begin(), monic.end());
  // Trial division by every monic polynomial of degree 1..degree/2.
  for (std::size_t d = 1; d <= degree / 2; ++d) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= p;
    for (std::uint64_t code = 0; code < count; ++code) {
      Poly divisor(d + 1, 0);
      std::uint64_t c = code;
      for (std::size_t i = 0; i < d; ++i) {
        divisor[i] = static_cast<std::uint32_t>(c % p);
        c /= p;
      }
      divisor[d] = 1;
      if (all_zero(poly_mod(target, divisor, p))) return false;
    }
  }
  return true;
}

FieldSpec::FieldSpec(std::uint32_t p, unsigned k) : p_(p), k_(k), q_(1) {
  if (!is_prime(p)) throw std::invalid_argument("non-prime characteristic " + std::to_string(p));
  if (k < 1 || k > 4) throw std::invalid_argument("extension degree " + std::to_string(k) + " outside [1, 4]");
  std::uint64_t q = 1;
  for (unsigned i = 0; i < k; ++i) {
    q *= p;
    if (q > kMaxFieldOrder)
      throw std::invalid_argument("field order exceeds cap 2^20");
  }
  q_ = static_cast<std::uint32_t>(q);

  if (k > 1) {
    // Candidates ordered by (c0, c1, ..., c_{k-1}) with c0 most significant.
    const std::uint64_t count = q;
    for (std::uint64_t code = 0; code < count; ++code) {
      Poly cand(k + 1, 0);
      std::uint64_t c = code;
      for (int i = static_cast<int>(k) - 1; i >= 0; --i) {
        cand[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(c % p);
        c /= p;
      }
      cand[k] = 1;
      if (is_irreducible(cand, p)) {
        modulus_ = std::move(cand);
        break;
      }
    }
  }
  if (q_ <= kTableFieldOrder) build_tables();
}

Elem FieldSpec::add_digits(Elem a, Elem b) const {
  Elem out = 0, scale = 1;
  for (unsigned i = 0; i < k_; ++i) {
    Elem s = a % p_ + b % p_;
    if (s >= p_) s -= p_;
    out += s * scale;
    scale *= p_;
    a /= p_;
    b /= p_;
  }
  return out;
}

Elem FieldSpec::neg_digits(Elem a) const {
  Elem out = 0, scale = 1;
  for (unsigned i = 0; i < k_; ++i) {
    const Elem d = a % p_;
    out += (d == 0 ? 0 : p_ - d) * scale;
    scale *= p_;
    a /= p_;
  }
  return out;
}

Elem FieldSpec::mul_poly(Elem a, Elem b) const {
  Poly x(k_), y(k_);
  for (unsigned i = 0; i < k_; ++i) {
    x[i] = a % p_;
    y[i] = b % p_;
    a /= p_;
    b /= p_;
  }
  Poly prod(2 * k_ - 1, 0);
  for (unsigned i = 0; i < k_; ++i)
    for (unsigned j = 0; j < k_; ++j)
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + static_cast<std::uint64_t>(x[i]) * y[j]) % p_);
  const Poly r = poly_mod(std::move(prod), modulus_, p_);
  Elem out = 0;
  for (std::size_t i = r.size(); i-- > 0;) out = out * p_ + r[i];
  return out;
}

Elem FieldSpec::mul_untabled(Elem a, Elem b) const {
  if (k_ == 1) return static_cast<Elem>(static_cast<std::uint64_t>(a) * b % p_);
  return mul_poly(a, b);
}

Elem FieldSpec::inv_untabled(Elem a) const {
  if (a == 0) throw std::domain_error("inverse of zero");
  if (k_ == 1) return inv_mod_prime(a, p_);
  // a^(q-2) by square-and-multiply on the polynomial path.
  Elem result = 1, base = a;
  for (std::uint64_t e = q_ - 2; e > 0; e >>= 1) {
    if (e & 1) result = mul_poly(result, base);
    base = mul_poly(base, base);
  }
  return result;
}

Elem FieldSpec::inv(Elem a) const {
  if (a == 0) throw std::domain_error("inverse of zero");
  if (!inv_.empty()) return inv_[a];
  return inv_untabled(a);
}

Elem FieldSpec::pow(Elem a, std::uint64_t e) const {
  Elem result = 1, base = a;
  for (; e > 0; e >>= 1) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
  }
  return result;
}

Elem FieldSpec::dot(std::span<const Elem> x, std::span<const Elem> y) const {
  if (x.size() != y.size()) throw std::invalid_argument("dot: dimension mismatch");
  Elem acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) acc = add(acc, mul(x[i], y[i]));
  return acc;
}

void FieldSpec::build_tables() {
  const std::uint32_t order = q_ - 1;
  if (k_ > 1) {
    const auto factors = prime_factors(order);
    Elem generator = 0;
    for (Elem g = 2; g < q_ && generator == 0; ++g) {
      bool primitive = true;
      for (auto r : factors) {
        Elem acc = 1, base = g;
        for (std::uint64_t e = order / r; e > 0; e >>= 1) {
          if (e & 1) acc = mul_poly(acc, base);
          base = mul_poly(base, base);
        }
        if (acc == 1) {
          primitive = false;
          break;
        }
      }
      if (primitive) generator = g;
    }
    exp_.assign(2 * static_cast<std::size_t>(order), 0);
    log_.assign(q_, 0);
    Elem x = 1;
    for (std::uint32_t i = 0; i < order; ++i) {
      exp_[i] = x;
      exp_[i + order] = x;
      log_[x] = i;
      x = mul_poly(x, generator);
    }
  }
  inv_.assign(q_, 0);
  for (Elem a = 1; a < q_; ++a) inv_[a] = inv_untabled(a);
}

FieldSpec build_field(std::uint32_t p, unsigned k) { return FieldSpec(p, k); }

FieldSpec field_of_order(std::uint64_t q) {
  if (q >= 2 && q <= kMaxFieldOrder) {
    std::uint64_t p = 2;
    while (q % p != 0) ++p;
    unsigned k = 0;
    std::uint64_t rest = q;
    while (rest % p == 0) {
      rest /= p;
      ++k;
    }
    if (rest == 1 && k <= 4) return FieldSpec(static_cast<std::uint32_t>(p), k);
  }
  throw std::invalid_argument("unsupported field order " + std::to_string(q));
}

}  // namespace ffincidence
