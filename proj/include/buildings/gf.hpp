#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "buildings/error.hpp"

namespace buildings {

// Exact arithmetic in GF(q) for the small parameter fields of root groups.
// Prime fields use residues; the extension fields {4,8,9,16,25,27} use a
// fixed irreducible polynomial each (listed in irreducible_poly below), with
// elements encoded as little-endian base-p coefficient integers.  That
// integer encoding is also the serialized form.
class FieldSpec {
 public:
  explicit FieldSpec(int q) : q_(q) {
    p_ = smallest_prime_factor(q);
    deg_ = 0;
    for (int x = q; x > 1; x /= p_) {
      if (x % p_ != 0) fail(Errc::schema, "q must be a prime power");
      ++deg_;
    }
    if (deg_ == 1) {
      if (q_ > 31) fail(Errc::schema, "prime fields supported up to q = 31");
    } else if (q_ != 4 && q_ != 8 && q_ != 9 && q_ != 16 && q_ != 25 && q_ != 27) {
      fail(Errc::schema, "extension field GF(" + std::to_string(q_) + ") not supported");
    }
    build_tables();
  }

  int q() const { return q_; }
  int p() const { return p_; }
  int degree() const { return deg_; }

  int add(int a, int b) const { return add_[check(a) * q_ + check(b)]; }
  int neg(int a) const { return neg_[check(a)]; }
  int sub(int a, int b) const { return add(a, neg(b)); }
  int mul(int a, int b) const { return mul_[check(a) * q_ + check(b)]; }
  int inv(int a) const {
    if (check(a) == 0) fail(Errc::division_by_zero, "inverse of 0");
    return inv_[a];
  }
  int div(int a, int b) const { return mul(a, inv(b)); }
  int generator() const { return gen_; }

  // x -> x^(p^k), the Frobenius powers; k = 0..degree-1 are all field
  // automorphisms.
  int frobenius(int a, int k) const {
    check(a);
    int r = a;
    for (int i = 0; i < k % deg_; ++i) {
      int acc = r;
      for (int j = 1; j < p_; ++j) acc = mul(acc, r);  // r^p
      r = acc;
    }
    return r;
  }

  int automorphism_count() const { return deg_; }

  std::vector<int> all_elements() const {
    std::vector<int> out(q_);
    for (int i = 0; i < q_; ++i) out[i] = i;
    return out;
  }

  // Coefficients of the fixed irreducible polynomial, little endian, monic of
  // degree `degree()`; empty for prime fields.
  const std::vector<int>& modulus() const { return poly_; }

 private:
  int check(int a) const {
    if (a < 0 || a >= q_) fail(Errc::field_mismatch, "value out of range for GF(" + std::to_string(q_) + ")");
    return a;
  }

  static int smallest_prime_factor(int q) {
    if (q < 2) fail(Errc::schema, "q must be at least 2");
    for (int d = 2; d * d <= q; ++d)
      if (q % d == 0) return d;
    return q;
  }

  static std::vector<int> irreducible_poly(int p, int deg) {
    // x^2+x+1 over GF(2); x^3+x+1 over GF(2); x^4+x+1 over GF(2);
    // x^2+1 over GF(3); x^3+2x+1 over GF(3); x^2+x+1 over GF(5).
    if (p == 2 && deg == 2) return {1, 1, 1};
    if (p == 2 && deg == 3) return {1, 1, 0, 1};
    if (p == 2 && deg == 4) return {1, 1, 0, 0, 1};
    if (p == 3 && deg == 2) return {1, 0, 1};
    if (p == 3 && deg == 3) return {1, 2, 0, 1};
    if (p == 5 && deg == 2) return {1, 1, 1};
    fail(Errc::schema, "no fixed irreducible polynomial for this field");
  }

  std::vector<int> to_poly(int a) const {
    std::vector<int> c(deg_);
    for (int i = 0; i < deg_; ++i) {
      c[i] = a % p_;
      a /= p_;
    }
    return c;
  }
  int from_poly(const std::vector<int>& c) const {
    int a = 0;
    for (int i = deg_ - 1; i >= 0; --i) a = a * p_ + c[i];
    return a;
  }

  void build_tables() {
    add_.resize(q_ * q_);
    mul_.resize(q_ * q_);
    neg_.resize(q_);
    inv_.assign(q_, 0);
    if (deg_ == 1) {
      for (int a = 0; a < q_; ++a) {
        neg_[a] = (q_ - a) % q_;
        for (int b = 0; b < q_; ++b) {
          add_[a * q_ + b] = (a + b) % q_;
          mul_[a * q_ + b] = (a * b) % q_;
        }
      }
    } else {
      poly_ = irreducible_poly(p_, deg_);
      for (int a = 0; a < q_; ++a) {
        auto ca = to_poly(a);
        std::vector<int> cn(deg_);
        for (int i = 0; i < deg_; ++i) cn[i] = (p_ - ca[i]) % p_;
        neg_[a] = from_poly(cn);
        for (int b = 0; b < q_; ++b) {
          auto cb = to_poly(b);
          std::vector<int> cs(deg_);
          for (int i = 0; i < deg_; ++i) cs[i] = (ca[i] + cb[i]) % p_;
          add_[a * q_ + b] = from_poly(cs);
          // product modulo the irreducible polynomial
          std::vector<int> prod(2 * deg_ - 1, 0);
          for (int i = 0; i < deg_; ++i)
            for (int j = 0; j < deg_; ++j) prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p_;
          for (int d = 2 * deg_ - 2; d >= deg_; --d) {
            int c = prod[d];
            if (c == 0) continue;
            prod[d] = 0;
            for (int i = 0; i < deg_; ++i)
              prod[d - deg_ + i] = ((prod[d - deg_ + i] - c * poly_[i]) % p_ + p_ * p_) % p_;
          }
          prod.resize(deg_);
          mul_[a * q_ + b] = from_poly(prod);
        }
      }
    }
    for (int a = 1; a < q_; ++a)
      for (int b = 1; b < q_; ++b)
        if (mul_[a * q_ + b] == 1) inv_[a] = b;
    // multiplicative generator: smallest element of order q-1
    gen_ = 0;
    for (int g = 1; g < q_ && gen_ == 0; ++g) {
      int x = g, ord = 1;
      while (x != 1) {
        x = mul_[x * q_ + g];
        ++ord;
      }
      if (ord == q_ - 1) gen_ = g;
    }
    // table consistency: g^(q-1) = 1 and no earlier power is 1
    int x = gen_;
    for (int k = 1; k < q_ - 1; ++k) {
      if (x == 1) fail(Errc::schema, "generator order check failed");
      x = mul_[x * q_ + gen_];
    }
    if (x != 1) fail(Errc::schema, "generator order check failed");
  }

  int q_ = 0, p_ = 0, deg_ = 0, gen_ = 0;
  std::vector<int> add_, mul_, neg_, inv_, poly_;
};

// Shared immutable field registry: one table set per q.
inline const FieldSpec& field(int q) {
  static std::vector<std::unique_ptr<FieldSpec>> cache;
  static std::mutex m;
  std::lock_guard<std::mutex> lock(m);
  for (auto& f : cache)
    if (f->q() == q) return *f;
  cache.push_back(std::make_unique<FieldSpec>(q));
  return *cache.back();
}

}  // namespace buildings
