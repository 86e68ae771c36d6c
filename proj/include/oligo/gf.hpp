// Small finite fields GF(p^e) with table arithmetic.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oligo {

// Returns (p, e) with q = p^e, or (0, 0) if q is not a prime power.
inline std::pair<int, int> prime_power(int q) {
  if (q < 2) return {0, 0};
  int p = 2;
  while (q % p != 0) ++p;
  int e = 0, r = q;
  while (r % p == 0) {
    r /= p;
    ++e;
  }
  if (r != 1) return {0, 0};
  return {p, e};
}

inline bool is_prime_power(int q) { return prime_power(q).first != 0; }

class GF {
 public:
  GF() = default;

  explicit GF(int q) : q_(q) {
    auto [p, e] = prime_power(q);
    if (p == 0) throw std::invalid_argument("field order " + std::to_string(q) + " is not a prime power");
    if (q > 256) throw std::invalid_argument("field order too large");
    p_ = p;
    e_ = e;
    add_.assign(q * q, 0);
    mul_.assign(q * q, 0);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) add_[a * q + b] = digit_add(a, b);
    std::vector<int> modulus = find_irreducible();
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) mul_[a * q + b] = poly_mul(a, b, modulus);
    neg_.assign(q, 0);
    inv_.assign(q, 0);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        if (add(a, b) == 0) neg_[a] = b;
        if (mul(a, b) == 1) inv_[a] = b;
      }
    for (int g = 1; g < q; ++g) {
      int x = 1, ord = 0;
      do {
        x = mul(x, g);
        ++ord;
      } while (x != 1);
      if (ord == q - 1) {
        primitive_ = g;
        break;
      }
    }
  }

  int order() const { return q_; }
  int characteristic() const { return p_; }
  int add(int a, int b) const { return add_[a * q_ + b]; }
  int sub(int a, int b) const { return add(a, neg_[b]); }
  int mul(int a, int b) const { return mul_[a * q_ + b]; }
  int neg(int a) const { return neg_[a]; }
  int inv(int a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    return inv_[a];
  }
  int primitive() const { return primitive_; }

 private:
  int q_ = 0, p_ = 0, e_ = 0, primitive_ = 1;
  std::vector<int> add_, mul_, neg_, inv_;

  int digit_add(int a, int b) const {
    int r = 0, scale = 1;
    for (int i = 0; i < e_; ++i) {
      r += ((a % p_ + b % p_) % p_) * scale;
      a /= p_;
      b /= p_;
      scale *= p_;
    }
    return r;
  }

  std::vector<int> digits(int a) const {
    std::vector<int> d(e_);
    for (int i = 0; i < e_; ++i) {
      d[i] = a % p_;
      a /= p_;
    }
    return d;
  }

  // Product of two polynomials of degree < e reduced by a monic modulus of degree e.
  int poly_mul(int a, int b, const std::vector<int>& modulus) const {
    auto da = digits(a), db = digits(b);
    std::vector<int> prod(2 * e_, 0);
    for (int i = 0; i < e_; ++i)
      for (int j = 0; j < e_; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
    for (int k = 2 * e_ - 1; k >= e_; --k) {
      int c = prod[k];
      if (c == 0) continue;
      for (int i = 0; i <= e_; ++i) prod[k - e_ + i] = ((prod[k - e_ + i] - c * modulus[i]) % p_ + p_) % p_;
    }
    int r = 0, scale = 1;
    for (int i = 0; i < e_; ++i) {
      r += prod[i] * scale;
      scale *= p_;
    }
    return r;
  }

  // Smallest monic irreducible polynomial of degree e over GF(p) (coefficients low to high).
  std::vector<int> find_irreducible() const {
    if (e_ == 1) return {0, 1};
    int total = 1;
    for (int i = 0; i < e_; ++i) total *= p_;
    for (int code = 0; code < total; ++code) {
      std::vector<int> m(e_ + 1, 0);
      int c = code;
      for (int i = 0; i < e_; ++i) {
        m[i] = c % p_;
        c /= p_;
      }
      m[e_] = 1;
      if (irreducible(m)) return m;
    }
    throw std::logic_error("no irreducible polynomial found");
  }

  bool irreducible(const std::vector<int>& m) const {
    // trial division by all monic polynomials of degree 1..e/2
    int deg = static_cast<int>(m.size()) - 1;
    for (int d = 1; d <= deg / 2; ++d) {
      int count = 1;
      for (int i = 0; i < d; ++i) count *= p_;
      for (int code = 0; code < count; ++code) {
        std::vector<int> f(d + 1, 0);
        int c = code;
        for (int i = 0; i < d; ++i) {
          f[i] = c % p_;
          c /= p_;
        }
        f[d] = 1;
        std::vector<int> r = m;
        for (int k = deg; k >= d; --k) {
          int lead = r[k];
          if (lead == 0) continue;
          for (int i = 0; i <= d; ++i) r[k - d + i] = ((r[k - d + i] - lead * f[i]) % p_ + p_) % p_;
        }
        bool zero = true;
        for (int i = 0; i < d; ++i)
          if (r[i] != 0) zero = false;
        if (zero) return false;
      }
    }
    return true;
  }
};

}  // namespace oligo
