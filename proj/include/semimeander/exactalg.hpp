#pragma once

// Exact arithmetic substrate: big integers, rationals, Laurent polynomials in
// one variable, dense integer polynomials, and fraction-free determinants.

#include <gmpxx.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace semimeander {

using Integer = mpz_class;
using Rational = mpq_class;

template <class R>
using Matrix = std::vector<std::vector<R>>;

inline Integer binomial(unsigned long n, unsigned long k) {
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

inline Integer ipow(const Integer& base, unsigned long e) {
  Integer out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

inline Rational rpow(const Rational& base, long e) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(e < 0 ? -e : e));
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(e < 0 ? -e : e));
  out.canonicalize();
  if (e < 0) {
    if (out == 0) throw std::domain_error("rpow: zero to a negative power");
    out = 1 / out;
  }
  return out;
}

// ---------------------------------------------------------------------------
// LaurentPoly: sparse element of Z[x, x^-1], no stored zero coefficients.

class LaurentPoly {
 public:
  using Terms = std::map<long, Integer>;

  LaurentPoly() = default;
  LaurentPoly(long c) { add_term(0, Integer(c)); }  // NOLINT: constants convert
  LaurentPoly(const Integer& c) { add_term(0, c); }  // NOLINT

  static LaurentPoly monomial(const Integer& c, long e) {
    LaurentPoly p;
    p.add_term(e, c);
    return p;
  }

  static LaurentPoly from_terms(const std::vector<std::pair<long, Integer>>& terms) {
    LaurentPoly p;
    for (const auto& [e, c] : terms) p.add_term(e, c);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  bool is_monomial() const { return terms_.size() == 1; }

  long min_exponent() const {
    if (is_zero()) throw std::domain_error("min_exponent of zero polynomial");
    return terms_.begin()->first;
  }
  long max_exponent() const {
    if (is_zero()) throw std::domain_error("max_exponent of zero polynomial");
    return terms_.rbegin()->first;
  }

  Integer coefficient(long e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Integer(0) : it->second;
  }

  LaurentPoly& operator+=(const LaurentPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  LaurentPoly& operator-=(const LaurentPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  LaurentPoly operator-() const {
    LaurentPoly out = *this;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
  }
  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly out;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) out.add_term(ea + eb, ca * cb);
    return out;
  }
  LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }

  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) { return !(a == b); }

  LaurentPoly pow(unsigned long e) const {
    LaurentPoly result(1L), base = *this;
    while (e) {
      if (e & 1UL) result *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return result;
  }

  // x -> x^-1
  LaurentPoly invert_variable() const { return substitute_power(-1); }

  // x -> x^k
  LaurentPoly substitute_power(long k) const {
    LaurentPoly out;
    for (const auto& [e, c] : terms_) out.add_term(e * k, c);
    return out;
  }

  bool exponents_divisible_by(long k) const {
    return std::all_of(terms_.begin(), terms_.end(), [k](const auto& t) { return t.first % k == 0; });
  }

  // x^k -> y; requires every exponent to be a multiple of k.
  LaurentPoly compress(long k) const {
    if (!exponents_divisible_by(k)) throw std::domain_error("compress: exponent not a multiple of k");
    LaurentPoly out;
    for (const auto& [e, c] : terms_) out.add_term(e / k, c);
    return out;
  }

  LaurentPoly shifted(long k) const {
    LaurentPoly out;
    for (const auto& [e, c] : terms_) out.terms_.emplace(e + k, c);
    return out;
  }

  Rational evaluate(const Rational& x) const {
    Rational acc = 0;
    for (const auto& [e, c] : terms_) acc += Rational(c) * rpow(x, e);
    return acc;
  }

  // Highest power first, e.g. "v^6 - 2 + v^-6".
  std::string to_string(std::string_view var = "v") const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const long e = it->first;
      Integer c = it->second;
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      first = false;
      c = abs(c);
      if (e == 0) {
        os << c.get_str();
        continue;
      }
      if (c != 1) os << c.get_str() << "*";
      os << var;
      if (e != 1) os << "^" << e;
    }
    return os.str();
  }

 private:
  void add_term(long e, const Integer& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Terms terms_;
};

// ---------------------------------------------------------------------------
// TPoly: dense element of Z[T]; leading coefficient nonzero unless zero.

class TPoly {
 public:
  TPoly() = default;
  TPoly(long c) : coeffs_{Integer(c)} { trim(); }  // NOLINT
  TPoly(const Integer& c) : coeffs_{c} { trim(); }  // NOLINT
  explicit TPoly(std::vector<Integer> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static TPoly monomial(const Integer& c, std::size_t e) {
    std::vector<Integer> v(e + 1, Integer(0));
    v[e] = c;
    return TPoly(std::move(v));
  }

  // Requires all exponents >= 0.
  static TPoly from_laurent(const LaurentPoly& p) {
    if (p.is_zero()) return {};
    if (p.min_exponent() < 0) throw std::domain_error("from_laurent: negative exponent");
    std::vector<Integer> v(static_cast<std::size_t>(p.max_exponent()) + 1, Integer(0));
    for (const auto& [e, c] : p.terms()) v[static_cast<std::size_t>(e)] = c;
    return TPoly(std::move(v));
  }

  LaurentPoly to_laurent() const {
    LaurentPoly out;
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
      if (coeffs_[i] != 0) out += LaurentPoly::monomial(coeffs_[i], static_cast<long>(i));
    return out;
  }

  const std::vector<Integer>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  Integer coefficient(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Integer(0); }
  const Integer& leading() const { return coeffs_.back(); }

  TPoly& operator+=(const TPoly& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), Integer(0));
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    trim();
    return *this;
  }
  TPoly& operator-=(const TPoly& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), Integer(0));
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    trim();
    return *this;
  }
  TPoly operator-() const {
    TPoly out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
  }
  friend TPoly operator+(TPoly a, const TPoly& b) { return a += b; }
  friend TPoly operator-(TPoly a, const TPoly& b) { return a -= b; }
  friend TPoly operator*(const TPoly& a, const TPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Integer> out(a.coeffs_.size() + b.coeffs_.size() - 1, Integer(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
      if (a.coeffs_[i] == 0) continue;
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
        mpz_addmul(out[i + j].get_mpz_t(), a.coeffs_[i].get_mpz_t(), b.coeffs_[j].get_mpz_t());
    }
    return TPoly(std::move(out));
  }
  TPoly& operator*=(const TPoly& o) { return *this = *this * o; }

  friend bool operator==(const TPoly& a, const TPoly& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const TPoly& a, const TPoly& b) { return !(a == b); }

  TPoly pow(unsigned long e) const {
    TPoly result(1L), base = *this;
    while (e) {
      if (e & 1UL) result *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return result;
  }

  // Exact quotient over Z; throws if the division leaves a remainder.
  TPoly divexact(const TPoly& d) const {
    if (d.is_zero()) throw std::domain_error("TPoly division by zero");
    if (is_zero()) return {};
    if (degree() < d.degree()) throw std::domain_error("TPoly divexact: inexact division");
    std::vector<Integer> rem = coeffs_;
    const std::size_t dn = d.coeffs_.size();
    std::vector<Integer> q(rem.size() - dn + 1, Integer(0));
    Integer r;
    for (std::size_t k = q.size(); k-- > 0;) {
      Integer& top = rem[k + dn - 1];
      if (top == 0) continue;
      mpz_tdiv_qr(q[k].get_mpz_t(), r.get_mpz_t(), top.get_mpz_t(), d.leading().get_mpz_t());
      if (r != 0) throw std::domain_error("TPoly divexact: inexact division");
      for (std::size_t j = 0; j < dn; ++j)
        mpz_submul(rem[k + j].get_mpz_t(), q[k].get_mpz_t(), d.coeffs_[j].get_mpz_t());
    }
    for (const auto& c : rem)
      if (c != 0) throw std::domain_error("TPoly divexact: inexact division");
    return TPoly(std::move(q));
  }

  Rational evaluate(const Rational& x) const {
    Rational acc = 0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + Rational(coeffs_[i]);
    return acc;
  }

  // Keeps only even powers: T^2 -> S. Throws if an odd power is present.
  TPoly even_part_in_square() const {
    std::vector<Integer> out;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (i % 2 == 1) {
        if (coeffs_[i] != 0) throw std::domain_error("polynomial is not even in T");
        continue;
      }
      out.push_back(coeffs_[i]);
    }
    return TPoly(std::move(out));
  }

  std::string to_string(std::string_view var = "T") const { return to_laurent().to_string(var); }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  std::vector<Integer> coeffs_;
};

// ---------------------------------------------------------------------------
// Tagged ring element. Operations reject mixed-ring operands.

using RingElement = std::variant<Integer, Rational, LaurentPoly, TPoly>;

inline const char* ring_name(const RingElement& e) {
  switch (e.index()) {
    case 0: return "integer";
    case 1: return "rational";
    case 2: return "laurent";
    default: return "tpoly";
  }
}

namespace detail {
template <class Op>
RingElement same_ring(const RingElement& a, const RingElement& b, Op op) {
  if (a.index() != b.index())
    throw std::invalid_argument(std::string("mixed-ring operands: ") + ring_name(a) + " and " + ring_name(b));
  return std::visit(
      [&](const auto& x) -> RingElement {
        using X = std::decay_t<decltype(x)>;
        return RingElement(X(op(x, std::get<X>(b))));
      },
      a);
}
}  // namespace detail

inline RingElement add(const RingElement& a, const RingElement& b) {
  return detail::same_ring(a, b, [](const auto& x, const auto& y) { return x + y; });
}
inline RingElement sub(const RingElement& a, const RingElement& b) {
  return detail::same_ring(a, b, [](const auto& x, const auto& y) { return x - y; });
}
inline RingElement mul(const RingElement& a, const RingElement& b) {
  return detail::same_ring(a, b, [](const auto& x, const auto& y) { return x * y; });
}
inline RingElement neg(const RingElement& a) {
  return std::visit([](const auto& x) -> RingElement {
    using X = std::decay_t<decltype(x)>;
    return RingElement(X(-x));
  }, a);
}
inline RingElement power(const RingElement& a, unsigned long e) {
  return std::visit([e](const auto& x) -> RingElement {
    using X = std::decay_t<decltype(x)>;
    if constexpr (std::is_same_v<X, Integer>) return ipow(x, e);
    else if constexpr (std::is_same_v<X, Rational>) return rpow(x, static_cast<long>(e));
    else return x.pow(e);
  }, a);
}
inline bool is_zero(const RingElement& a) {
  return std::visit([](const auto& x) {
    using X = std::decay_t<decltype(x)>;
    if constexpr (std::is_same_v<X, Integer> || std::is_same_v<X, Rational>) return x == 0;
    else return x.is_zero();
  }, a);
}

inline std::string to_string(const RingElement& a) {
  return std::visit([](const auto& x) -> std::string {
    using X = std::decay_t<decltype(x)>;
    if constexpr (std::is_same_v<X, Integer> || std::is_same_v<X, Rational>) return x.get_str();
    else if constexpr (std::is_same_v<X, LaurentPoly>) return x.to_string("v");
    else return x.to_string("T");
  }, a);
}

// ---------------------------------------------------------------------------
// Fraction-free (Bareiss) elimination.

namespace detail {

inline bool zero(const Integer& x) { return x == 0; }
inline bool zero(const TPoly& x) { return x.is_zero(); }
inline Integer divexact(const Integer& a, const Integer& b) {
  Integer q;
  mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}
inline TPoly divexact(const TPoly& a, const TPoly& b) { return a.divexact(b); }

template <class R>
R bareiss(Matrix<R> m) {
  const std::size_t n = m.size();
  if (n == 0) return R(1L);
  bool negate = false;
  R prev(1L);
  for (std::size_t k = 0; k < n; ++k) {
    if (zero(m[k][k])) {
      std::size_t pivot = k + 1;
      while (pivot < n && zero(m[pivot][k])) ++pivot;
      if (pivot == n) return R();
      std::swap(m[k], m[pivot]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        R t = m[k][k] * m[i][j] - m[i][k] * m[k][j];
        m[i][j] = k == 0 ? std::move(t) : divexact(t, prev);
      }
    }
    prev = m[k][k];
  }
  return negate ? R(-m[n - 1][n - 1]) : m[n - 1][n - 1];
}

template <class R>
void require_square(const Matrix<R>& m) {
  for (const auto& row : m)
    if (row.size() != m.size()) throw std::invalid_argument("determinant of a non-square matrix");
}

// Row and column shifts that move every entry of a Laurent matrix into Z[x].
// Returns the total shift s with det(m) = det(shifted) * x^s.
inline long shift_to_polynomial(Matrix<LaurentPoly>& m) {
  const std::size_t n = m.size();
  long total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    long lo = 0;
    for (const auto& e : m[i]) {
      if (e.is_zero()) continue;
      lo = any ? std::min(lo, e.min_exponent()) : e.min_exponent();
      any = true;
    }
    if (!any) continue;
    for (auto& e : m[i]) e = e.shifted(-lo);
    total += lo;
  }
  for (std::size_t j = 0; j < n; ++j) {
    bool any = false;
    long lo = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m[i][j].is_zero()) continue;
      lo = any ? std::min(lo, m[i][j].min_exponent()) : m[i][j].min_exponent();
      any = true;
    }
    if (!any || lo == 0) continue;
    for (std::size_t i = 0; i < n; ++i) m[i][j] = m[i][j].shifted(-lo);
    total += lo;
  }
  return total;
}

}  // namespace detail

inline Integer det_fraction_free(const Matrix<Integer>& m) {
  detail::require_square(m);
  return detail::bareiss(m);
}

inline TPoly det_fraction_free(const Matrix<TPoly>& m) {
  detail::require_square(m);
  return detail::bareiss(m);
}

// Over a field no fractions appear anyway; plain elimination.
inline Rational det_fraction_free(Matrix<Rational> m) {
  detail::require_square(m);
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && m[pivot][k] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != k) {
      std::swap(m[k], m[pivot]);
      det = -det;
    }
    det *= m[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m[i][k] == 0) continue;
      Rational f = m[i][k] / m[k][k];
      for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
    }
  }
  return det;
}

// Clears to Z[x] by a common shift, runs Bareiss, restores the shift.
inline LaurentPoly det_fraction_free(Matrix<LaurentPoly> m) {
  detail::require_square(m);
  const long shift = detail::shift_to_polynomial(m);
  Matrix<TPoly> poly(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& e : m[i]) poly[i].push_back(TPoly::from_laurent(e));
  return detail::bareiss(std::move(poly)).to_laurent().shifted(shift);
}

inline RingElement det_fraction_free(const Matrix<RingElement>& m) {
  detail::require_square(m);
  if (m.empty()) return Integer(1);
  const std::size_t kind = m[0][0].index();
  for (const auto& row : m)
    for (const auto& e : row)
      if (e.index() != kind) throw std::invalid_argument("determinant of a mixed-ring matrix");
  auto unwrap = [&m](auto tag) {
    using X = decltype(tag);
    Matrix<X> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      for (const auto& e : m[i]) out[i].push_back(std::get<X>(e));
    return out;
  };
  switch (kind) {
    case 0: return det_fraction_free(unwrap(Integer()));
    case 1: return det_fraction_free(unwrap(Rational()));
    case 2: return det_fraction_free(unwrap(LaurentPoly()));
    default: return det_fraction_free(unwrap(TPoly()));
  }
}

// ---------------------------------------------------------------------------
// Multimodular determinant of a Laurent matrix: evaluate at small integer
// points modulo 62-bit primes, interpolate, and lift by CRT until a proven
// coefficient bound is covered. Same result as det_fraction_free.

namespace modular {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

struct Montgomery {
  u64 n, inv, r2;  // inv = -n^{-1} mod 2^64, r2 = 2^128 mod n

  explicit Montgomery(u64 mod) : n(mod) {
    u64 x = 1;
    for (int i = 0; i < 6; ++i) x *= 2 - n * x;
    inv = ~x + 1;
    r2 = static_cast<u64>((static_cast<u128>(1) << 64) % n);
    r2 = static_cast<u64>(static_cast<u128>(r2) * r2 % n);
  }
  u64 reduce(u128 t) const {
    const u64 m = static_cast<u64>(t) * inv;
    const u128 s = t + static_cast<u128>(m) * n;
    u64 res = static_cast<u64>(s >> 64);
    return res >= n ? res - n : res;
  }
  u64 mul(u64 a, u64 b) const { return reduce(static_cast<u128>(a) * b); }
  u64 to(u64 a) const { return mul(a % n, r2); }
  u64 from(u64 a) const { return reduce(a); }
  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= n ? s - n : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + n - b; }
  u64 pow(u64 a, u64 e) const {
    u64 r = to(1);
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  u64 inverse(u64 a) const { return pow(a, n - 2); }
};

inline u64 mod_of(const Integer& x, u64 p) {
  return static_cast<u64>(mpz_fdiv_ui(x.get_mpz_t(), p));
}

// Determinant of a dense matrix (Montgomery form, row-major) by elimination.
inline u64 det_mod(std::vector<u64>& a, std::size_t n, const Montgomery& M) {
  u64 det = M.to(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && a[piv * n + k] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      det = M.sub(0, det);
    }
    const u64 pv = a[k * n + k];
    det = M.mul(det, pv);
    const u64 pinv = M.inverse(pv);
    const u64* rowk = &a[k * n];
    for (std::size_t i = k + 1; i < n; ++i) {
      u64* rowi = &a[i * n];
      if (rowi[k] == 0) continue;
      const u64 f = M.mul(rowi[k], pinv);
      for (std::size_t j = k + 1; j < n; ++j) rowi[j] = M.sub(rowi[j], M.mul(f, rowk[j]));
    }
  }
  return det;
}

// Minimum-cost perfect assignment (Hungarian, O(n^3)). cost[i][j] = nullopt
// marks a forbidden cell; returns nullopt when no perfect matching exists.
inline std::optional<long> min_assignment(const std::vector<std::vector<std::optional<long>>>& cost) {
  const std::size_t n = cost.size();
  if (n == 0) return 0L;
  long lo = 0, hi = 0;
  for (const auto& row : cost)
    for (const auto& c : row)
      if (c) lo = std::min(lo, *c), hi = std::max(hi, *c);
  const long big = (hi - lo + 1) * static_cast<long>(n + 1) + 1;
  auto at = [&](std::size_t i, std::size_t j) { return cost[i][j] ? *cost[i][j] - lo : big; };
  const long inf = std::numeric_limits<long>::max() / 4;
  std::vector<long> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<long> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      long delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) u[p[j]] += delta, v[j] -= delta;
        else minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  long total = 0;
  for (std::size_t j = 1; j <= n; ++j) {
    const auto& c = cost[p[j] - 1][j - 1];
    if (!c) return std::nullopt;
    total += *c;
  }
  return total;
}

inline std::vector<u64> primes_below_2_62(std::size_t count, std::vector<u64>& cache) {
  Integer candidate = cache.empty() ? (Integer(1) << 62) : Integer(static_cast<unsigned long>(cache.back()));
  while (cache.size() < count) {
    do {
      candidate -= 1;
    } while (mpz_probab_prime_p(candidate.get_mpz_t(), 30) == 0);
    cache.push_back(mpz_get_ui(candidate.get_mpz_t()));
  }
  return {cache.begin(), cache.begin() + static_cast<long>(count)};
}

}  // namespace modular

inline LaurentPoly det_multimodular(Matrix<LaurentPoly> m) {
  using namespace modular;
  detail::require_square(m);
  const std::size_t n = m.size();
  if (n == 0) return LaurentPoly(1L);
  const long shift = detail::shift_to_polynomial(m);

  // Degree window from extremal assignments; no assignment means det = 0.
  std::vector<std::vector<std::optional<long>>> low(n, std::vector<std::optional<long>>(n));
  std::vector<std::vector<std::optional<long>>> high(n, std::vector<std::optional<long>>(n));
  long double log_bound = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long double row = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (m[i][j].is_zero()) continue;
      low[i][j] = m[i][j].min_exponent();
      high[i][j] = -m[i][j].max_exponent();
      Integer norm1 = 0;
      for (const auto& [e, c] : m[i][j].terms()) norm1 += abs(c);
      const long double l = mpz_get_d(norm1.get_mpz_t());
      row += l * l;
    }
    if (row == 0) return {};
    log_bound += std::log2(row) / 2;
  }
  const auto lo = min_assignment(low);
  if (!lo) return {};
  const long deg_lo = *lo;
  const long deg_hi = -*min_assignment(high);
  const std::size_t points = static_cast<std::size_t>(deg_hi - deg_lo + 1);
  // |coeff| <= max over the unit circle <= Hadamard product of row norms.
  const std::size_t need_bits = static_cast<std::size_t>(std::ceil(log_bound * (1 + 1e-9L))) + 2;

  static thread_local std::vector<u64> prime_cache;
  std::vector<Integer> coeffs(points, Integer(0));
  Integer modulus = 1;
  std::size_t used = 0;
  std::vector<u64> a(n * n);
  while (mpz_sizeinbase(modulus.get_mpz_t(), 2) <= need_bits) {
    const u64 p = primes_below_2_62(used + 1, prime_cache).back();
    ++used;
    const Montgomery M(p);
    // Entry coefficients mod p, and values at x = 1..points.
    std::vector<std::vector<std::vector<std::pair<std::size_t, u64>>>> ent(
        n, std::vector<std::vector<std::pair<std::size_t, u64>>>(n));
    std::size_t max_exp = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (const auto& [e, c] : m[i][j].terms()) {
          ent[i][j].emplace_back(static_cast<std::size_t>(e), M.to(mod_of(c, p)));
          max_exp = std::max(max_exp, static_cast<std::size_t>(e));
        }
    std::vector<u64> xs(points), ys(points), powers(max_exp + 1);
    for (std::size_t k = 0; k < points; ++k) {
      const u64 x = M.to(k + 1);
      xs[k] = x;
      powers[0] = M.to(1);
      for (std::size_t e = 1; e <= max_exp; ++e) powers[e] = M.mul(powers[e - 1], x);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          u64 val = 0;
          for (const auto& [e, c] : ent[i][j]) val = M.add(val, M.mul(c, powers[e]));
          a[i * n + j] = val;
        }
      // Strip the known x^deg_lo factor.
      ys[k] = M.mul(det_mod(a, n, M), M.inverse(M.pow(x, static_cast<u64>(deg_lo))));
    }
    // Newton divided differences, then expand to monomial coefficients.
    std::vector<u64> dd = ys;
    for (std::size_t level = 1; level < points; ++level)
      for (std::size_t k = points - 1; k >= level; --k)
        dd[k] = M.mul(M.sub(dd[k], dd[k - 1]), M.inverse(M.sub(xs[k], xs[k - level])));
    std::vector<u64> poly(points, 0);
    for (std::size_t k = points; k-- > 0;) {
      // poly = poly * (x - xs[k]) + dd[k]
      for (std::size_t t = points - 1; t > 0; --t) poly[t] = M.sub(poly[t - 1], M.mul(poly[t], xs[k]));
      poly[0] = M.sub(dd[k], M.mul(poly[0], xs[k]));
    }
    // CRT: c <- c + modulus * ((r - c) * modulus^{-1} mod p).
    const u64 minv = M.inverse(M.to(mod_of(modulus, p)));
    for (std::size_t t = 0; t < points; ++t) {
      const u64 r = poly[t];
      const u64 cur = M.to(mod_of(coeffs[t], p));
      const u64 h = M.from(M.mul(M.sub(r, cur), minv));
      coeffs[t] += modulus * Integer(static_cast<unsigned long>(h));
    }
    modulus *= Integer(static_cast<unsigned long>(p));
  }
  const Integer half = modulus / 2;
  LaurentPoly out;
  for (std::size_t t = 0; t < points; ++t) {
    Integer c = coeffs[t];
    if (c > half) c -= modulus;
    out += LaurentPoly::monomial(c, deg_lo + static_cast<long>(t) + shift);
  }
  return out;
}

// Chooses Bareiss for small matrices and the multimodular route otherwise.
inline LaurentPoly determinant(Matrix<LaurentPoly> m, std::size_t bareiss_limit = 24) {
  if (m.size() <= bareiss_limit) return det_fraction_free(std::move(m));
  return det_multimodular(std::move(m));
}

// ---------------------------------------------------------------------------
// JSON: coefficients travel as decimal strings.

inline nlohmann::json to_json(const LaurentPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({e, c.get_str()});
  return {{"ring", "laurent"}, {"terms", terms}};
}

inline nlohmann::json to_json(const TPoly& p) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : p.coeffs()) coeffs.push_back(c.get_str());
  return {{"ring", "tpoly"}, {"coeffs", coeffs}};
}

inline nlohmann::json to_json(const RingElement& e) {
  return std::visit([](const auto& x) -> nlohmann::json {
    using X = std::decay_t<decltype(x)>;
    if constexpr (std::is_same_v<X, Integer>) return {{"ring", "integer"}, {"value", x.get_str()}};
    else if constexpr (std::is_same_v<X, Rational>) return {{"ring", "rational"}, {"value", x.get_str()}};
    else return to_json(x);
  }, e);
}

inline RingElement ring_element_from_json(const nlohmann::json& j) {
  const std::string ring = j.at("ring").get<std::string>();
  if (ring == "integer") return Integer(j.at("value").get<std::string>());
  if (ring == "rational") {
    Rational q(j.at("value").get<std::string>());
    q.canonicalize();
    return q;
  }
  if (ring == "laurent") {
    std::vector<std::pair<long, Integer>> terms;
    for (const auto& t : j.at("terms")) terms.emplace_back(t.at(0).get<long>(), Integer(t.at(1).get<std::string>()));
    return LaurentPoly::from_terms(terms);
  }
  if (ring == "tpoly") {
    std::vector<Integer> coeffs;
    for (const auto& c : j.at("coeffs")) coeffs.emplace_back(c.get<std::string>());
    return TPoly(std::move(coeffs));
  }
  throw std::invalid_argument("unknown ring tag: " + ring);
}

}  // namespace semimeander
