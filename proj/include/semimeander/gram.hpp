#pragma once

// Gluing a meander to the mirror of another, tracing the components of the
// resulting cylinder diagram, and the Gram pairing built from the trace.

#include "band.hpp"
#include "exactalg.hpp"
#include "meander.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace semimeander {

enum class End { ASemiline, BSemiline };

struct TracedPath {
  End start_kind = End::ASemiline;
  int start = 0;
  End end_kind = End::BSemiline;
  int end = 0;
  long disp = 0;  // from the start end to the other end
};

struct TraceResult {
  int m0 = 0;
  int mT = 0;
  std::vector<TracedPath> paths;
  std::vector<long> loop_windings;  // loop displacement / g
  bool degenerate = false;

  long mv() const {
    long total = 0;
    for (const auto& p : paths) total += p.disp;
    return total;
  }
};

namespace detail {

// For each position: partner node and signed span, or nullopt for a semi-line.
struct Partner {
  bool semiline = true;
  int to = 0;
  long disp = 0;
};

inline std::vector<Partner> partners(const Meander& m) {
  std::vector<Partner> out(static_cast<std::size_t>(m.g()));
  for (const auto& a : m.arcs()) {
    const long s = m.span_of(a);
    out[static_cast<std::size_t>(a.left)] = {false, a.right, s};
    out[static_cast<std::size_t>(a.right)] = {false, a.left, -s};
  }
  return out;
}

}  // namespace detail

// Paths from a-semilines run a, b, a, ...: the first step uses a b-curve.
inline TraceResult glue_and_trace(const Meander& a, const Meander& b) {
  if (a.band() != b.band()) throw std::invalid_argument("glue_and_trace: band mismatch");
  if (a.r() != b.r()) throw std::invalid_argument("glue_and_trace: arc count mismatch");
  const int g = a.g();
  const auto pa = detail::partners(a), pb = detail::partners(b);
  std::vector<char> seen(static_cast<std::size_t>(g), 0);
  TraceResult res;

  // Starting at a semi-line of `first_side`, alternate sides until a semi-line.
  auto walk = [&](int start, bool start_on_a) {
    TracedPath p;
    p.start_kind = start_on_a ? End::ASemiline : End::BSemiline;
    p.start = start;
    int x = start;
    bool use_b = start_on_a;
    for (;;) {
      seen[static_cast<std::size_t>(x)] = 1;
      const auto& step = (use_b ? pb : pa)[static_cast<std::size_t>(x)];
      if (step.semiline) {
        p.end_kind = use_b ? End::BSemiline : End::ASemiline;
        p.end = x;
        break;
      }
      p.disp += step.disp;
      x = step.to;
      use_b = !use_b;
    }
    if (p.start_kind == p.end_kind) res.degenerate = true;
    res.paths.push_back(p);
  };

  for (int s : a.semilines())
    if (!seen[static_cast<std::size_t>(s)]) walk(s, true);
  for (int s : b.semilines())
    if (!seen[static_cast<std::size_t>(s)]) walk(s, false);

  for (int x0 : a.band().nodes()) {
    if (seen[static_cast<std::size_t>(x0)]) continue;
    long disp = 0;
    int x = x0;
    do {
      seen[static_cast<std::size_t>(x)] = 1;
      disp += pa[static_cast<std::size_t>(x)].disp;
      x = pa[static_cast<std::size_t>(x)].to;
      seen[static_cast<std::size_t>(x)] = 1;
      disp += pb[static_cast<std::size_t>(x)].disp;
      x = pb[static_cast<std::size_t>(x)].to;
    } while (x != x0);
    if (disp % g != 0 || disp / g < -1 || disp / g > 1)
      throw std::logic_error("traced loop with winding outside {-1, 0, 1}");
    res.loop_windings.push_back(disp / g);
    (disp == 0 ? res.m0 : res.mT) += 1;
  }
  return res;
}

// Band whose nodes are exactly the semi-line feet of m.
inline Band semiline_band(const Meander& m) {
  std::set<int> plus = m.band().plus();
  for (const auto& x : m.arcs()) plus.insert(x.left), plus.insert(x.right);
  return Band(m.g(), plus);
}

// Link from the semi-lines of a to those of b formed by the traced paths.
inline Link reduction_link(const Meander& a, const Meander& b, const TraceResult& t) {
  if (t.degenerate) throw std::invalid_argument("reduction_link: degenerate diagram");
  if (2 * a.r() == a.band().d()) throw std::invalid_argument("reduction_link: no semi-lines (trivial link case)");
  std::vector<Curve> curves;
  for (const auto& p : t.paths) {
    if (p.start_kind == End::ASemiline) curves.push_back({p.start, p.disp});
    else curves.push_back({p.end, -p.disp});
  }
  return Link(semiline_band(a), semiline_band(b), std::move(curves));
}

// r = d/2 reduces to the link between empty node sets.
inline bool reduction_is_trivial(const Meander& a) { return 2 * a.r() == a.band().d(); }

// ---------------------------------------------------------------------------
// Gram values are monomials (-2)^m0 x^e, or zero.

struct GramValue {
  enum class Kind { Zero, V, T };
  Kind kind = Kind::Zero;
  int m0 = 0;
  long exponent = 0;  // m_v or m_T

  bool is_zero() const { return kind == Kind::Zero; }

  Integer coefficient() const { return is_zero() ? Integer(0) : ipow(Integer(-2), static_cast<unsigned long>(m0)); }

  RingElement to_ring() const {
    switch (kind) {
      case Kind::V: return LaurentPoly::monomial(coefficient(), exponent);
      case Kind::T: return TPoly::monomial(coefficient(), static_cast<std::size_t>(exponent));
      default: return Integer(0);
    }
  }

  // "(-2)^1*v^-9"
  std::string to_string() const {
    if (is_zero()) return "0";
    return "(-2)^" + std::to_string(m0) + "*" + (kind == Kind::V ? "v^" : "T^") + std::to_string(exponent);
  }

  friend bool operator==(const GramValue& x, const GramValue& y) {
    if (x.kind != y.kind) return false;
    return x.is_zero() || (x.m0 == y.m0 && x.exponent == y.exponent);
  }
  friend bool operator!=(const GramValue& x, const GramValue& y) { return !(x == y); }
};

inline GramValue gram_product(const Meander& a, const Meander&, const TraceResult& t) {
  if (t.degenerate) return {};
  if (reduction_is_trivial(a)) return {GramValue::Kind::T, t.m0, t.mT};
  return {GramValue::Kind::V, t.m0, t.mv()};
}

inline GramValue gram_product(const Meander& a, const Meander& b) { return gram_product(a, b, glue_and_trace(a, b)); }

struct GramMatrix {
  Band band;
  int r = 0;
  std::vector<Meander> basis;
  Matrix<GramValue> entries;

  bool t_case() const { return 2 * r == band.d(); }
  std::size_t size() const { return basis.size(); }
};

// Rows are split across `jobs` workers; assembly order is fixed by the basis.
inline GramMatrix gram_matrix(const Band& band, int r, unsigned jobs = 1) {
  GramMatrix gm{band, r, enumerate(band, r), {}};
  const std::size_t n = gm.basis.size();
  gm.entries.assign(n, std::vector<GramValue>(n));
  auto fill = [&gm, n](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = 0; j < n; ++j) gm.entries[i][j] = gram_product(gm.basis[i], gm.basis[j]);
  };
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    fill(0, n);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(fill, n * w / jobs, n * (w + 1) / jobs);
    for (auto& t : pool) t.join();
  }
  return gm;
}

inline std::string to_csv(const GramMatrix& gm) {
  std::ostringstream os;
  for (const auto& row : gm.entries) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << row[j].to_string();
    os << "\r\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Determinant. Entries are monomials, so a diagonal conjugation by x^phi makes
// every exponent a multiple of k (k = g for v, k = 2 for T) whenever the cycle
// sums allow it; the matrix is then a matrix in x^k, which keeps the
// interpolation degree small.

namespace detail {

// phi with e(i,j) + phi_i - phi_j = 0 mod k along a spanning forest; nullopt
// when some entry cannot be made divisible.
inline std::optional<std::vector<long>> potentials(const Matrix<GramValue>& m, long k) {
  const std::size_t n = m.size();
  std::vector<long> phi(n, 0);
  std::vector<char> done(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (done[root]) continue;
    done[root] = 1;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j = 0; j < n; ++j) {
        if (done[j]) continue;
        if (!m[i][j].is_zero()) phi[j] = phi[i] + m[i][j].exponent;
        else if (!m[j][i].is_zero()) phi[j] = phi[i] - m[j][i].exponent;
        else continue;
        done[j] = 1;
        queue.push_back(j);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!m[i][j].is_zero() && mod(m[i][j].exponent + phi[i] - phi[j], k) != 0) return std::nullopt;
  return phi;
}

}  // namespace detail

// Determinant over Z[v, v^-1] (r < d/2) or Z[T] (r = d/2).
inline RingElement gram_determinant(const GramMatrix& gm, std::size_t bareiss_limit = 24) {
  const std::size_t n = gm.size();
  const long k0 = gm.t_case() ? 2 : gm.band.g();
  const auto phi = detail::potentials(gm.entries, k0);
  const long k = phi ? k0 : 1;
  Matrix<LaurentPoly> m(n, std::vector<LaurentPoly>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& e = gm.entries[i][j];
      if (e.is_zero()) continue;
      const long x = e.exponent + (phi ? (*phi)[i] - (*phi)[j] : 0);
      m[i][j] = LaurentPoly::monomial(e.coefficient(), x / k);
    }
  LaurentPoly det = determinant(std::move(m), bareiss_limit).substitute_power(k);
  if (gm.t_case()) return TPoly::from_laurent(det);
  return det;
}

inline RingElement gram_determinant(const Band& band, int r) { return gram_determinant(gram_matrix(band, r)); }

inline Integer t_coefficient(int d, int r) {
  if (r < 0 || 2 * r > d) throw std::invalid_argument("t_coefficient: r out of range");
  Integer t = 0;
  for (int i = 0; i < r; ++i) t += binomial(static_cast<unsigned long>(d), static_cast<unsigned long>(i));
  return t;
}

struct ClosedFormReport {
  Band band;
  int r = 0;
  int d = 0;
  Integer t;
  RingElement computed;
  RingElement expected;
  std::string form;  // e.g. "(v^3 - v^-3)^2"
  int sign = 0;      // +1, -1, or 0 when neither matches
  bool exponents_multiple_of_g = true;
  bool pass = false;
};

inline RingElement expected_closed_form(const Band& band, int r, std::string* form = nullptr) {
  const int d = band.d();
  const unsigned long t = t_coefficient(d, r).get_ui();
  if (2 * r == d) {
    if (form) *form = "(T^2 - 4)^" + std::to_string(t);
    return TPoly(std::vector<Integer>{Integer(-4), Integer(0), Integer(1)}).pow(t);
  }
  const long g = band.g();
  if (form) *form = "(v^" + std::to_string(g) + " - v^-" + std::to_string(g) + ")^" + std::to_string(2 * t);
  return (LaurentPoly::monomial(1, g) - LaurentPoly::monomial(1, -g)).pow(2 * t);
}

inline ClosedFormReport verify_closed_form(const Band& band, int r, const RingElement& det) {
  ClosedFormReport rep{band, r, band.d(), t_coefficient(band.d(), r), det, Integer(0), "", 0, true, false};
  rep.expected = expected_closed_form(band, r, &rep.form);
  if (det == rep.expected) rep.sign = 1;
  else if (det == neg(rep.expected)) rep.sign = -1;
  if (const auto* lp = std::get_if<LaurentPoly>(&det)) rep.exponents_multiple_of_g = lp->exponents_divisible_by(band.g());
  rep.pass = rep.sign != 0 && rep.exponents_multiple_of_g;
  return rep;
}

inline ClosedFormReport verify_closed_form(const Band& band, int r) {
  return verify_closed_form(band, r, gram_determinant(band, r));
}

inline nlohmann::json to_json(const ClosedFormReport& rep) {
  return {{"band", to_json(rep.band)},
          {"r", rep.r},
          {"d", rep.d},
          {"t", rep.t.get_str()},
          {"form", rep.form},
          {"computed", to_json(rep.computed)},
          {"expected", to_json(rep.expected)},
          {"sign", rep.sign == 1 ? "+" : rep.sign == -1 ? "-" : "none"},
          {"exponents_multiple_of_g", rep.exponents_multiple_of_g},
          {"pass", rep.pass}};
}

}  // namespace semimeander
