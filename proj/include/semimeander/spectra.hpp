#pragma once

// Satake parameters, Frobenius eigenvalue multisets, intersection-matrix
// ledgers and the determinant substitutions v^g -> eta and T^2 -> Tp^2/(ab).

#include "exactalg.hpp"
#include "gram.hpp"
#include "meander.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace semimeander {

struct SatakeParams {
  std::optional<Rational> alpha;  // nullopt: formal symbol
  std::optional<Rational> beta;
  Integer p = 2;
  int g = 1;

  bool formal() const { return !alpha || !beta; }
  static SatakeParams symbolic(Integer p, int g) { return {std::nullopt, std::nullopt, std::move(p), g}; }
  static SatakeParams rational(Rational a, Rational b, Integer p, int g) {
    return {std::move(a), std::move(b), std::move(p), g};
  }
};

inline bool is_prime(const Integer& p) { return p >= 2 && mpz_probab_prime_p(p.get_mpz_t(), 30) != 0; }

inline std::optional<Rational> rational_sqrt(const Rational& q) {
  if (q < 0) return std::nullopt;
  const Integer num = q.get_num(), den = q.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return std::nullopt;
  Integer a, b;
  mpz_sqrt(a.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(b.get_mpz_t(), den.get_mpz_t());
  return Rational(a, b);
}

struct HeckeQuadratic {
  Rational sum;
  Rational product;
  Rational discriminant;
  std::optional<Rational> alpha;  // larger root when rational
  std::optional<Rational> beta;
};

// Roots of X^2 - Tp X + Sp p^g.
inline HeckeQuadratic satake_from_hecke(const Rational& Tp, const Rational& Sp, const Integer& p, int g) {
  if (!is_prime(p)) throw std::invalid_argument("satake_from_hecke: p must be prime");
  if (g < 1) throw std::invalid_argument("satake_from_hecke: g must be positive");
  HeckeQuadratic q;
  q.sum = Tp;
  q.product = Sp * Rational(ipow(p, static_cast<unsigned long>(g)));
  q.discriminant = Tp * Tp - 4 * q.product;
  if (auto s = rational_sqrt(q.discriminant)) {
    q.alpha = Rational((Tp + *s) / 2);
    q.beta = Rational((Tp - *s) / 2);
  }
  return q;
}

// alpha / beta is not a 2n-th root of unity for 1 <= n <= bound. Over Q the
// only roots of unity are +1 and -1, and both are 2nd roots.
inline bool genericity_check(const SatakeParams& sp, int bound) {
  if (sp.formal()) throw std::invalid_argument("genericity_check: needs rational parameters");
  if (*sp.beta == 0 || *sp.alpha == 0) throw std::invalid_argument("genericity_check: zero parameter");
  if (bound < 1) return true;
  const Rational ratio = *sp.alpha / *sp.beta;
  return ratio != 1 && ratio != -1;
}

// ---------------------------------------------------------------------------
// Eigenvalues as monomials p^a alpha^b beta^c.

struct Monomial {
  Rational p_exp = 0;  // may be half-integral after normalization
  Rational alpha_exp = 0;
  Rational beta_exp = 0;

  friend bool operator==(const Monomial& x, const Monomial& y) {
    return x.p_exp == y.p_exp && x.alpha_exp == y.alpha_exp && x.beta_exp == y.beta_exp;
  }
  friend bool operator<(const Monomial& x, const Monomial& y) {
    if (x.p_exp != y.p_exp) return x.p_exp < y.p_exp;
    if (x.alpha_exp != y.alpha_exp) return x.alpha_exp < y.alpha_exp;
    return x.beta_exp < y.beta_exp;
  }
  Monomial operator*(const Monomial& o) const {
    return {p_exp + o.p_exp, alpha_exp + o.alpha_exp, beta_exp + o.beta_exp};
  }
  Monomial scaled(const Rational& k) const { return {p_exp * k, alpha_exp * k, beta_exp * k}; }

  std::optional<Rational> evaluate(const SatakeParams& sp) const {
    if (sp.formal()) return std::nullopt;
    for (const auto* e : {&p_exp, &alpha_exp, &beta_exp})
      if (e->get_den() != 1) return std::nullopt;
    return rpow(Rational(sp.p), p_exp.get_num().get_si()) * rpow(*sp.alpha, alpha_exp.get_num().get_si()) *
           rpow(*sp.beta, beta_exp.get_num().get_si());
  }

  std::string to_string() const {
    std::string out;
    auto factor = [&out](const char* sym, const Rational& e) {
      if (e == 0) return;
      if (!out.empty()) out += "*";
      out += sym;
      if (e != 1) out += "^" + e.get_str();
    };
    factor("p", p_exp);
    factor("alpha", alpha_exp);
    factor("beta", beta_exp);
    return out.empty() ? "1" : out;
  }
};

struct EigenvalueLine {
  int i = 0;
  Monomial eigenvalue;
  std::optional<Rational> value;
  Integer multiplicity;
};

inline std::vector<EigenvalueLine> frobenius_spectrum(int d, int tcount, const SatakeParams& sp) {
  if (d < 0 || tcount < 0) throw std::invalid_argument("frobenius_spectrum: negative d or tcount");
  std::vector<EigenvalueLine> out;
  for (int i = 0; i <= d; ++i) {
    EigenvalueLine line;
    line.i = i;
    line.eigenvalue = {Rational(-2 * sp.g * tcount), Rational(2 * (i + tcount)), Rational(2 * (d - i + tcount))};
    line.value = line.eigenvalue.evaluate(sp);
    line.multiplicity = binomial(static_cast<unsigned long>(d), static_cast<unsigned long>(i));
    out.push_back(std::move(line));
  }
  return out;
}

// Square-root normalization: the eigenvalues of the p^g-power Frobenius.
inline std::vector<EigenvalueLine> normalized_spectrum(const std::vector<EigenvalueLine>& lines, const SatakeParams& sp) {
  std::vector<EigenvalueLine> out = lines;
  for (auto& l : out) {
    l.eigenvalue = l.eigenvalue.scaled(Rational(1, 2));
    l.value = l.eigenvalue.evaluate(sp);
  }
  return out;
}

// Target eigenvalue alpha^{2(d-r)} beta^{2r} (alpha beta / p^g)^{2 tcount} p^{-2gr}.
inline Monomial target_eigenvalue(int d, int r, int tcount, int g) {
  const Monomial main{0, Rational(2 * (d - r)), Rational(2 * r)};
  const Monomial twist{Rational(-2 * g * tcount), Rational(2 * tcount), Rational(2 * tcount)};
  const Monomial tate{Rational(-2 * g * r), 0, 0};
  return main * twist * tate;
}

// Twist that carries spectrum line i = d - r onto the target eigenvalue.
inline Monomial tate_twist(int r, int g) { return {Rational(-2 * g * r), 0, 0}; }

inline std::string to_csv(const std::vector<EigenvalueLine>& lines) {
  std::string out = "i,eigenvalue,multiplicity\r\n";
  for (const auto& l : lines)
    out += std::to_string(l.i) + "," + (l.value ? l.value->get_str() : l.eigenvalue.to_string()) + "," +
           l.multiplicity.get_str() + "\r\n";
  return out;
}

inline nlohmann::json to_json(const EigenvalueLine& l) {
  nlohmann::json j{{"i", l.i}, {"eigenvalue", l.eigenvalue.to_string()}, {"multiplicity", l.multiplicity.get_str()}};
  if (l.value) j["value"] = l.value->get_str();
  return j;
}

// ---------------------------------------------------------------------------
// Intersection entries.

enum class Regime { Inert, Split };

// Shift exponents over the formal symbols t[i] (one per basis element) and varpi.
using ShiftVector = std::map<std::string, long>;

struct EntryLedger {
  std::size_t a_index = 0;
  std::size_t b_index = 0;
  int m0 = 0;
  int mT = 0;
  std::optional<long> mv;
  long span_a = 0;
  long span_b = 0;
  long indentation = 0;
  ShiftVector shift;

  // Unnormalized scalar (-2)^m0 p^{(span_a + span_b)/2} (Tp / p^{g/2})^mT,
  // kept as (-2)^m0 * p^{p_half/2} * Tp^mT.
  long p_half(int g) const { return span_a + span_b - static_cast<long>(g) * mT; }
};

struct FactorsThroughLowerDim {};

using IntersectionEntry = std::variant<FactorsThroughLowerDim, EntryLedger>;

inline std::string t_symbol(std::size_t i) { return "t[" + std::to_string(i) + "]"; }

inline IntersectionEntry intersection_entry(const Meander& a, const Meander& b, std::size_t a_index,
                                            std::size_t b_index, Regime regime = Regime::Split) {
  const TraceResult t = glue_and_trace(a, b);
  if (gram_product(a, b, t).is_zero()) return FactorsThroughLowerDim{};
  EntryLedger e;
  e.a_index = a_index;
  e.b_index = b_index;
  e.m0 = t.m0;
  e.mT = t.mT;
  e.span_a = a.total_span();
  e.span_b = b.total_span();
  auto add = [&e](const std::string& sym, long k) {
    if ((e.shift[sym] += k) == 0) e.shift.erase(sym);
  };
  add(t_symbol(a_index), 1);
  add(t_symbol(b_index), -1);
  if (reduction_is_trivial(a)) {
    e.indentation = e.span_a - e.span_b - static_cast<long>(e.mT) * a.g();
    if (e.mT != 0) add("varpi", -e.mT);
  } else {
    e.mv = t.mv();
    e.indentation = regime == Regime::Split ? e.span_a - e.span_b : 0;
  }
  return e;
}

// Exact value of the unnormalized scalar; needs p^{p_half/2} rational.
inline std::optional<Rational> unnormalized_scalar(const EntryLedger& e, const Rational& p, const Rational& Tp, int g) {
  const long h = e.p_half(g);
  Rational ppow;
  if (h % 2 == 0) {
    ppow = rpow(p, h / 2);
  } else {
    const auto root = rational_sqrt(p);
    if (!root) return std::nullopt;
    ppow = rpow(*root, h);
  }
  return Rational(ipow(Integer(-2), static_cast<unsigned long>(e.m0))) * ppow * rpow(Tp, e.mT);
}

inline nlohmann::json to_json(const IntersectionEntry& entry) {
  if (std::holds_alternative<FactorsThroughLowerDim>(entry)) return {{"kind", "factors_through_lower_dim"}};
  const auto& e = std::get<EntryLedger>(entry);
  nlohmann::json j{{"kind", "ledger"},  {"a", e.a_index},         {"b", e.b_index},
                   {"m0", e.m0},        {"mT", e.mT},             {"span_a", e.span_a},
                   {"span_b", e.span_b}, {"indentation", e.indentation}, {"shift", e.shift}};
  if (e.mv) j["mv"] = *e.mv;
  return j;
}

// ---------------------------------------------------------------------------
// Intersection determinant.

enum class Verdict { Nonzero, Zero, NotCertified, Symbolic };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Nonzero: return "nonzero";
    case Verdict::Zero: return "zero";
    case Verdict::NotCertified: return "not certified";
    default: return "symbolic";
  }
}

struct IntersectionDeterminant {
  Band band;
  int r = 0;
  Integer t;
  bool t_case = false;
  LaurentPoly eta_det;             // r < d/2: determinant in eta = v^g
  std::optional<Rational> value;   // r = d/2 with rational parameters
  std::optional<Rational> closed_form_value;
  int sign = 0;                    // against (eta - eta^-1)^{2t} or (T^2 - 4)^t
  bool matches_closed_form = false;
  Verdict verdict = Verdict::Symbolic;
  std::string criterion;
  std::string note;
};

inline IntersectionDeterminant intersection_determinant(const Band& band, int r, const SatakeParams& sp,
                                                        const RingElement& det) {
  const int d = band.d();
  if (r < 1 || 2 * r > d) throw std::invalid_argument("intersection_determinant: need 0 < r <= d/2");
  IntersectionDeterminant out;
  out.band = band;
  out.r = r;
  out.t = t_coefficient(d, r);
  out.t_case = 2 * r == d;
  const unsigned long t = out.t.get_ui();
  if (!out.t_case) {
    const auto& lp = std::get<LaurentPoly>(det);
    if (!lp.exponents_divisible_by(band.g()))
      throw std::logic_error("intersection_determinant: exponent not a multiple of g");
    out.eta_det = lp.compress(band.g());
    const LaurentPoly form = (LaurentPoly::monomial(1, 1) - LaurentPoly::monomial(1, -1)).pow(2 * t);
    out.sign = out.eta_det == form ? 1 : out.eta_det == -form ? -1 : 0;
    out.matches_closed_form = out.sign != 0;
    out.criterion = "nonzero when (alpha/beta)^" + std::to_string(d - 2 * r) + " != 1";
    if (!sp.formal()) {
      if (*sp.beta == 0) throw std::invalid_argument("intersection_determinant: beta = 0");
      const Rational ratio = *sp.alpha / *sp.beta;
      // eta^{2(d-2r)} = (alpha/beta)^{d-2r}; eta^2 = 1 forces that power to be 1.
      out.verdict = rpow(ratio, d - 2 * r) != 1 ? Verdict::Nonzero : Verdict::NotCertified;
    }
    return out;
  }
  const TPoly& tp = std::get<TPoly>(det);
  const TPoly form = TPoly(std::vector<Integer>{Integer(-4), Integer(0), Integer(1)}).pow(t);
  out.sign = tp == form ? 1 : tp == -form ? -1 : 0;
  out.matches_closed_form = out.sign != 0;
  out.criterion = "nonzero when alpha != beta";
  out.note = "value uses T^2 - 4 = (alpha - beta)^2/(alpha beta); the unsquared numerator is a misprint";
  if (!sp.formal()) {
    const Rational& a = *sp.alpha;
    const Rational& b = *sp.beta;
    if (a * b == 0) throw std::invalid_argument("intersection_determinant: zero parameter");
    const Rational s = (a + b) * (a + b) / (a * b);
    out.value = tp.even_part_in_square().evaluate(s);
    out.closed_form_value = Rational(out.sign) * rpow((a - b) * (a - b) / (a * b), static_cast<long>(t));
    out.verdict = *out.value != 0 ? Verdict::Nonzero : Verdict::Zero;
  }
  return out;
}

inline IntersectionDeterminant intersection_determinant(const Band& band, int r, const SatakeParams& sp) {
  return intersection_determinant(band, r, sp, gram_determinant(band, r));
}

inline nlohmann::json to_json(const IntersectionDeterminant& x) {
  nlohmann::json j{{"band", to_json(x.band)},
                   {"r", x.r},
                   {"t", x.t.get_str()},
                   {"case", x.t_case ? "T" : "eta"},
                   {"sign", x.sign == 1 ? "+" : x.sign == -1 ? "-" : "none"},
                   {"matches_closed_form", x.matches_closed_form},
                   {"verdict", to_string(x.verdict)},
                   {"criterion", x.criterion}};
  if (!x.t_case) j["determinant"] = to_json(x.eta_det);
  if (x.value) j["value"] = x.value->get_str();
  if (x.closed_form_value) j["closed_form_value"] = x.closed_form_value->get_str();
  if (!x.note.empty()) j["note"] = x.note;
  return j;
}

// ---------------------------------------------------------------------------

struct TateReport {
  Band band;
  int r = 0;
  int tcount = 0;
  Monomial target;
  std::optional<Rational> target_value;
  Integer dimension;
  std::size_t cycles = 0;
  std::optional<bool> generic;
  IntersectionDeterminant determinant;
  std::string conclusion;  // yes / no / unknown
  std::string reason;
};

inline TateReport tate_report(const Band& band, int r, int tcount, const SatakeParams& sp) {
  const int d = band.d();
  TateReport rep;
  rep.band = band;
  rep.r = r;
  rep.tcount = tcount;
  const auto lines = frobenius_spectrum(d, tcount, sp);
  const auto& line = lines[static_cast<std::size_t>(d - r)];
  rep.target = line.eigenvalue * tate_twist(r, band.g());
  rep.target_value = rep.target.evaluate(sp);
  rep.dimension = line.multiplicity;
  rep.cycles = enumerate(band, r).size();
  rep.determinant = intersection_determinant(band, r, sp);
  if (sp.formal()) {
    rep.conclusion = "unknown";
    rep.reason = "formal parameters: " + rep.determinant.criterion;
    return rep;
  }
  rep.generic = genericity_check(sp, d);
  if (*sp.alpha == *sp.beta) {
    rep.conclusion = "no";
    rep.reason = "degenerate";
  } else if (rep.determinant.verdict == Verdict::Zero) {
    rep.conclusion = "no";
    rep.reason = "intersection determinant vanishes";
  } else if (*rep.generic && rep.determinant.verdict == Verdict::Nonzero) {
    rep.conclusion = "yes";
    rep.reason = "generic and determinant nonzero";
  } else {
    rep.conclusion = "unknown";
    rep.reason = "parameters not generic";
  }
  return rep;
}

inline nlohmann::json to_json(const TateReport& rep) {
  nlohmann::json j{{"band", to_json(rep.band)},
                   {"r", rep.r},
                   {"tcount", rep.tcount},
                   {"target_eigenvalue", rep.target.to_string()},
                   {"dimension", rep.dimension.get_str()},
                   {"cycles", rep.cycles},
                   {"determinant", to_json(rep.determinant)},
                   {"conclusion", rep.conclusion},
                   {"reason", rep.reason}};
  if (rep.target_value) j["target_value"] = rep.target_value->get_str();
  if (rep.generic) j["generic"] = *rep.generic;
  return j;
}

}  // namespace semimeander
