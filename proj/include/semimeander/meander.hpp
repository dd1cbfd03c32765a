#pragma once

// Periodic semi-meanders on a band: r non-crossing arcs above the band plus
// d - 2r semi-lines. An arc (left, right) covers the positions strictly
// between left and right travelling rightward.

#include "band.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace semimeander {

struct Arc {
  int left = 0;
  int right = 0;
  friend bool operator==(const Arc& a, const Arc& b) { return a.left == b.left && a.right == b.right; }
  friend bool operator!=(const Arc& a, const Arc& b) { return !(a == b); }
  friend bool operator<(const Arc& a, const Arc& b) {
    return std::tie(a.left, a.right) < std::tie(b.left, b.right);
  }
};

inline int span(const Arc& a, int g) { return mod(a.right - a.left, g); }

// True iff pos lies strictly inside the arc.
inline bool covers(const Arc& a, int pos, int g) {
  const int off = mod(pos - a.left, g);
  return off > 0 && off < span(a, g);
}

struct Validation {
  bool ok = true;
  std::string reason;
  explicit operator bool() const { return ok; }
};

class Meander {
 public:
  Meander() = default;
  // Stores arcs and semilines sorted; does not validate (see validate()).
  Meander(Band band, std::vector<Arc> arcs, std::vector<int> semilines)
      : band_(std::move(band)), arcs_(std::move(arcs)), semilines_(std::move(semilines)) {
    for (auto& a : arcs_) a = {mod(a.left, band_.g()), mod(a.right, band_.g())};
    for (auto& s : semilines_) s = mod(s, band_.g());
    std::sort(arcs_.begin(), arcs_.end());
    std::sort(semilines_.begin(), semilines_.end());
  }

  static Meander all_semilines(const Band& b) { return Meander(b, {}, b.nodes()); }

  const Band& band() const { return band_; }
  int g() const { return band_.g(); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<int>& semilines() const { return semilines_; }
  int r() const { return static_cast<int>(arcs_.size()); }
  int defect() const { return static_cast<int>(semilines_.size()); }

  int span_of(const Arc& a) const { return span(a, g()); }

  long total_span() const {
    long total = 0;
    for (const auto& a : arcs_) total += span_of(a);
    return total;
  }

  bool has_arc(const Arc& a) const { return std::binary_search(arcs_.begin(), arcs_.end(), a); }

  // Arc whose covered interval holds only plus signs.
  bool is_basic(const Arc& a) const {
    for (int k = 1; k < span_of(a); ++k)
      if (band_.is_node(a.left + k)) return false;
    return true;
  }

  std::vector<Arc> basic_arcs() const {
    std::vector<Arc> out;
    for (const auto& a : arcs_)
      if (is_basic(a)) out.push_back(a);
    return out;
  }

  // Arcs lying strictly below `a`.
  std::vector<Arc> arcs_below(const Arc& a) const {
    std::vector<Arc> out;
    for (const auto& b : arcs_)
      if (b != a && covers(a, b.left, g())) out.push_back(b);
    return out;
  }

  Validation validate() const {
    const int g = band_.g();
    auto fail = [](std::string why) { return Validation{false, std::move(why)}; };
    std::map<int, int> uses;
    for (const auto& a : arcs_) {
      if (a.left == a.right) return fail("arc joins a node to itself");
      for (int x : {a.left, a.right}) {
        if (band_.is_plus(x)) return fail("arc endpoint " + std::to_string(x) + " is a plus position");
        ++uses[x];
      }
    }
    for (int s : semilines_) {
      if (band_.is_plus(s)) return fail("semi-line at plus position " + std::to_string(s));
      ++uses[s];
    }
    for (int x : band_.nodes()) {
      auto it = uses.find(x);
      if (it == uses.end()) return fail("node " + std::to_string(x) + " is unused");
      if (it->second > 1) return fail("node " + std::to_string(x) + " is used more than once");
    }
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
      for (std::size_t j = i + 1; j < arcs_.size(); ++j)
        if (crosses(arcs_[i], arcs_[j], g)) return fail("arcs cross");
      for (int s : semilines_)
        if (covers(arcs_[i], s, g)) return fail("semi-line " + std::to_string(s) + " lies under an arc");
    }
    return {};
  }

  // b lies strictly inside a (as intervals on the universal cover).
  static bool nested(const Arc& b, const Arc& a, int g) {
    const int l = mod(b.left - a.left, g), r = mod(b.right - a.left, g);
    return l > 0 && r > l && r < span(a, g);
  }

  static bool crosses(const Arc& a, const Arc& b, int g) {
    if (nested(a, b, g) || nested(b, a, g)) return false;
    return covers(a, b.left, g) || covers(a, b.right, g) || covers(b, a.left, g) || covers(b, a.right, g);
  }

  friend bool operator==(const Meander& a, const Meander& b) {
    return a.band_ == b.band_ && a.arcs_ == b.arcs_ && a.semilines_ == b.semilines_;
  }
  friend bool operator!=(const Meander& a, const Meander& b) { return !(a == b); }
  friend bool operator<(const Meander& a, const Meander& b) {
    return std::tie(a.band_, a.arcs_, a.semilines_) < std::tie(b.band_, b.arcs_, b.semilines_);
  }

 private:
  Band band_;
  std::vector<Arc> arcs_;
  std::vector<int> semilines_;
};

inline Validation validate(const Meander& m) { return m.validate(); }

// ---------------------------------------------------------------------------
// Enumeration: the lowest free node becomes a semi-line or pairs with a later
// free node in either orientation; partial states that already cross are cut.

namespace detail {

struct EnumState {
  const Band* band;
  int r;
  std::vector<int> nodes;
  std::vector<char> used;
  std::vector<Arc> arcs;
  std::vector<int> semis;
  std::vector<Meander> out;

  bool compatible(const Arc& a) const {
    const int g = band->g();
    for (const auto& b : arcs)
      if (Meander::crosses(a, b, g)) return false;
    for (int s : semis)
      if (covers(a, s, g)) return false;
    return true;
  }
  bool under_arc(int s) const {
    for (const auto& a : arcs)
      if (covers(a, s, band->g())) return true;
    return false;
  }

  void run(std::size_t i) {
    while (i < nodes.size() && used[i]) ++i;
    if (i == nodes.size()) {
      if (static_cast<int>(arcs.size()) == r) out.emplace_back(*band, arcs, semis);
      return;
    }
    const int semis_allowed = static_cast<int>(nodes.size()) - 2 * r;
    if (static_cast<int>(semis.size()) < semis_allowed && !under_arc(nodes[i])) {
      used[i] = 1;
      semis.push_back(nodes[i]);
      run(i + 1);
      semis.pop_back();
      used[i] = 0;
    }
    if (static_cast<int>(arcs.size()) == r) return;
    used[i] = 1;
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (used[j]) continue;
      used[j] = 1;
      for (const Arc a : {Arc{nodes[i], nodes[j]}, Arc{nodes[j], nodes[i]}}) {
        if (!compatible(a)) continue;
        arcs.push_back(a);
        run(i + 1);
        arcs.pop_back();
      }
      used[j] = 0;
    }
    used[i] = 0;
  }
};

}  // namespace detail

// All meanders with r arcs, sorted canonically.
inline std::vector<Meander> enumerate(const Band& b, int r) {
  if (r < 0 || 2 * r > b.d()) throw std::invalid_argument("enumerate: r out of range [0, d/2]");
  detail::EnumState st{&b, r, b.nodes(), {}, {}, {}, {}};
  st.used.assign(st.nodes.size(), 0);
  st.run(0);
  std::vector<Meander> out;
  for (auto& m : st.out)
    if (m.validate()) out.push_back(std::move(m));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Basic-arc surgery.

inline Meander remove_arc(const Meander& m, const Arc& a) {
  if (!m.has_arc(a)) throw std::invalid_argument("remove_arc: arc not in meander");
  if (!m.is_basic(a)) throw std::invalid_argument("remove_arc: arc is not basic");
  std::vector<Arc> arcs;
  for (const auto& b : m.arcs())
    if (b != a) arcs.push_back(b);
  return Meander(m.band().with_plus({a.left, a.right}), std::move(arcs), m.semilines());
}

// Inverse of remove_arc: both ends and everything between must be plus signs.
inline Meander insert_basic_arc(const Meander& m, const Arc& a) {
  const int g = m.g();
  const int s = span(a, g);
  if (s == 0) throw std::invalid_argument("insert_basic_arc: degenerate arc");
  for (int k = 0; k <= s; ++k)
    if (m.band().is_node(a.left + k)) throw std::invalid_argument("insert_basic_arc: position is not a plus");
  std::vector<Arc> arcs = m.arcs();
  arcs.push_back(a);
  Meander out(m.band().without_plus({a.left, a.right}), std::move(arcs), m.semilines());
  if (auto v = out.validate(); !v) throw std::invalid_argument("insert_basic_arc: " + v.reason);
  return out;
}

// Every arc of a is an arc of b.
inline bool precedes(const Meander& a, const Meander& b) {
  if (a.band() != b.band()) throw std::invalid_argument("precedes: band mismatch");
  return std::all_of(a.arcs().begin(), a.arcs().end(), [&](const Arc& x) { return b.has_arc(x); });
}

// Saturated: closed under taking arcs that lie below a member.
inline bool is_saturated(const Meander& a, const std::vector<Arc>& delta) {
  std::set<Arc> in(delta.begin(), delta.end());
  for (const auto& x : delta) {
    if (!a.has_arc(x)) return false;
    for (const auto& y : a.arcs_below(x))
      if (!in.count(y)) return false;
  }
  return true;
}

struct FlatDecomposition {
  Meander flat;
  Meander residual;
};

inline FlatDecomposition flat_decompose(const Meander& a, const std::vector<Arc>& delta) {
  if (!is_saturated(a, delta)) throw std::invalid_argument("flat_decompose: subset is not saturated");
  std::set<Arc> in(delta.begin(), delta.end());
  std::set<int> ends;
  for (const auto& x : in) ends.insert(x.left), ends.insert(x.right);

  std::vector<int> flat_semis;
  for (int x : a.band().nodes())
    if (!ends.count(x)) flat_semis.push_back(x);
  Meander flat(a.band(), std::vector<Arc>(in.begin(), in.end()), flat_semis);

  std::set<int> plus = a.band().plus();
  plus.insert(ends.begin(), ends.end());
  std::vector<Arc> rest;
  for (const auto& x : a.arcs())
    if (!in.count(x)) rest.push_back(x);
  Meander residual(Band(a.g(), plus), std::move(rest), a.semilines());
  return {std::move(flat), std::move(residual)};
}

// ---------------------------------------------------------------------------
// Goren-Oort profile and Verschiebung divisibility conditions.

struct VerschiebungCondition {
  int start = 0;
  int length = 0;      // arc span
  int power = 0;       // (length + 1) / 2
  int net_power = 0;   // power left after dividing out the arcs below
  std::string rendered;
  std::string flat;
};

struct GoCycleProfile {
  std::set<int> S;
  std::set<int> T;
  int codimension = 0;
  int fiber_dimension = 0;
  std::vector<VerschiebungCondition> conditions;
  // Set when the band has plus signs or an arc has even span: no displayed
  // condition pattern covers those shapes.
  bool unanchored = false;
};

namespace detail {

inline std::string p_divides(int k) { return k == 1 ? "p | " : "p^" + std::to_string(k) + " | "; }

// V-word for an arc with arcs below it grouped as "(.../p)".
inline std::string nested_word(const Meander& m, const Arc& a) {
  const int g = m.g();
  std::map<int, Arc> starts;
  for (const auto& b : m.arcs_below(a)) starts[b.left] = b;
  std::string out = "V" + std::to_string(a.left);
  bool last_group = false;
  for (int k = 1; k < span(a, g);) {
    const int pos = mod(a.left + k, g);
    auto it = starts.find(pos);
    if (it != starts.end()) {
      // Only outermost children: skip the interior of each group.
      out += last_group ? "" : " ";
      out += "(" + nested_word(m, it->second) + "/p)";
      last_group = true;
      k += span(it->second, g) + 1;
      continue;
    }
    out += (last_group ? " V" : "V") + std::to_string(pos);
    last_group = false;
    ++k;
  }
  out += (last_group ? " V" : "V") + std::to_string(a.right);
  return out;
}

inline int arc_power(const Meander& m, const Arc& a) { return (span(a, m.g()) + 1) / 2; }

// Arcs directly below a (not below another arc that is itself below a).
inline std::vector<Arc> children(const Meander& m, const Arc& a) {
  const auto below = m.arcs_below(a);
  std::vector<Arc> out;
  for (const auto& b : below) {
    bool inner = false;
    for (const auto& c : below)
      if (c != b && covers(c, b.left, m.g())) inner = true;
    if (!inner) out.push_back(b);
  }
  return out;
}

}  // namespace detail

inline std::vector<VerschiebungCondition> verschiebung_conditions(const Meander& m) {
  std::vector<Arc> order = m.arcs();
  std::stable_sort(order.begin(), order.end(), [&](const Arc& x, const Arc& y) {
    return std::make_pair(m.arcs_below(x).size(), x.left) < std::make_pair(m.arcs_below(y).size(), y.left);
  });
  std::vector<VerschiebungCondition> out;
  for (const auto& a : order) {
    const int s = m.span_of(a);
    if (s % 2 == 0) continue;
    VerschiebungCondition c;
    c.start = a.left;
    c.length = s;
    c.power = (s + 1) / 2;
    c.net_power = c.power;
    for (const auto& b : detail::children(m, a)) c.net_power -= detail::arc_power(m, b);
    c.rendered = detail::p_divides(c.net_power) + detail::nested_word(m, a);
    std::string word;
    for (int k = 0; k <= s; ++k) word += "V" + std::to_string(mod(a.left + k, m.g()));
    c.flat = detail::p_divides(c.power) + word;
    out.push_back(std::move(c));
  }
  return out;
}

inline GoCycleProfile go_profile(const Meander& a, const std::set<int>& T = {}) {
  for (int t : T)
    if (!a.band().is_plus(t)) throw std::invalid_argument("go_profile: T must consist of plus positions");
  GoCycleProfile out;
  out.S = a.band().plus();
  out.T = T;
  for (const auto& x : a.arcs()) {
    out.S.insert(x.left);
    out.S.insert(x.right);
    out.T.insert(x.right);
  }
  out.codimension = out.fiber_dimension = a.r();
  out.conditions = verschiebung_conditions(a);
  out.unanchored = !a.band().plus().empty();
  for (const auto& x : a.arcs())
    if (a.span_of(x) % 2 == 0) out.unanchored = true;
  return out;
}

// ---------------------------------------------------------------------------
// ASCII: line 1 marks '(' left ends, ')' right ends, '|' semi-lines and '+'
// plus signs; line 2 marks nodes with a bullet.

inline std::string render_ascii(const Meander& m) {
  std::string top(static_cast<std::size_t>(m.g()), '+');
  for (const auto& a : m.arcs()) {
    top[static_cast<std::size_t>(a.left)] = '(';
    top[static_cast<std::size_t>(a.right)] = ')';
  }
  for (int s : m.semilines()) top[static_cast<std::size_t>(s)] = '|';
  std::string bottom;
  for (int i = 0; i < m.g(); ++i) bottom += m.band().is_plus(i) ? "+" : "•";
  return top + "\n" + bottom;
}

// Reads line 1 (a trailing line 2 is ignored); brackets match cyclically.
inline Meander parse_ascii(const std::string& text) {
  const std::string top = text.substr(0, text.find('\n'));
  const int g = static_cast<int>(top.size());
  if (g == 0) throw std::invalid_argument("parse_ascii: empty diagram");
  std::set<int> plus;
  std::vector<int> semis;
  for (int i = 0; i < g; ++i) {
    const char c = top[static_cast<std::size_t>(i)];
    if (c == '+') plus.insert(i);
    else if (c == '|') semis.push_back(i);
    else if (c != '(' && c != ')') throw std::invalid_argument(std::string("parse_ascii: unexpected '") + c + "'");
  }
  std::vector<int> stack;
  std::vector<char> matched(static_cast<std::size_t>(g), 0);
  std::vector<Arc> arcs;
  for (int i = 0; i < 2 * g; ++i) {
    const int pos = i % g;
    const char c = top[static_cast<std::size_t>(pos)];
    if (c == '(' && i < g) stack.push_back(pos);
    if (c == ')' && !matched[static_cast<std::size_t>(pos)] && !stack.empty()) {
      const int l = stack.back();
      stack.pop_back();
      matched[static_cast<std::size_t>(pos)] = matched[static_cast<std::size_t>(l)] = 1;
      arcs.push_back({l, pos});
    }
  }
  for (int i = 0; i < g; ++i) {
    const char c = top[static_cast<std::size_t>(i)];
    if ((c == '(' || c == ')') && !matched[static_cast<std::size_t>(i)])
      throw std::invalid_argument("parse_ascii: unbalanced brackets");
  }
  Meander m(Band(g, plus), std::move(arcs), std::move(semis));
  if (auto v = m.validate(); !v) throw std::invalid_argument("parse_ascii: " + v.reason);
  return m;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const Meander& m) {
  nlohmann::json arcs = nlohmann::json::array();
  for (const auto& a : m.arcs()) arcs.push_back({{"left", a.left}, {"right", a.right}});
  auto j = to_json(m.band());
  j["arcs"] = arcs;
  j["semilines"] = m.semilines();
  return j;
}

inline Meander meander_from_json(const nlohmann::json& j) {
  std::vector<Arc> arcs;
  for (const auto& a : j.at("arcs")) arcs.push_back({a.at("left").get<int>(), a.at("right").get<int>()});
  return Meander(band_from_json(j), std::move(arcs), j.at("semilines").get<std::vector<int>>());
}

inline nlohmann::json to_json(const VerschiebungCondition& c) {
  return {{"start", c.start}, {"length", c.length}, {"power", c.power},
          {"net_power", c.net_power}, {"rendered", c.rendered}, {"flat", c.flat}};
}

inline nlohmann::json to_json(const GoCycleProfile& p) {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : p.conditions) conds.push_back(to_json(c));
  return {{"S", p.S}, {"T", p.T}, {"codimension", p.codimension}, {"fiber_dimension", p.fiber_dimension},
          {"conditions", conds}, {"unanchored", p.unanchored}};
}

}  // namespace semimeander
