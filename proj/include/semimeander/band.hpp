#pragma once

// Bands of g cyclic positions (nodes and plus signs) and non-crossing links
// between them. A curve is stored by its source node and lifted displacement.

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace semimeander {

inline int mod(long a, long m) {
  long r = a % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

class Band {
 public:
  Band() = default;
  Band(int g, std::set<int> plus) : g_(g) {
    if (g < 1) throw std::invalid_argument("band needs g >= 1");
    for (int x : plus) plus_.insert(mod(x, g));
  }
  static Band full(int g) { return Band(g, {}); }

  int g() const { return g_; }
  const std::set<int>& plus() const { return plus_; }
  int d() const { return g_ - static_cast<int>(plus_.size()); }
  bool is_plus(int pos) const { return plus_.count(mod(pos, g_)) != 0; }
  bool is_node(int pos) const { return !is_plus(pos); }

  std::vector<int> nodes() const {
    std::vector<int> out;
    for (int i = 0; i < g_; ++i)
      if (!plus_.count(i)) out.push_back(i);
    return out;
  }

  Band with_plus(std::initializer_list<int> extra) const {
    std::set<int> p = plus_;
    for (int x : extra) p.insert(mod(x, g_));
    return Band(g_, p);
  }
  Band without_plus(std::initializer_list<int> removed) const {
    std::set<int> p = plus_;
    for (int x : removed) p.erase(mod(x, g_));
    return Band(g_, p);
  }
  // Plus set rotated one step to the right.
  Band shifted(int k = 1) const {
    std::set<int> p;
    for (int x : plus_) p.insert(mod(x + k, g_));
    return Band(g_, p);
  }

  std::string to_string() const {
    std::string s;
    for (int i = 0; i < g_; ++i) s += plus_.count(i) ? '+' : 'o';
    return s;
  }

  friend bool operator==(const Band& a, const Band& b) { return a.g_ == b.g_ && a.plus_ == b.plus_; }
  friend bool operator!=(const Band& a, const Band& b) { return !(a == b); }
  friend bool operator<(const Band& a, const Band& b) {
    return a.g_ != b.g_ ? a.g_ < b.g_ : a.plus_ < b.plus_;
  }

 private:
  int g_ = 1;
  std::set<int> plus_;
};

struct Curve {
  int from = 0;
  long disp = 0;
  friend bool operator==(const Curve& a, const Curve& b) { return a.from == b.from && a.disp == b.disp; }
};

class Link {
 public:
  Link() = default;
  // Curves may be given in any order; stored sorted by source node.
  Link(Band source, Band target, std::vector<Curve> curves)
      : source_(std::move(source)), target_(std::move(target)), curves_(std::move(curves)) {
    std::sort(curves_.begin(), curves_.end(), [](const Curve& a, const Curve& b) { return a.from < b.from; });
    if (auto why = violation(); !why.empty()) throw std::invalid_argument("invalid link: " + why);
  }

  // The unique link sending the i-th source node to the (i+k)-th target node,
  // counted with winding on the universal cover. Every link has this form.
  static Link rotation(const Band& source, const Band& target, long k) {
    if (source.g() != target.g()) throw std::invalid_argument("link between bands of different g");
    const auto sn = source.nodes(), tn = target.nodes();
    if (sn.size() != tn.size()) throw std::invalid_argument("link between bands of different d");
    const long d = static_cast<long>(sn.size());
    const long g = source.g();
    std::vector<Curve> curves;
    for (long i = 0; i < d; ++i) {
      const long j = i + k;
      const long wraps = j >= 0 ? j / d : -((-j + d - 1) / d);
      const long lifted = tn[static_cast<std::size_t>(j - wraps * d)] + wraps * g;
      curves.push_back({sn[static_cast<std::size_t>(i)], lifted - sn[static_cast<std::size_t>(i)]});
    }
    return Link(source, target, std::move(curves));
  }

  static Link identity(const Band& b) { return rotation(b, b, 0); }

  // Each node to the next node rightward.
  static Link fundamental(const Band& b) {
    if (b.d() < 1) throw std::invalid_argument("fundamental link needs d >= 1");
    return rotation(b, b, 1);
  }

  // Every node one step right, onto the shifted band.
  static Link frobenius(const Band& b) {
    std::vector<Curve> curves;
    for (int x : b.nodes()) curves.push_back({x, 1});
    return Link(b, b.shifted(1), std::move(curves));
  }

  const Band& source() const { return source_; }
  const Band& target() const { return target_; }
  const std::vector<Curve>& curves() const { return curves_; }

  long total_displacement() const {
    long v = 0;
    for (const auto& c : curves_) v += c.disp;
    return v;
  }

  int image(int from) const { return mod(curve_at(from).disp + from, source_.g()); }

  const Curve& curve_at(int from) const {
    auto it = std::lower_bound(curves_.begin(), curves_.end(), from,
                               [](const Curve& c, int x) { return c.from < x; });
    if (it == curves_.end() || it->from != from) throw std::out_of_range("no curve at node " + std::to_string(from));
    return *it;
  }

  Link compose(const Link& next) const {
    if (target_ != next.source_) throw std::invalid_argument("compose: band mismatch");
    std::vector<Curve> out;
    for (const auto& c : curves_) out.push_back({c.from, c.disp + next.curve_at(image(c.from)).disp});
    return Link(source_, next.target_, std::move(out));
  }

  Link inverse() const {
    std::vector<Curve> out;
    for (const auto& c : curves_) out.push_back({image(c.from), -c.disp});
    return Link(target_, source_, std::move(out));
  }

  // Integer power of a self-link.
  Link power(long n) const {
    if (source_ != target_) throw std::invalid_argument("power of a link between distinct bands");
    Link base = n < 0 ? inverse() : *this;
    Link out = identity(source_);
    for (long i = 0; i < (n < 0 ? -n : n); ++i) out = out.compose(base);
    return out;
  }

  friend bool operator==(const Link& a, const Link& b) {
    return a.source_ == b.source_ && a.target_ == b.target_ && a.curves_ == b.curves_;
  }
  friend bool operator!=(const Link& a, const Link& b) { return !(a == b); }

 private:
  std::string violation() const {
    const int g = source_.g();
    if (target_.g() != g) return "source and target differ in g";
    const auto sn = source_.nodes(), tn = target_.nodes();
    if (sn.size() != tn.size()) return "source and target differ in node count";
    if (curves_.size() != sn.size()) return "curve count differs from node count";
    std::set<int> hit;
    for (std::size_t i = 0; i < curves_.size(); ++i) {
      if (curves_[i].from != sn[i]) return "curves do not start at the source nodes";
      const int to = mod(curves_[i].from + curves_[i].disp, g);
      if (!target_.is_node(to)) return "curve ends on a plus position";
      hit.insert(to);
    }
    if (hit.size() != tn.size()) return "curves are not a bijection";
    // Lifted endpoints must be strictly increasing within one period.
    for (std::size_t i = 0; i + 1 < curves_.size(); ++i)
      if (curves_[i].from + curves_[i].disp >= curves_[i + 1].from + curves_[i + 1].disp) return "curves cross";
    if (!curves_.empty() &&
        curves_.back().from + curves_.back().disp >= curves_.front().from + curves_.front().disp + g)
      return "curves cross";
    return {};
  }

  Band source_;
  Band target_;
  std::vector<Curve> curves_;
};

inline nlohmann::json to_json(const Band& b) {
  return {{"g", b.g()}, {"plus", std::vector<int>(b.plus().begin(), b.plus().end())}};
}

inline Band band_from_json(const nlohmann::json& j) {
  const auto plus = j.value("plus", std::vector<int>{});
  return Band(j.at("g").get<int>(), std::set<int>(plus.begin(), plus.end()));
}

inline nlohmann::json to_json(const Link& l) {
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& c : l.curves()) curves.push_back({{"from", c.from}, {"disp", c.disp}});
  return {{"source", to_json(l.source())}, {"target", to_json(l.target())}, {"curves", curves}};
}

inline Link link_from_json(const nlohmann::json& j) {
  std::vector<Curve> curves;
  for (const auto& c : j.at("curves")) curves.push_back({c.at("from").get<int>(), c.at("disp").get<long>()});
  return Link(band_from_json(j.at("source")), band_from_json(j.at("target")), std::move(curves));
}

}  // namespace semimeander
