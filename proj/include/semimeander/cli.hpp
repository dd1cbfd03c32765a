#pragma once

// Command-line front end. run_cli() is the whole program; the executable in
// tools/ only forwards argv.

#include "semimeander.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace semimeander::cli {

enum Exit { Ok = 0, VerificationFailed = 1, Usage = 2 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + csv_field(fields[i]);
  return out + "\r\n";
}

inline std::string table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], row[i].size());
    }
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << row[i];
      if (i + 1 < row.size()) os << std::string(width[i] - row[i].size() + 2, ' ');
    }
    os << "\n";
  }
  return os.str();
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      throw UsageError("bad integer in list: " + item);
    }
    if (used != item.size()) throw UsageError("bad integer in list: " + item);
    out.insert(v);
  }
  return out;
}

inline Rational parse_rational(const std::string& s) {
  Rational q;
  if (q.set_str(s, 10) != 0 || q.get_den() == 0) throw UsageError("bad rational: " + s);
  q.canonicalize();
  return q;
}

inline std::string plus_string(const Band& b) {
  std::string out;
  for (int x : b.plus()) out += (out.empty() ? "" : ",") + std::to_string(x);
  return out;
}

struct Options {
  int g = 0;
  std::string plus;
  int r = 0;
  int d = -1;
  int tcount = 0;
  std::string alpha, beta, tp, sp;
  std::string p = "2";
  std::string format = "ascii";
  std::string cache_dir;
  int max_g = 12;
  std::string regime = "split";
  int sweep_g_min = 0;
  int sweep_g_max = -1;
  long max_basis = 252;
  unsigned jobs = 1;
  bool normalized = false;
  bool with_det = false;
  std::string diagram;
  std::string T;
};

inline Band band_of(const Options& o) {
  if (o.g < 1) throw UsageError("--g must be positive");
  if (o.g > o.max_g) throw UsageError("g exceeds --max-g");
  for (int x : parse_list(o.plus))
    if (x < 0 || x >= o.g) throw UsageError("plus position out of range [0, g)");
  return Band(o.g, parse_list(o.plus));
}

inline void check_r(const Band& b, int r) {
  if (r < 0 || 2 * r > b.d()) throw UsageError("--r must lie in [0, d/2]");
}

inline SatakeParams satake_of(const Options& o, int g, std::ostream& err) {
  const Integer p(o.p);
  if (!is_prime(p)) throw UsageError("--p must be prime");
  const bool ab = !o.alpha.empty() || !o.beta.empty();
  const bool hecke = !o.tp.empty() || !o.sp.empty();
  if (ab && hecke) throw UsageError("give either --alpha/--beta or --tp/--sp, not both");
  if (ab) {
    if (o.alpha.empty() || o.beta.empty()) throw UsageError("--alpha and --beta go together");
    return SatakeParams::rational(parse_rational(o.alpha), parse_rational(o.beta), p, g);
  }
  if (hecke) {
    if (o.tp.empty() || o.sp.empty()) throw UsageError("--tp and --sp go together");
    const auto q = satake_from_hecke(parse_rational(o.tp), parse_rational(o.sp), p, g);
    if (q.alpha) return SatakeParams::rational(*q.alpha, *q.beta, p, g);
    err << "note: Hecke polynomial has irrational roots; using formal parameters\n";
  }
  return SatakeParams::symbolic(p, g);
}

inline std::string arcs_string(const Meander& m) {
  std::string out;
  for (const auto& a : m.arcs()) out += "(" + std::to_string(a.left) + "," + std::to_string(a.right) + ")";
  return out;
}

// ---------------------------------------------------------------------------

inline int cmd_enumerate(const Options& o, std::ostream& out) {
  const Band b = band_of(o);
  check_r(b, o.r);
  const auto ms = enumerate(b, o.r);
  if (o.format == "json") {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& m : ms) list.push_back(to_json(m));
    out << nlohmann::json{{"band", to_json(b)}, {"r", o.r}, {"count", ms.size()}, {"meanders", list}}.dump(2) << "\n";
  } else if (o.format == "csv") {
    out << csv_row({"index", "arcs", "semilines", "total_span", "basic_arcs"});
    for (std::size_t i = 0; i < ms.size(); ++i) {
      std::string semis;
      for (int s : ms[i].semilines()) semis += (semis.empty() ? "" : ",") + std::to_string(s);
      out << csv_row({std::to_string(i), arcs_string(ms[i]), semis, std::to_string(ms[i].total_span()),
                      std::to_string(ms[i].basic_arcs().size())});
    }
  } else {
    out << ms.size() << " semi-meanders\n";
    for (std::size_t i = 0; i < ms.size(); ++i)
      out << "\n#" << i << "  span " << ms[i].total_span() << "\n" << render_ascii(ms[i]) << "\n";
  }
  return Ok;
}

inline int cmd_gram(const Options& o, std::ostream& out) {
  const Band b = band_of(o);
  check_r(b, o.r);
  const auto gm = gram_matrix(b, o.r, o.jobs);
  std::optional<RingElement> det;
  if (o.with_det) det = gram_determinant(gm);
  if (o.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : gm.entries) {
      nlohmann::json jr = nlohmann::json::array();
      for (const auto& e : row) jr.push_back(e.to_string());
      rows.push_back(jr);
    }
    nlohmann::json basis = nlohmann::json::array();
    for (const auto& m : gm.basis) basis.push_back(to_json(m));
    nlohmann::json j{{"band", to_json(b)}, {"r", o.r}, {"basis", basis}, {"entries", rows}};
    if (det) j["determinant"] = to_json(*det);
    out << j.dump(2) << "\n";
  } else if (o.format == "csv") {
    for (const auto& row : gm.entries) {
      std::vector<std::string> f;
      for (const auto& e : row) f.push_back(e.to_string());
      out << csv_row(f);
    }
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : gm.entries) {
      std::vector<std::string> f;
      for (const auto& e : row) f.push_back(e.to_string());
      rows.push_back(f);
    }
    out << table(rows);
    if (det) out << "det = " << to_string(*det) << "\n";
  }
  return Ok;
}

// One verification row, as JSON so cached and fresh rows print identically.
inline nlohmann::json verify_row(const Band& b, int r, const std::string& cache_dir) {
  const std::string key = "verify|g=" + std::to_string(b.g()) + "|plus=" + plus_string(b) + "|r=" + std::to_string(r);
  std::filesystem::path file;
  if (!cache_dir.empty()) {
    std::ostringstream name;
    name << std::hex << std::setw(16) << std::setfill('0') << fnv1a(key) << ".json";
    file = std::filesystem::path(cache_dir) / name.str();
    std::ifstream in(file);
    if (in) {
      try {
        auto j = nlohmann::json::parse(in);
        if (j.value("key", "") == key) return j.at("row");
      } catch (const nlohmann::json::exception&) {
        // unreadable cache entry: recompute
      }
    }
  }
  const auto rep = verify_closed_form(b, r);
  nlohmann::json row{{"g", b.g()},  {"plus", plus_string(b)}, {"r", r},          {"d", b.d()},
                     {"t", rep.t.get_str()}, {"form", rep.form}, {"sign", rep.sign == 1 ? "+" : rep.sign == -1 ? "-" : "none"},
                     {"exponents_multiple_of_g", rep.exponents_multiple_of_g}, {"pass", rep.pass},
                     {"size", enumerate(b, r).size()}};
  if (!file.empty()) {
    std::filesystem::create_directories(file.parent_path());
    auto tmp = file;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
      std::ofstream outf(tmp);
      outf << nlohmann::json{{"key", key}, {"row", row}}.dump() << "\n";
    }
    std::filesystem::rename(tmp, file);
  }
  return row;
}

inline std::vector<std::pair<Band, int>> sweep_cases(const Options& o) {
  std::vector<std::pair<Band, int>> cases;
  if (o.sweep_g_max < 0) {
    const Band b = band_of(o);
    check_r(b, o.r);
    cases.emplace_back(b, o.r);
    return cases;
  }
  if (o.sweep_g_max > o.max_g) throw UsageError("sweep exceeds --max-g");
  for (int g = std::max(1, o.sweep_g_min); g <= o.sweep_g_max; ++g)
    for (unsigned mask = 0; mask < (1U << g); ++mask) {
      std::set<int> plus;
      for (int i = 0; i < g; ++i)
        if (mask & (1U << i)) plus.insert(i);
      const Band b(g, plus);
      if (b.d() < 1) continue;
      for (int r = 0; 2 * r <= b.d(); ++r)
        if (binomial(static_cast<unsigned long>(b.d()), static_cast<unsigned long>(r)) <= o.max_basis)
          cases.emplace_back(b, r);
    }
  return cases;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
  const auto cases = sweep_cases(o);
  std::vector<nlohmann::json> rows(cases.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < cases.size();) {
      try {
        rows[i] = verify_row(cases[i].first, cases[i].second, o.cache_dir);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < std::max(1U, o.jobs); ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  bool all = true;
  for (const auto& row : rows) all = all && row.at("pass").get<bool>();
  const std::vector<std::string> cols{"g", "plus", "r", "d", "t", "sign", "form", "pass"};
  auto cell = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  if (o.format == "json") {
    out << nlohmann::json{{"rows", rows}, {"all_pass", all}}.dump(2) << "\n";
  } else if (o.format == "csv") {
    out << csv_row(cols);
    for (const auto& row : rows) {
      std::vector<std::string> f;
      for (const auto& c : cols) f.push_back(cell(row.at(c)));
      out << csv_row(f);
    }
  } else {
    std::vector<std::vector<std::string>> t{cols};
    for (const auto& row : rows) {
      std::vector<std::string> f;
      for (const auto& c : cols) f.push_back(cell(row.at(c)));
      t.push_back(f);
    }
    out << table(t) << rows.size() << " rows, " << (all ? "all pass" : "FAILURES") << "\n";
  }
  return all ? Ok : VerificationFailed;
}

inline int cmd_spectrum(const Options& o, std::ostream& out, std::ostream& err) {
  int d = o.d;
  int g = o.g;
  if (d < 0) {
    const Band b = band_of(o);
    d = b.d();
  }
  if (g < 1) g = d;
  if (o.tcount < 0) throw UsageError("--tcount must be nonnegative");
  const auto sp = satake_of(o, g, err);
  auto lines = frobenius_spectrum(d, o.tcount, sp);
  if (o.normalized) lines = normalized_spectrum(lines, sp);
  if (o.format == "json") {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& l : lines) list.push_back(to_json(l));
    out << nlohmann::json{{"d", d}, {"tcount", o.tcount}, {"lines", list}}.dump(2) << "\n";
  } else if (o.format == "csv") {
    out << to_csv(lines);
  } else {
    std::vector<std::vector<std::string>> t{{"i", "eigenvalue", "value", "multiplicity"}};
    for (const auto& l : lines)
      t.push_back({std::to_string(l.i), l.eigenvalue.to_string(), l.value ? l.value->get_str() : "-",
                   l.multiplicity.get_str()});
    out << table(t);
  }
  return Ok;
}

inline int cmd_intersection(const Options& o, std::ostream& out, std::ostream& err) {
  const Band b = band_of(o);
  check_r(b, o.r);
  if (o.regime != "split" && o.regime != "inert") throw UsageError("--regime must be inert or split");
  const Regime regime = o.regime == "split" ? Regime::Split : Regime::Inert;
  const auto basis = enumerate(b, o.r);
  nlohmann::json entries = nlohmann::json::array();
  std::vector<std::vector<std::string>> t{{"a", "b", "kind", "m0", "mT", "mv", "indentation", "shift"}};
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      const auto e = intersection_entry(basis[i], basis[j], i, j, regime);
      entries.push_back(to_json(e));
      if (const auto* l = std::get_if<EntryLedger>(&e)) {
        std::string shift;
        for (const auto& [sym, k] : l->shift) shift += (shift.empty() ? "" : " ") + sym + "^" + std::to_string(k);
        t.push_back({std::to_string(i), std::to_string(j), "ledger", std::to_string(l->m0), std::to_string(l->mT),
                     l->mv ? std::to_string(*l->mv) : "-", std::to_string(l->indentation), shift.empty() ? "1" : shift});
      } else {
        t.push_back({std::to_string(i), std::to_string(j), "lower-dim", "-", "-", "-", "-", "-"});
      }
    }
  std::optional<IntersectionDeterminant> det;
  if (o.r >= 1) det = intersection_determinant(b, o.r, satake_of(o, b.g(), err));
  if (o.format == "json") {
    nlohmann::json j{{"band", to_json(b)}, {"r", o.r}, {"regime", o.regime}, {"entries", entries}};
    if (det) j["determinant"] = to_json(*det);
    out << j.dump(2) << "\n";
  } else if (o.format == "csv") {
    for (const auto& row : t) out << csv_row(row);
  } else {
    out << table(t);
    if (det) out << "determinant: " << to_json(*det).dump() << "\n";
  }
  return Ok;
}

inline int cmd_tate(const Options& o, std::ostream& out, std::ostream& err) {
  const Band b = band_of(o);
  check_r(b, o.r);
  if (o.r < 1) throw UsageError("tate needs r >= 1");
  if (o.alpha.empty() && o.beta.empty() && o.tp.empty() && o.sp.empty())
    throw UsageError("tate needs --alpha/--beta or --tp/--sp");
  const auto rep = tate_report(b, o.r, o.tcount, satake_of(o, b.g(), err));
  if (o.format == "json") {
    out << to_json(rep).dump(2) << "\n";
    return Ok;
  }
  out << "band: g=" << b.g() << " plus={" << plus_string(b) << "} d=" << b.d() << " r=" << o.r
      << " tcount=" << o.tcount << "\n"
      << "target eigenvalue: " << rep.target.to_string();
  if (rep.target_value) out << " = " << rep.target_value->get_str();
  out << "\n"
      << "dimension: " << rep.dimension.get_str() << "\n"
      << "cycles: " << rep.cycles << "\n"
      << "generic: " << (rep.generic ? (*rep.generic ? "yes" : "no") : "symbolic") << "\n"
      << "intersection determinant: " << to_string(rep.determinant.verdict) << " (" << rep.determinant.criterion
      << ")\n"
      << "isomorphism: " << rep.conclusion;
  if (rep.conclusion != "yes") out << " (" << rep.reason << ")";
  out << "\n";
  return Ok;
}

inline int cmd_profile(const Options& o, std::ostream& out) {
  if (o.diagram.empty()) throw UsageError("profile needs --diagram");
  Meander m;
  try {
    m = parse_ascii(o.diagram);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto prof = go_profile(m, parse_list(o.T));
  if (o.format == "json") {
    out << nlohmann::json{{"meander", to_json(m)}, {"profile", to_json(prof)}}.dump(2) << "\n";
    return Ok;
  }
  out << render_ascii(m) << "\n"
      << "codimension: " << prof.codimension << "  fiber dimension: " << prof.fiber_dimension << "\n";
  for (const auto& c : prof.conditions) out << c.rendered << "\n";
  if (prof.unanchored) out << "(unanchored shape)\n";
  return Ok;
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Periodic semi-meanders, Gram determinants and Frobenius spectra"};
  app.require_subcommand(1);
  Options o;

  auto band_opts = [&o](CLI::App* c) {
    c->add_option("--g", o.g, "number of positions");
    c->add_option("--plus", o.plus, "comma list of plus positions");
    c->add_option("--r", o.r, "number of arcs");
    c->add_option("--max-g", o.max_g, "refuse bands with more positions");
  };
  auto format_opt = [&o](CLI::App* c) {
    c->add_option("--format", o.format, "ascii | json | csv")->check(CLI::IsMember({"ascii", "json", "csv"}));
  };
  auto satake_opts = [&o](CLI::App* c) {
    c->add_option("--alpha", o.alpha, "Satake parameter (rational)");
    c->add_option("--beta", o.beta, "Satake parameter (rational)");
    c->add_option("--tp", o.tp, "Hecke eigenvalue T_p");
    c->add_option("--sp", o.sp, "Hecke eigenvalue S_p");
    c->add_option("--p", o.p, "prime");
    c->add_option("--tcount", o.tcount, "size of T");
  };

  auto* en = app.add_subcommand("enumerate", "list semi-meanders");
  band_opts(en);
  format_opt(en);

  auto* gr = app.add_subcommand("gram", "Gram matrix");
  band_opts(gr);
  format_opt(gr);
  gr->add_flag("--det", o.with_det, "also print the determinant");
  gr->add_option("--jobs", o.jobs, "worker threads");

  auto* ve = app.add_subcommand("verify", "check determinants against the closed form");
  band_opts(ve);
  format_opt(ve);
  ve->add_option("--sweep-g-min", o.sweep_g_min, "smallest g of a sweep");
  ve->add_option("--sweep-g-max", o.sweep_g_max, "largest g of a sweep");
  ve->add_option("--max-basis", o.max_basis, "skip cases with a larger basis");
  ve->add_option("--cache-dir", o.cache_dir, "directory for cached rows");
  ve->add_option("--jobs", o.jobs, "worker threads");

  auto* spc = app.add_subcommand("spectrum", "Frobenius eigenvalues");
  band_opts(spc);
  format_opt(spc);
  satake_opts(spc);
  spc->add_option("--d", o.d, "number of nodes (instead of a band)");
  spc->add_flag("--normalized", o.normalized, "square-root normalization");

  auto* in = app.add_subcommand("intersection", "intersection ledgers and determinant");
  band_opts(in);
  format_opt(in);
  satake_opts(in);
  in->add_option("--regime", o.regime, "inert | split");

  auto* ta = app.add_subcommand("tate", "Tate report");
  band_opts(ta);
  format_opt(ta);
  satake_opts(ta);

  auto* pr = app.add_subcommand("profile", "Goren-Oort profile of a diagram");
  format_opt(pr);
  pr->add_option("--diagram", o.diagram, "ASCII line such as '()())|('");
  pr->add_option("--T", o.T, "comma list of plus positions in T");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Ok : Usage;
  }

  try {
    if (*en) return cmd_enumerate(o, out);
    if (*gr) return cmd_gram(o, out);
    if (*ve) return cmd_verify(o, out);
    if (*spc) return cmd_spectrum(o, out, err);
    if (*in) return cmd_intersection(o, out, err);
    if (*ta) return cmd_tate(o, out, err);
    if (*pr) return cmd_profile(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return Usage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return Usage;
  }
  return Usage;
}

}  // namespace semimeander::cli
