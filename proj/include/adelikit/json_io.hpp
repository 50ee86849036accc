#pragma once
// JSON encodings for the command-line tool ("adelikit/1" schema).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"

#include "adelikit/gfunctions.hpp"
#include "adelikit/parse.hpp"
#include "adelikit/tube.hpp"
#include "adelikit/weight.hpp"

namespace adelikit {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "adelikit/1";

/// A JSON value together with its path, for error messages.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const Json& json() const { return *j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& why) const { throw DomainError("schema: " + why, path_); }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }
  Node operator[](const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    auto it = j_->find(key);
    if (it == j_->end()) Node(*j_, path_ + "/" + key).fail("missing field");
    return Node(*it, path_ + "/" + key);
  }
  Node operator[](size_t i) const {
    if (!j_->is_array() || i >= j_->size()) fail("expected an array with element " + std::to_string(i));
    return Node((*j_)[i], path_ + "/" + std::to_string(i));
  }
  size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }
  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  long integer() const {
    if (j_->is_number_integer()) return j_->get<long>();
    if (j_->is_string()) {
      try {
        size_t used = 0;
        long v = std::stol(j_->get<std::string>(), &used);
        if (used == j_->get<std::string>().size()) return v;
      } catch (...) {
      }
    }
    fail("expected an integer");
  }
  Rational rational() const {
    if (j_->is_number_integer()) return Rational(j_->get<long>());
    if (!j_->is_string()) fail("expected a rational string");
    try {
      return parse_rational(j_->get<std::string>());
    } catch (const std::exception&) {
      fail("malformed rational '" + j_->get<std::string>() + "'");
    }
  }
  Integer big_integer() const {
    Rational q = rational();
    if (q.get_den() != 1) fail("expected an integer");
    return q.get_num();
  }

 private:
  const Json* j_;
  std::string path_;
};

// ------------------------------------------------------------ encoders

inline Json to_json(const Rational& q) { return q.get_str(); }
inline Json to_json(const Place& v) { return v.str(); }

/// %.12g rounding, so printed doubles are stable; non-finite values become null.
inline Json to_json_double(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  double y = std::strtod(buf, nullptr);
  if (y == 0) y = 0;  // drop the sign of zero
  return y;
}

inline Json to_json(const Poly& f, const MonomialOrder& ord = {}) {
  Json out = Json::array();
  for (auto& [m, c] : f.sorted_terms(ord)) out.push_back(Json::array({c.get_str(), m}));
  return out;
}

inline Json to_json(const GroebnerBasis& gb, const std::vector<std::string>& vars) {
  Json gens = Json::array();
  for (auto& g : gb.gens) gens.push_back(to_json(g, gb.order));
  return Json{{"vars", vars}, {"order", gb.order.name()}, {"gens", gens}};
}

inline Json to_json(const Series& s, const MonomialOrder& ord = {}) {
  Json coeffs = Json::array();
  std::vector<Monomial> keys;
  for (auto& [m, c] : s.coeffs()) keys.push_back(m);
  std::sort(keys.begin(), keys.end(), [](const Monomial& a, const Monomial& b) { return prec(a, b); });
  for (auto& m : keys) coeffs.push_back(Json::array({m, to_json(s.coeffs().at(m), ord)}));
  Json order = s.exact() ? Json("exact") : Json(s.order());
  return Json{{"order", order}, {"vars", s.nu()}, {"coeffs", coeffs}};
}

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (size_t i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (size_t j = 0; j < m.cols(); ++j) r.push_back(to_json(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

inline Json to_json(const Vec& v) {
  Json r = Json::array();
  for (auto& x : v) r.push_back(to_json(x));
  return r;
}

inline Json to_json(const Subspace& s) {
  Json b = Json::array();
  for (auto& v : s.basis()) b.push_back(to_json(v));
  return b;
}

inline Json to_json(const AdelicTube& t) {
  Json y = Json::array();
  for (auto& f : t.y) y.push_back(to_json(f));
  return Json{{"vars", t.vars}, {"ideal", to_json(*t.ideal, t.vars)["gens"]}, {"y", y},
              {"rho", t.rho.get_str()}, {"alpha", t.alpha}};
}

inline Json to_json(const NormProfile& p) {
  Json bad = Json::array();
  for (auto& [v, x] : p.bad) bad.push_back(Json::array({v.str(), x.get_str()}));
  Json cert = Json::object();
  for (auto& [v, c] : p.certified) cert[v.str()] = c;
  return Json{{"bad", bad}, {"default", "1"}, {"certified", cert}};
}

// ------------------------------------------------------------ decoders

inline std::vector<std::string> parse_vars(const Node& n) {
  std::vector<std::string> vars;
  std::set<std::string> seen;
  for (size_t i = 0; i < n.size(); ++i) {
    std::string v = n[i].str();
    if (v.empty() || !seen.insert(v).second) n[i].fail("variable names must be distinct and nonempty");
    vars.push_back(v);
  }
  return vars;
}

/// Infix string or a list of [coefficient, exponent-vector] pairs.
inline Poly parse_poly(const Node& n, const std::vector<std::string>& vars) {
  if (n.json().is_string()) {
    try {
      return parse_poly(n.str(), vars);
    } catch (const DomainError& e) {
      n.fail(e.what());
    }
  }
  if (n.json().is_number_integer()) return Poly(vars.size(), Rational(n.integer()));
  Poly f(vars.size());
  for (size_t i = 0; i < n.size(); ++i) {
    Node t = n[i];
    if (t.size() != 2) t.fail("term must be [coefficient, exponents]");
    Rational c = t[0].rational();
    Node e = t[1];
    if (e.size() != vars.size()) e.fail("exponent vector has the wrong length");
    Monomial m(vars.size());
    for (size_t k = 0; k < vars.size(); ++k) {
      long x = e[k].integer();
      if (x < 0) e[k].fail("negative exponent");
      m[k] = static_cast<uint32_t>(x);
    }
    f.add_term(m, c);
  }
  return f;
}

inline std::vector<Poly> parse_poly_list(const Node& n, const std::vector<std::string>& vars) {
  std::vector<Poly> out;
  for (size_t i = 0; i < n.size(); ++i) out.push_back(parse_poly(n[i], vars));
  return out;
}

struct IdealInput {
  std::vector<std::string> vars;
  Ideal ideal;
};

inline MonomialOrder parse_order(const Node& n) {
  try {
    return MonomialOrder::parse(n.str());
  } catch (const DomainError& e) {
    n.fail(e.what());
  }
}

inline IdealInput parse_ideal(const Node& n) {
  IdealInput in;
  in.vars = parse_vars(n["vars"]);
  MonomialOrder ord = n.has("order") ? parse_order(n["order"]) : MonomialOrder{};
  if (n.has("priority")) {
    Node pr = n["priority"];
    std::vector<int> perm;
    for (size_t i = 0; i < pr.size(); ++i) perm.push_back(static_cast<int>(pr[i].integer()));
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); ++i)
      if (sorted[i] != static_cast<int>(i) || sorted.size() != in.vars.size())
        pr.fail("priority must be a permutation of 0..n-1");
    ord.priority = perm;
  }
  auto gens = n.has("gens") ? parse_poly_list(n["gens"], in.vars) : std::vector<Poly>{};
  std::vector<Poly> nz;
  for (auto& g : gens)
    if (!g.is_zero()) nz.push_back(g);
  in.ideal = nz.empty() ? zero_ideal(in.vars.size(), ord) : groebner_basis(nz, in.vars.size(), ord);
  return in;
}

inline Vec parse_vec(const Node& n) {
  Vec v;
  for (size_t i = 0; i < n.size(); ++i) v.push_back(n[i].rational());
  return v;
}

inline Matrix parse_matrix(const Node& n, std::optional<size_t> cols = std::nullopt) {
  size_t r = n.size();
  size_t c = cols ? *cols : (r ? n[0].size() : 0);
  Matrix m(r, c);
  for (size_t i = 0; i < r; ++i) {
    if (n[i].size() != c) n[i].fail("row has the wrong length");
    for (size_t j = 0; j < c; ++j) m(i, j) = n[i][j].rational();
  }
  return m;
}

/// A series over `ring` in `svars`: an infix string in svars + ring vars, or
/// {"order", "coeffs": [[exps, poly], ...]}.
inline Series parse_series(const Node& n, const IdealInput& ring, const std::vector<std::string>& svars,
                           unsigned default_order) {
  size_t nu = svars.size(), rv = ring.vars.size();
  if (n.json().is_string() || n.json().is_number_integer()) {
    std::vector<std::string> all = svars;
    all.insert(all.end(), ring.vars.begin(), ring.vars.end());
    std::set<std::string> uniq(all.begin(), all.end());
    if (uniq.size() != all.size()) n.fail("series variables clash with ring variables");
    Poly f = parse_poly(n, all);
    Series s(ring.ideal, nu, default_order);
    for (auto& [m, c] : f.terms()) {
      Monomial J(m.begin(), m.begin() + nu), R(m.begin() + nu, m.end());
      s.add_to(J, Poly::term(R, c));
    }
    return s;
  }
  unsigned order = default_order;
  if (n.has("order") && n["order"].json() == "exact") {
    order = kExact;
  } else if (n.has("order")) {
    long o = n["order"].integer();
    if (o < 0) n["order"].fail("order must be nonnegative");
    order = static_cast<unsigned>(o);
  }
  Series s(ring.ideal, nu, order);
  Node cs = n["coeffs"];
  for (size_t i = 0; i < cs.size(); ++i) {
    Node e = cs[i][0];
    if (e.size() != nu) e.fail("exponent vector has the wrong length");
    Monomial J(nu);
    for (size_t k = 0; k < nu; ++k) {
      long x = e[k].integer();
      if (x < 0) e[k].fail("negative exponent");
      J[k] = static_cast<uint32_t>(x);
    }
    s.add_to(J, parse_poly(cs[i][1], ring.vars));
  }
  (void)rv;
  return s;
}

inline AdelicTube parse_tube(const Node& n) {
  AdelicTube t;
  t.vars = parse_vars(n["vars"]);
  std::vector<Poly> gens = n.has("ideal") ? parse_poly_list(n["ideal"], t.vars) : std::vector<Poly>{};
  std::vector<Poly> nz;
  for (auto& g : gens)
    if (!g.is_zero()) nz.push_back(g);
  t.ideal = nz.empty() ? zero_ideal(t.vars.size()) : groebner_basis(nz, t.vars.size());
  t.y = parse_poly_list(n["y"], t.vars);
  t.rho = n["rho"].big_integer();
  long a = n["alpha"].integer();
  if (a < 2) n["alpha"].fail("alpha must be at least 2");
  t.alpha = static_cast<unsigned>(a);
  if (t.rho == 0) n["rho"].fail("rho must be nonzero");
  return t;
}

inline LogConnection parse_connection(const Node& n) {
  LogConnection c;
  long m = n["dim"].integer();
  if (m <= 0) n["dim"].fail("dimension must be positive");
  c.m = static_cast<size_t>(m);
  Node es = n["entries"];
  if (es.size() != c.m * c.m) es.fail("need dim*dim entries");
  std::vector<std::string> s{"s"};
  for (size_t k = 0; k < es.size(); ++k) {
    Node e = es[k];
    if (e.json().is_array() && e.size() == 2 && !e[0].json().is_array()) {
      c.num.push_back(parse_poly(e[0], s));
      c.den.push_back(parse_poly(e[1], s));
    } else {
      c.num.push_back(parse_poly(e, s));
      c.den.push_back(Poly(1, 1));
    }
    if (c.den.back().is_zero()) e.fail("zero denominator");
  }
  return c;
}

inline StrataData parse_strata(const Node& n) {
  StrataData s;
  auto get = [](const Node& o, const char* k, long dflt) { return o.has(k) ? o[k].integer() : dflt; };
  if (n.has("components")) {
    Node cs = n["components"];
    for (size_t i = 0; i < cs.size(); ++i) s.components.push_back({get(cs[i], "h0", 1), get(cs[i], "h1", 0), get(cs[i], "h2", 0)});
  }
  if (n.has("double_curves")) {
    Node cs = n["double_curves"];
    for (size_t i = 0; i < cs.size(); ++i) s.double_curves.push_back({get(cs[i], "h0", 1), get(cs[i], "h1", 0)});
  }
  s.triple_points = get(n, "triple_points", 0);
  try {
    s.validate();
  } catch (const DomainError& e) {
    n.fail(e.what());
  }
  return s;
}

inline Place parse_place(const Node& n) {
  try {
    return Place::parse(n.str());
  } catch (const std::exception& e) {
    n.fail(e.what());
  }
}

inline void require_schema(const Json& doc) {
  Node root(doc, "");
  if (!doc.is_object()) root.fail("document must be an object");
  if (!doc.contains("schema")) Node(doc, "/schema").fail("missing field");
  if (!doc["schema"].is_string() || doc["schema"].get<std::string>() != kSchema)
    Node(doc["schema"], "/schema").fail(std::string("schema must be \"") + kSchema + "\"");
}

// ------------------------------------------------------------ files

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open input file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw DomainError(std::string("schema: input is not valid JSON: ") + e.what(), "");
  }
}

/// Writes via a temporary file and rename.
inline void write_json_atomic(const std::string& path, const Json& doc) {
  std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace adelikit
