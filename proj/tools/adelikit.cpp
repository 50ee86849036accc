// adelikit: batch front end. One process runs one job:
//   adelikit <command> <input.json> <output.json> [--order N] [--window N]
//            [--places p1,p2,...|auto] [--budget K] [--seed S] [--threads T]

#include <cmath>
#include <functional>
#include <iostream>

#include "CLI11.hpp"

#include "adelikit/json_io.hpp"

using namespace adelikit;

namespace {

struct Flags {
  std::optional<unsigned> order, window;
  std::optional<std::string> places;
  std::optional<uint64_t> budget, seed;
};

unsigned order_or(const Flags& f, const Node& doc, unsigned dflt) {
  if (f.order) return *f.order;
  if (doc.has("order")) {
    long o = doc["order"].integer();
    if (o <= 0) doc["order"].fail("order must be positive");
    return static_cast<unsigned>(o);
  }
  return dflt;
}

unsigned window_or(const Flags& f, const Node& doc, unsigned dflt) {
  if (f.window) return *f.window;
  if (doc.has("window")) {
    long w = doc["window"].integer();
    if (w <= 0) doc["window"].fail("window must be positive");
    return static_cast<unsigned>(w);
  }
  return dflt;
}

Place place_token(const std::string& t) {
  if (t == "inf") return Place::inf();
  if (t.rfind("p:", 0) == 0) return Place::parse(t);
  try {
    return Place::prime(Integer(t));
  } catch (const std::invalid_argument&) {
    throw DomainError("malformed place '" + t + "'", "--places");
  }
}

/// --places wins over the input's "places"; "auto" (or nothing) uses auto_fn.
std::vector<Place> resolve_places(const Flags& f, const Node& doc, const std::function<std::vector<Place>()>& auto_fn) {
  std::vector<Place> out;
  if (f.places && *f.places != "auto") {
    std::stringstream ss(*f.places);
    for (std::string t; std::getline(ss, t, ',');)
      if (!t.empty()) out.push_back(place_token(t));
  } else if (!f.places && doc.has("places") && doc["places"].json().is_array()) {
    Node ps = doc["places"];
    for (size_t i = 0; i < ps.size(); ++i) {
      if (ps[i].json().is_number_integer()) out.push_back(place_token(std::to_string(ps[i].integer())));
      else out.push_back(parse_place(ps[i]));
    }
  } else {
    out = auto_fn();
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

IdealInput ring_or_rationals(const Node& doc, const char* key) {
  if (doc.has(key)) return parse_ideal(doc[key]);
  return IdealInput{{}, zero_ideal(0)};
}

std::vector<size_t> index_list(const Node& n) {
  std::vector<size_t> out;
  for (size_t i = 0; i < n.size(); ++i) {
    long k = n[i].integer();
    if (k < 0) n[i].fail("index must be nonnegative");
    out.push_back(static_cast<size_t>(k));
  }
  return out;
}

Json bool_list(const std::vector<bool>& v) {
  Json a = Json::array();
  for (bool b : v) a.push_back(b);
  return a;
}

Json series_list(const std::vector<Series>& v, const MonomialOrder& ord) {
  Json a = Json::array();
  for (auto& s : v) a.push_back(to_json(s, ord));
  return a;
}

Json primes_json(const std::vector<Integer>& ps) {
  Json a = Json::array();
  for (auto& p : ps) a.push_back(Place{false, p}.str());
  return a;
}

// ------------------------------------------------------------ commands

Json cmd_norm(const Node& doc, const Flags& f) {
  auto I = parse_ideal(doc["ideal"]);
  Poly fp = parse_poly(doc["f"], I.vars);
  QuotientElement q = normal_form(fp, I.ideal);
  Json res;
  res["normal_form"] = to_json(q.rep, I.ideal->order);
  res["zero"] = q.is_zero();
  std::optional<NormProfile> prof;
  if (!q.is_zero()) prof = norm_profile(q);
  res["profile"] = prof ? to_json(*prof) : Json(nullptr);
  auto places = resolve_places(f, doc, [&] {
    std::vector<Place> v;
    if (prof)
      for (auto& [p, x] : prof->bad) v.push_back(p);
    return v;
  });
  std::optional<std::pair<unsigned, long>> oracle;
  if (doc.has("oracle")) {
    Node o = doc["oracle"];
    oracle = std::make_pair(static_cast<unsigned>(o["deg_bound"].integer()), o["height_bound"].integer());
  }
  Json rows = Json::array();
  for (auto& v : places) {
    auto nv = quotient_norm(q, v);
    Json row{{"place", v.str()}, {"value", to_json(nv.value)}, {"certified", nv.certified}};
    if (oracle) {
      auto r = brute_force_norm(q, v, oracle->first, oracle->second, f.budget ? *f.budget : 2000000);
      if (r.budget_exceeded) throw BudgetExceeded("oracle search budget exceeded at " + v.str());
      row["oracle"] = Json{{"value", to_json(r.value)}, {"lower_bound", to_json(r.lower_bound)},
                           {"candidates", r.candidates}, {"agrees", r.value == nv.value}};
    }
    rows.push_back(row);
  }
  res["places"] = rows;
  return res;
}

Json cmd_groebner(const Node& doc, const Flags&) {
  auto I = parse_ideal(doc["ideal"]);
  Json res = to_json(*I.ideal, I.vars);
  res["reduced"] = I.ideal->reduced;
  res["buchberger_criterion"] = satisfies_buchberger_criterion(*I.ideal);
  if (doc.has("reduce")) {
    Json nfs = Json::array();
    auto fs = parse_poly_list(doc["reduce"], I.vars);
    for (auto& p : fs) {
      Poly r = reduce_mod(p, *I.ideal);
      nfs.push_back(Json{{"normal_form", to_json(r, I.ideal->order)}, {"member", r.is_zero()}});
    }
    res["normal_forms"] = nfs;
  }
  return res;
}

struct Outer {
  std::vector<std::string> vars;
  Series series;
};

Outer parse_outer(const Node& n, const IdealInput& ring, unsigned order) {
  Outer o;
  o.vars = parse_vars(n["vars"]);
  if (n.has("poly")) {
    Poly B = parse_poly(n["poly"], o.vars);
    o.series = exact_series(ring.ideal, B);
  } else {
    o.series = parse_series(n["series"], ring, o.vars, order);
  }
  return o;
}

Json cmd_series(const Node& doc, const Flags& f) {
  auto ring = ring_or_rationals(doc, "ring");
  auto svars = parse_vars(doc["vars"]);
  unsigned N = order_or(f, doc, 10);
  std::string op = doc["op"].str();
  auto S = [&](const char* k) { return parse_series(doc[k], ring, svars, N); };
  auto inner = [&] {
    std::vector<Series> A;
    Node in = doc["inner"];
    for (size_t i = 0; i < in.size(); ++i) A.push_back(parse_series(in[i], ring, svars, N));
    return A;
  };
  const auto& ord = ring.ideal->order;
  Json res;
  if (op == "add") res["result"] = to_json(S("a") + S("b"), ord);
  else if (op == "mul") res["result"] = to_json(S("a") * S("b"), ord);
  else if (op == "derivative") {
    long i = doc["index"].integer();
    if (i < 1 || static_cast<size_t>(i) > svars.size()) doc["index"].fail("index out of range");
    res["result"] = to_json(S("f").derivative(static_cast<size_t>(i - 1)), ord);
  } else if (op == "invert") {
    res["result"] = to_json(invert(S("f"), N), ord);
  } else if (op == "compose") {
    auto B = parse_outer(doc["outer"], ring, N);
    res["result"] = to_json(compose(B.series, inner(), N), ord);
  } else if (op == "faa_di_bruno") {
    auto B = parse_outer(doc["outer"], ring, N);
    auto A = inner();
    Node jn = doc["J"];
    if (jn.size() != svars.size()) jn.fail("J has the wrong length");
    Monomial J(svars.size());
    for (size_t k = 0; k < J.size(); ++k) J[k] = static_cast<uint32_t>(jn[k].integer());
    Poly closed = faa_di_bruno_coefficient(B.series, A, J);
    Poly direct = compose(B.series, A, total_degree(J) + 1).coeff(J);
    res["closed_formula"] = to_json(closed, ord);
    res["substitution"] = to_json(direct, ord);
    res["agree"] = closed == direct;
  } else {
    doc["op"].fail("unknown op '" + op + "'");
  }
  return res;
}

EtaleChart parse_chart(const Node& n) {
  auto vars = parse_vars(n["vars"]);
  auto ideal = n.has("ideal") ? parse_poly_list(n["ideal"], vars) : std::vector<Poly>{};
  std::vector<Poly> nz;
  for (auto& g : ideal)
    if (!g.is_zero()) nz.push_back(g);
  auto etale = parse_poly_list(n["etale"], vars);
  long p = n["p"].integer();
  if (p < 1 || static_cast<size_t>(p) > etale.size()) n["p"].fail("need 1 <= p <= number of etale coordinates");
  return build_chart(vars, nz, etale, static_cast<size_t>(p));
}

Json chart_json(const EtaleChart& ch) {
  Json der = Json::array();
  for (auto& row : ch.a) {
    Json r = Json::array();
    for (auto& x : row) r.push_back(to_json(x, ch.ideal->order));
    der.push_back(r);
  }
  return Json{{"ideal", to_json(*ch.ideal, ch.vars)}, {"derivations", der}};
}

Json bounds_json(const BoundsReport& b) {
  Json tau = Json::array();
  for (auto& [v, e] : b.tau_log_p)
    tau.push_back(Json{{"place", v.str()}, {"log_p_tau", to_json(e)}, {"tau", to_json_double(std::pow(v.p.get_d(), e.get_d()))}});
  return Json{{"alpha", b.alpha}, {"beta", b.beta}, {"bad", primes_json(b.bad)}, {"tau_not_one", tau},
              {"degree_bound_ok", b.degree_bound_ok}, {"tau_one_off_bad", b.tau_one_off_bad}};
}

Json cmd_solve_tube(const Node& doc, const Flags& f) {
  unsigned N = order_or(f, doc, 10);
  Json res;
  TubeSolution sol;
  std::vector<std::string> ring_vars;
  if (doc.has("chart")) {
    auto ch = parse_chart(doc["chart"]);
    std::optional<std::vector<size_t>> rows;
    if (doc.has("minor_rows")) rows = index_list(doc["minor_rows"]);
    sol = parameterize_tube(ch, N, rows);
    ring_vars = ch.vars;
    res["chart"] = chart_json(ch);
    res["ring_E"] = to_json(*sol.ring, ch.vars);
  } else {
    auto ring = ring_or_rationals(doc, "ring");
    auto svars = parse_vars(doc["vars"]);
    auto bvars = parse_vars(doc["B_vars"]);
    auto B = parse_poly_list(doc["B"], bvars);
    std::vector<Series> C;
    Node cn = doc["C"];
    for (size_t i = 0; i < cn.size(); ++i) C.push_back(parse_series(cn[i], ring, svars, N));
    if (C.size() != B.size()) cn.fail("need one C_r per B_r");
    auto e = parse_poly_list(doc["e"], ring.vars);
    if (e.size() != bvars.size()) doc["e"].fail("point has the wrong length");
    std::vector<size_t> rows;
    if (doc.has("minor_rows")) rows = index_list(doc["minor_rows"]);
    else
      for (size_t i = 0; i < e.size(); ++i) rows.push_back(i);
    sol = solve_tube(B, C, e, rows, N);
    ring_vars = ring.vars;
  }
  res["minor_rows"] = sol.minor_rows;
  res["A"] = series_list(sol.A, sol.ring->order);
  res["residuals_zero"] = bool_list(sol.residual_zero);
  res["bounds"] = bounds_json(verify_bounds(sol));
  return res;
}

Json cmd_flatten(const Node& doc, const Flags& f) {
  unsigned N = order_or(f, doc, 10);
  auto ch = parse_chart(doc["chart"]);
  Poly a = parse_poly(doc["a"], ch.vars);
  auto sol = parameterize_tube(ch, N);
  Poly rep = flatten_rep(a, ch, N);
  Series along = along_tube(rep, sol);
  std::vector<bool> flat;
  for (size_t l = 0; l < ch.p; ++l) flat.push_back(along_tube(ch.derive(l, rep), sol).truncate(N - 1).is_zero());
  Json res;
  res["representative"] = to_json(rep, ch.ideal->order);
  res["along_tube"] = to_json(along, sol.ring->order);
  res["restriction_to_E"] = to_json(reduce_mod(a, *sol.ring), sol.ring->order);
  res["flat"] = bool_list(flat);
  return res;
}

Json cmd_tube_member(const Node& doc, const Flags& f) {
  auto T = parse_tube(doc["tube"]);
  Vec pt = parse_vec(doc["point"]);
  std::vector<Place> places;
  if (!f.places && doc.has("place")) places.push_back(parse_place(doc["place"]));
  else places = resolve_places(f, doc, [] { return std::vector<Place>{}; });
  if (places.empty()) throw DomainError("schema: no place given", "/place");
  Json rows = Json::array();
  for (auto& v : places) rows.push_back(Json{{"place", v.str()}, {"member", tube_membership(pt, T, v)}});
  return Json{{"results", rows}};
}

Json cmd_refine_tube(const Node& doc, const Flags&) {
  auto T = parse_tube(doc["T"]);
  auto Tp = parse_tube(doc["T_prime"]);
  std::vector<std::vector<Poly>> h;
  Node hn = doc["h"];
  for (size_t i = 0; i < hn.size(); ++i) h.push_back(parse_poly_list(hn[i], Tp.vars));
  auto g = parse_poly_list(doc["g"], Tp.vars);
  auto r = refine_tube(T, Tp, h, g);
  Json extra = Json::object(), cert = Json::object();
  for (auto& [p, k] : r.extra_powers) extra[Place{false, p}.str()] = k;
  for (auto& [p, ok] : r.certificate) cert[Place{false, p}.str()] = ok;
  return Json{{"tube", to_json(r.tube)}, {"tau0", r.tau0}, {"bad_primes", primes_json(r.bad_primes)},
              {"extra_powers", extra}, {"certificate", cert}};
}

/// {"connection", "v0", "rescale"?} or {"series": [[c_0, ...], ...]}.
GSystem parse_gsystem(const Node& doc, unsigned N) {
  GSystem g;
  if (doc.has("connection")) {
    auto c = parse_connection(doc["connection"]);
    g = flat_section(c, parse_vec(doc["v0"]), N);
  } else {
    Node s = doc["series"];
    for (size_t i = 0; i < s.size(); ++i) {
      QSeries comp;
      for (size_t n = 0; n < s[i].size() && n < N; ++n) comp.push_back(s[i][n].rational());
      comp.resize(N);
      g.comps.push_back(comp);
    }
    if (g.comps.empty()) s.fail("need at least one component");
    g.provenance = "explicit coefficients";
  }
  if (doc.has("rescale")) g = rescale(g, doc["rescale"].rational());
  return g;
}

Json cmd_flat_section(const Node& doc, const Flags& f) {
  unsigned N = order_or(f, doc, 16);
  auto c = parse_connection(doc["connection"]);
  Vec v0 = parse_vec(doc["v0"]);
  auto g = flat_section(c, v0, N);
  Json comps = Json::array();
  for (auto& comp : g.comps) comps.push_back(to_json(comp));
  Json res{{"residue", to_json(residue(c))}, {"order", N}, {"components", comps},
           {"ode_residual_zero", ode_residual_vanishes(c, g)}};
  if (doc.has("extension")) {
    Node ex = doc["extension"];
    std::vector<QSeries> ext;
    for (size_t i = 0; i < ex.size(); ++i) {
      QSeries comp;
      for (size_t n = 0; n < ex[i].size() && n < N; ++n) comp.push_back(ex[i][n].rational());
      comp.resize(N);
      ext.push_back(comp);
    }
    unsigned e = nilpotency_index_of(residue(c));
    auto g2 = flat_section_from_extension(c, ext, std::max(e, 1u));
    res["extension_agrees"] = g2.comps == g.comps;
  }
  res["provenance"] = g.provenance;
  return res;
}

std::vector<Place> denominator_places(const GSystem& g, size_t upto) {
  std::set<Integer> ps;
  for (auto& comp : g.comps)
    for (size_t n = 0; n < upto && n < comp.size(); ++n)
      if (comp[n] != 0)
        for (auto& p : prime_divisors(comp[n].get_den())) ps.insert(p);
  std::vector<Place> out;
  for (auto& p : ps) out.push_back(Place{false, p});
  out.push_back(Place::inf());
  return out;
}

Json radius_json(const PlaceRadius& r) {
  auto opt = [](const std::optional<double>& x) { return x ? to_json_double(*x) : Json(nullptr); };
  return Json{{"place", r.place.str()}, {"log_radius", opt(r.log_radius)},
              {"radius", r.log_radius ? to_json_double(r.radius()) : Json("infinite")},
              {"log_radius_lower", opt(r.log_radius_lower)}, {"log_radius_upper", opt(r.log_radius_upper)},
              {"below_one", r.below_one}};
}

Json cmd_radius(const Node& doc, const Flags& f) {
  unsigned W = window_or(f, doc, 64);
  auto g = parse_gsystem(doc, W + 1);
  auto places = resolve_places(f, doc, [&] { return denominator_places(g, W + 1); });
  auto prof = radius_profile(g, places, W);
  Json rows = Json::array();
  for (auto& r : prof.places) rows.push_back(radius_json(r));
  return Json{{"window", W}, {"places", rows}};
}

Json cmd_relevant(const Node& doc, const Flags& f) {
  unsigned N = order_or(f, doc, 128);
  if (N < 33) N = 33;
  auto g = parse_gsystem(doc, N);
  Rational xi = doc["xi"].rational();
  auto rel = relevant_places(xi, g);
  Json cands = Json::array();
  auto cp = candidate_places(xi);
  if (!cp.empty())
    for (auto& r : radius_profile(g, cp, N - 1).places) {
      Json row = radius_json(r);
      row["log_abs_xi"] = to_json_double(log_abs_value(xi, r.place));
      cands.push_back(row);
    }
  Json pl = Json::array();
  for (auto& v : rel) pl.push_back(v.str());
  return Json{{"xi", to_json(xi)}, {"places", pl}, {"candidates", cands}, {"weil_height", to_json_double(weil_height(xi))}};
}

Json cmd_height(const Node& doc, const Flags& f) {
  unsigned N = order_or(f, doc, 64);
  auto g = parse_gsystem(doc, N);
  auto h = truncated_height(g, N);
  return Json{{"N", N}, {"sigma", to_json_double(h.sigma)}, {"sigma_half", to_json_double(h.sigma_half)},
              {"sigma_quarter", to_json_double(h.sigma_quarter)}, {"divergent", h.divergent},
              {"statistic", "running-max truncated height proxy"}};
}

Json cmd_relation(const Node& doc, const Flags& f) {
  unsigned N = order_or(f, doc, 32);
  auto g = parse_gsystem(doc, std::max(N, 65u));
  std::vector<std::string> pv;
  if (doc.has("P_vars")) pv = parse_vars(doc["P_vars"]);
  else
    for (size_t i = 0; i < g.comps.size(); ++i) pv.push_back("x" + std::to_string(i + 1));
  if (pv.size() != g.comps.size()) doc["P_vars"].fail("need one variable per component");
  Poly P = parse_poly(doc["P"], pv);
  Rational xi = doc["xi"].rational();
  Place v = parse_place(doc["place"]);
  auto r = evaluate_relation(P, g, xi, v, N);
  return Json{{"value", to_json(r.value)}, {"abs_value", to_json(r.abs_value)}, {"homogeneous", r.homogeneous},
              {"log_tail_bound", r.log_tail_bound ? to_json_double(*r.log_tail_bound) : Json(nullptr)},
              {"tail_zero", r.log_tail_bound && std::isinf(*r.log_tail_bound) && *r.log_tail_bound < 0},
              {"caveat", r.caveat}};
}

Json cmd_weight(const Node& doc, const Flags&) {
  Matrix N = parse_matrix(doc["N"]);
  if (N.rows() != N.cols()) doc["N"].fail("matrix must be square");
  int w = doc.has("w") ? static_cast<int>(doc["w"].integer()) : 2;
  auto info = nilpotency_order(N, w);
  auto F = weight_filtration(N, w);
  auto ck = check_filtration(N, F);
  Json Ws = Json::array();
  for (size_t r = 0; r < F.W.size(); ++r)
    Ws.push_back(Json{{"r", r}, {"dim", F.W[r].dim()}, {"basis", to_json(F.W[r])}});
  Json closed = nullptr;
  if (info.k <= 3) {
    auto C = closed_form_filtration(N, w);
    bool same = true;
    for (size_t r = 0; r < F.W.size(); ++r) same = same && F.W[r] == C.W[r];
    closed = same;
  }
  return Json{{"k", info.k}, {"w", w}, {"warnings", info.warnings}, {"W", Ws}, {"graded_dims", F.graded_dims()},
              {"checks", {{"increasing", ck.increasing}, {"shifts_by_two", ck.shifts_by_two},
                          {"graded_isomorphisms", ck.hard_lefschetz}}},
              {"closed_form_agrees", closed}};
}

Json cmd_steenbrink(const Node& doc, const Flags&) {
  auto s = parse_strata(doc);
  std::vector<D1Maps> d1;
  if (doc.has("d1")) {
    Node dn = doc["d1"];
    for (size_t i = 0; i < dn.size(); ++i) {
      D1Maps m;
      m.p = static_cast<int>(dn[i]["p"].integer());
      m.q = static_cast<int>(dn[i]["q"].integer());
      if (dn[i].has("in")) m.in = parse_matrix(dn[i]["in"]);
      if (dn[i].has("out")) m.out = parse_matrix(dn[i]["out"]);
      d1.push_back(m);
    }
  }
  auto e = steenbrink_e1(s, d1);
  Json terms = Json::array();
  for (auto& t : e.terms) {
    Json row{{"p", t.p}, {"q", t.q}, {"dim", t.dim}, {"description", t.description}};
    if (t.e2_dim) row["e2_dim"] = *t.e2_dim;
    terms.push_back(row);
  }
  Json dims = Json::array();
  for (auto& t : e.terms) dims.push_back(t.dim);
  bool sym = e.dim(2, 0) == e.dim(-2, 4) && e.dim(1, 1) == e.dim(-1, 3);
  return Json{{"dims", dims}, {"terms", terms}, {"symmetric", sym}, {"vanishing", e.vanishing}};
}

Json cmd_threshold(const Node& doc, const Flags&) {
  long k = doc["k"].integer();
  Family fam = doc.has("family") ? parse_family(doc["family"].str()) : Family::Generic;
  std::optional<long> d;
  if (doc.has("dim_im_N")) d = doc["dim_im_N"].integer();
  return Json{{"jump", jump_threshold(k, d, fam)}};
}

const std::map<std::string, std::function<Json(const Node&, const Flags&)>>& commands() {
  static const std::map<std::string, std::function<Json(const Node&, const Flags&)>> m{
      {"norm", cmd_norm},
      {"groebner", cmd_groebner},
      {"series", cmd_series},
      {"solve-tube", cmd_solve_tube},
      {"flatten", cmd_flatten},
      {"tube-member", cmd_tube_member},
      {"refine-tube", cmd_refine_tube},
      {"flat-section", cmd_flat_section},
      {"radius", cmd_radius},
      {"relevant", cmd_relevant},
      {"height", cmd_height},
      {"relation", cmd_relation},
      {"weight-filtration", cmd_weight},
      {"steenbrink", cmd_steenbrink},
      {"threshold", cmd_threshold}};
  return m;
}

Json flags_json(const Flags& f) {
  Json j = Json::object();
  if (f.order) j["order"] = *f.order;
  if (f.window) j["window"] = *f.window;
  if (f.places) j["places"] = *f.places;
  if (f.budget) j["budget"] = *f.budget;
  if (f.seed) j["seed"] = *f.seed;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adelikit: adelic norms, tubes, G-functions and weight filtrations"};
  std::string command, input, output;
  Flags flags;
  unsigned threads = 1;
  std::vector<std::string> names;
  for (auto& [k, v] : commands()) names.push_back(k);
  app.add_option("command", command, "job to run")->required()->check(CLI::IsMember(names));
  app.add_option("input", input, "input JSON file")->required();
  app.add_option("output", output, "output JSON file")->required();
  app.add_option("--order", flags.order, "truncation order");
  app.add_option("--window", flags.window, "radius window");
  app.add_option("--places", flags.places, "comma-separated places (p:2,3,inf) or auto");
  app.add_option("--budget", flags.budget, "search budget for the norm oracle");
  app.add_option("--seed", flags.seed, "seed (recorded in the output)");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->default_val(1);
  CLI11_PARSE(app, argc, argv);
  set_threads(threads);

  Json out;
  out["schema"] = kSchema;
  out["command"] = command;
  out["flags"] = flags_json(flags);
  int code = 0;
  try {
    Json doc = read_json_file(input);
    require_schema(doc);
    Node root(doc, "");
    out["result"] = commands().at(command)(root, flags);
  } catch (const BudgetExceeded& e) {
    out["error"] = Json{{"kind", "budget"}, {"message", e.what()}, {"path", ""}};
    code = 3;
  } catch (const DomainError& e) {
    std::string msg = e.what();
    bool schema = msg.rfind("schema: ", 0) == 0;
    out["error"] = Json{{"kind", schema ? "schema" : "domain"}, {"message", msg}, {"path", e.path()}};
    code = 2;
  } catch (const std::exception& e) {
    out["error"] = Json{{"kind", "domain"}, {"message", e.what()}, {"path", ""}};
    code = 2;
  }
  try {
    write_json_atomic(output, out);
  } catch (const std::exception& e) {
    std::cerr << "adelikit: " << e.what() << "\n";
    return 1;
  }
  if (code) std::cerr << "adelikit: " << out["error"]["message"].get<std::string>() << "\n";
  return code;
}
