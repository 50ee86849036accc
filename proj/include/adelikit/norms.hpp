#pragma once
// Quotient norms on A/I at every finite place, a search oracle for them,
// and adelicity fitting for coefficient streams.

#include <map>
#include <set>

#include "adelikit/groebner.hpp"
#include "adelikit/parallel.hpp"

namespace adelikit {

/// max_J |a_J|_v
inline Rational gauss_norm(const Poly& f, const Place& v) {
  Rational m = 0;
  for (auto& [mono, c] : f.terms()) m = std::max(m, abs_value(c, v));
  return m;
}

/// Primes dividing a leading coefficient or a coefficient denominator of the
/// basis. Outside this set lead reduction is norm-minimal.
inline std::vector<Integer> basis_primes(const GroebnerBasis& gb) {
  std::set<Integer> s;
  for (auto& g : gb.gens) {
    for (auto& p : prime_divisors(g.lead(gb.order).second.get_num())) s.insert(p);
    for (auto& [m, c] : g.terms())
      for (auto& p : prime_divisors(c.get_den())) s.insert(p);
  }
  return {s.begin(), s.end()};
}

/// Primes dividing a numerator or denominator of some coefficient.
inline std::vector<Integer> coefficient_primes(const Poly& f) {
  std::set<Integer> s;
  for (auto& [m, c] : f.terms()) {
    for (auto& p : prime_divisors(c.get_num())) s.insert(p);
    for (auto& p : prime_divisors(c.get_den())) s.insert(p);
  }
  return {s.begin(), s.end()};
}

inline void require_base_point(const GroebnerBasis& gb) {
  for (auto& g : gb.gens)
    if (g.constant_term() != 0) throw DomainError("ideal does not pass through 0: generator has a constant term");
}

struct NormValue {
  Rational value;
  bool certified;
};

inline NormValue quotient_norm(const QuotientElement& f, const Place& v) {
  if (v.infinite) throw DomainError("quotient norms are defined at finite places only");
  require_base_point(*f.ideal);
  bool certified = true;
  for (auto& p : basis_primes(*f.ideal)) certified = certified && p != v.p;
  if (f.is_zero()) return {0, true};
  return {gauss_norm(f.rep, v), certified};
}

struct NormProfile {
  std::map<Place, Rational> bad;  // places with value != 1, or uncertified
  std::map<Place, bool> certified;

  Rational value_at(const Place& v) const {
    auto it = bad.find(v);
    return it == bad.end() ? Rational(1) : it->second;
  }
  bool certified_at(const Place& v) const {
    auto it = certified.find(v);
    return it == certified.end() || it->second;
  }
};

inline NormProfile norm_profile(const QuotientElement& f) {
  if (f.is_zero()) throw DomainError("norm profile of the zero coset");
  require_base_point(*f.ideal);
  std::set<Integer> cand;
  for (auto& p : basis_primes(*f.ideal)) cand.insert(p);
  for (auto& p : coefficient_primes(f.rep)) cand.insert(p);
  std::vector<Integer> ps(cand.begin(), cand.end());
  std::vector<NormValue> vals(ps.size());
  parallel_for(ps.size(), [&](size_t i) { vals[i] = quotient_norm(f, Place{false, ps[i]}); });
  NormProfile prof;
  for (size_t i = 0; i < ps.size(); ++i) {
    Place v{false, ps[i]};
    if (vals[i].value != 1 || !vals[i].certified) {
      prof.bad[v] = vals[i].value;
      prof.certified[v] = vals[i].certified;
    }
  }
  return prof;
}

// ------------------------------------------------------------ oracle

struct OracleResult {
  bool budget_exceeded = false;
  Rational value;                 // min ||f + sum h_i g_i||_v found
  Rational lower_bound;           // min over all h_i of degree <= deg_bound
  std::vector<Poly> multipliers;  // a witness h_i attaining `value`
  size_t candidates = 0;
};

namespace detail {

/// min over c in Q_p^k of ||b + sum c_j cols_j||_p, by elimination with
/// pivots of largest p-adic size. Also returns one minimizing c.
inline std::pair<Rational, Vec> padic_distance(const std::vector<Vec>& cols, const Vec& b, const Integer& p) {
  size_t n = b.size(), k = cols.size();
  Place v{false, p};
  std::vector<Vec> w = cols;  // working columns
  std::vector<Vec> t(k, Vec(k));  // w_j = sum_i t_j[i] cols_i
  for (size_t j = 0; j < k; ++j) t[j][j] = 1;
  std::vector<bool> used(k, false), prow(n, false);
  std::vector<std::pair<size_t, size_t>> piv;  // (column, row)
  for (;;) {
    Rational best = 0;
    size_t bc = 0, br = 0;
    for (size_t j = 0; j < k; ++j) {
      if (used[j]) continue;
      for (size_t r = 0; r < n; ++r) {
        if (prow[r] || w[j][r] == 0) continue;
        Rational a = abs_value(w[j][r], v);
        if (a > best) best = a, bc = j, br = r;
      }
    }
    if (best == 0) break;
    Rational s = 1 / w[bc][br];
    for (auto& x : w[bc]) x *= s;
    for (auto& x : t[bc]) x *= s;
    for (size_t j = 0; j < k; ++j) {
      if (j == bc || w[j][br] == 0) continue;
      Rational f = w[j][br];
      for (size_t r = 0; r < n; ++r) w[j][r] -= f * w[bc][r];
      for (size_t i = 0; i < k; ++i) t[j][i] -= f * t[bc][i];
    }
    used[bc] = true;
    prow[br] = true;
    piv.push_back({bc, br});
  }
  Vec rem = b, c(k);
  for (auto [j, r] : piv) {
    Rational f = rem[r];
    if (f == 0) continue;
    for (size_t q = 0; q < n; ++q) rem[q] -= f * w[j][q];
    for (size_t i = 0; i < k; ++i) c[i] -= f * t[j][i];
  }
  Rational d = 0;
  for (auto& x : rem) d = std::max(d, abs_value(x, v));
  return {d, c};
}

inline std::vector<Rational> height_box(long H) {
  std::set<Rational> s;
  for (long d = 1; d <= H; ++d)
    for (long n = -H; n <= H; ++n) s.insert(make_rational(n, d));
  return {s.begin(), s.end()};
}

inline bool in_box(const Rational& q, long H) { return abs(q.get_num()) <= H && q.get_den() <= H; }

}  // namespace detail

/// Minimum of ||f + sum_i h_i g_i||_v over multipliers h_i of degree <=
/// deg_bound whose coefficients have numerator and denominator <= height_bound.
/// Gives up (budget_exceeded) rather than answer after a partial search.
inline OracleResult brute_force_norm(const QuotientElement& f, const Place& v, unsigned deg_bound,
                                     long height_bound, size_t budget = 2000000) {
  if (v.infinite) throw DomainError("quotient norms are defined at finite places only");
  OracleResult res;
  const auto& gb = *f.ideal;
  size_t n = gb.nvars;
  if (f.is_zero()) {
    res.multipliers.assign(gb.gens.size(), Poly(n));
    return res;
  }
  auto monos = monomials_up_to(n, deg_bound);
  std::vector<Poly> shifted;  // m * g_i, in column order (i, m)
  for (auto& g : gb.gens)
    for (auto& m : monos) shifted.push_back(g * Poly::term(m, 1));
  std::map<Monomial, size_t> coord;
  for (auto& [m, c] : f.rep.terms()) coord.try_emplace(m, coord.size());
  for (auto& s : shifted)
    for (auto& [m, c] : s.terms()) coord.try_emplace(m, coord.size());
  Vec b(coord.size());
  for (auto& [m, c] : f.rep.terms()) b[coord[m]] = c;
  std::vector<Vec> cols;
  for (auto& s : shifted) {
    Vec col(coord.size());
    for (auto& [m, c] : s.terms()) col[coord[m]] = c;
    cols.push_back(std::move(col));
  }
  auto [lb, cstar] = detail::padic_distance(cols, b, v.p);
  res.lower_bound = lb;

  auto evaluate = [&](const Vec& c) {
    Vec x = b;
    for (size_t j = 0; j < c.size(); ++j)
      if (c[j] != 0)
        for (size_t r = 0; r < x.size(); ++r) x[r] += c[j] * cols[j][r];
    Rational d = 0;
    for (auto& y : x) d = std::max(d, abs_value(y, v));
    return d;
  };
  auto to_multipliers = [&](const Vec& c) {
    std::vector<Poly> h(gb.gens.size(), Poly(n));
    for (size_t i = 0; i < gb.gens.size(); ++i)
      for (size_t k = 0; k < monos.size(); ++k) h[i].add_term(monos[k], c[i * monos.size() + k]);
    return h;
  };

  Vec zero(cols.size());
  res.value = evaluate(zero);
  res.multipliers = to_multipliers(zero);
  res.candidates = 1;
  if (res.value == lb) return res;
  bool boxed = true;
  for (auto& x : cstar) boxed = boxed && detail::in_box(x, height_bound);
  if (boxed) {
    ++res.candidates;
    res.value = evaluate(cstar);
    res.multipliers = to_multipliers(cstar);
    if (res.value == lb) return res;
  }
  // exhaustive search of the box
  auto box = detail::height_box(height_bound);
  double total = std::pow(static_cast<double>(box.size()), static_cast<double>(cols.size()));
  if (total > static_cast<double>(budget)) {
    res.budget_exceeded = true;
    return res;
  }
  std::vector<size_t> idx(cols.size(), 0);
  Vec c(cols.size());
  for (;;) {
    for (size_t j = 0; j < c.size(); ++j) c[j] = box[idx[j]];
    ++res.candidates;
    Rational d = evaluate(c);
    if (d < res.value) {
      res.value = d;
      res.multipliers = to_multipliers(c);
      if (d == lb) break;
    }
    size_t j = 0;
    while (j < idx.size() && ++idx[j] == box.size()) idx[j++] = 0;
    if (j == idx.size()) break;
  }
  return res;
}

// ------------------------------------------------------------ adelicity

struct AdelicityCertificate {
  std::map<Place, Rational> kappa, c;  // omitted places have kappa = c = 1
  long alpha = 0, beta = 0;
  size_t witnessed_order = 0;
};

/// Fits kappa_v c_v^o bounds (and degree bounds o*alpha + beta) to a stream
/// of cosets P_0, P_1, ... Throws DomainError("not adelic at order N") when
/// the data show growth no finite set of geometric bounds explains.
inline AdelicityCertificate check_adelic(const std::vector<QuotientElement>& coeffs, bool fit_alpha) {
  if (coeffs.empty()) throw DomainError("empty coefficient stream");
  AdelicityCertificate cert;
  size_t N = coeffs.size();
  cert.witnessed_order = N;

  std::set<Integer> cand;
  for (auto& q : coeffs) {
    if (q.is_zero()) continue;
    for (auto& [v, x] : norm_profile(q).bad) cand.insert(v.p);
  }
  std::vector<Integer> ps(cand.begin(), cand.end());
  // per place: exponent e_o with ||P_o||_v = p^e_o (absent for zero cosets)
  std::vector<std::vector<std::optional<long>>> ex(ps.size(), std::vector<std::optional<long>>(N));
  parallel_for(ps.size(), [&](size_t i) {
    Place v{false, ps[i]};
    for (size_t o = 0; o < N; ++o) {
      if (coeffs[o].is_zero()) continue;
      Rational a = quotient_norm(coeffs[o], v).value;
      ex[i][o] = valuation(a, ps[i]);
    }
  });

  size_t half = N / 2;
  size_t late_places = 0, late_order = 0;
  for (size_t i = 0; i < ps.size(); ++i) {
    Place v{false, ps[i]};
    long cexp = 0;  // c_v = p^cexp
    std::optional<size_t> prev;
    for (size_t o = 0; o < N; ++o) {
      if (!ex[i][o]) continue;
      if (prev) {
        long diff = *ex[i][o] - *ex[i][*prev], gap = static_cast<long>(o - *prev);
        cexp = std::max(cexp, diff > 0 ? (diff + gap - 1) / gap : 0);
      }
      prev = o;
    }
    long kexp = 0;
    std::optional<size_t> first_big;
    // running max of the exponents, so that cancellation dips do not count
    std::vector<std::optional<long>> env(N);
    std::optional<long> run;
    for (size_t o = 0; o < N; ++o) {
      if (ex[i][o]) {
        kexp = std::max(kexp, *ex[i][o] - cexp * static_cast<long>(o));
        if (*ex[i][o] > 0 && !first_big) first_big = o;
        run = run ? std::max(*run, *ex[i][o]) : *ex[i][o];
      }
      env[o] = run;
    }
    if (N >= 8 && env[0] && env[half] && env[N - 1]) {
      double s1 = double(*env[half] - *env[0]) / double(half);
      double s2 = double(*env[N - 1] - *env[half]) / double(N - 1 - half);
      if (s2 > 2 * s1 + 1)
        throw DomainError("not adelic at order " + std::to_string(N) + ": super-geometric growth at " + v.str());
    }
    if (first_big && 3 * *first_big > N) {
      ++late_places;
      late_order = std::max(late_order, *first_big);
    }
    if (cexp) cert.c[v] = qpow(Rational(ps[i]), cexp);
    if (kexp) cert.kappa[v] = qpow(Rational(ps[i]), kexp);
  }
  if (N >= 4 && late_places >= 2)
    throw DomainError("not adelic at order " + std::to_string(late_order) +
                      ": new places keep requiring c_v > 1");

  if (fit_alpha) {
    long beta = std::max(coeffs[0].rep.degree(), 0);
    long alpha = 0;
    for (size_t o = 1; o < N; ++o) {
      long d = coeffs[o].rep.degree();
      if (d > beta) alpha = std::max(alpha, (d - beta + static_cast<long>(o) - 1) / static_cast<long>(o));
    }
    cert.alpha = alpha;
    cert.beta = beta;
  }
  return cert;
}

}  // namespace adelikit
