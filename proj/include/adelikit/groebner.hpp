#pragma once
// Buchberger's algorithm, reduced Groebner bases, normal forms and cosets.

#include <functional>
#include <memory>
#include <optional>
#include <tuple>

#include "adelikit/linalg.hpp"
#include "adelikit/polynomial.hpp"

namespace adelikit {

/// Reduced basis, generators integer-primitive with positive leading
/// coefficient. An empty generator list is the zero ideal.
struct GroebnerBasis {
  size_t nvars = 0;
  MonomialOrder order;
  std::vector<Poly> gens;
  bool reduced = false;

  std::vector<Monomial> lead_monomials() const {
    std::vector<Monomial> v;
    for (auto& g : gens) v.push_back(g.lead(order).first);
    return v;
  }
};

using Ideal = std::shared_ptr<const GroebnerBasis>;

namespace detail {

/// Remainder of f on division by gens; `full` also reduces the tail.
inline Poly reduce(Poly p, const std::vector<Poly>& gens, const std::vector<Monomial>& lms,
                   const std::vector<Rational>& lcs, const MonomialOrder& ord, bool full = true) {
  Poly r(p.nvars());
  while (!p.is_zero()) {
    auto [m, c] = p.lead(ord);
    size_t k = 0;
    while (k < gens.size() && !divides(lms[k], m)) ++k;
    if (k < gens.size()) {
      p.add_scaled(gens[k], -c / lcs[k], mono_div(m, lms[k]));
    } else {
      if (!full) return p;
      r.add_term(m, c);
      p.add_term(m, -c);
    }
  }
  return r;
}

inline Poly spoly(const Poly& f, const Poly& g, const MonomialOrder& ord) {
  auto [mf, cf] = f.lead(ord);
  auto [mg, cg] = g.lead(ord);
  Monomial l = mono_lcm(mf, mg);
  Poly s(f.nvars());
  s.add_scaled(f, 1 / cf, mono_div(l, mf));
  s.add_scaled(g, -1 / cg, mono_div(l, mg));
  return s;
}

}  // namespace detail

inline Ideal groebner_basis(const std::vector<Poly>& generators, size_t nvars, const MonomialOrder& ord = {}) {
  for (auto& g : generators)
    if (g.nvars() != nvars) throw DomainError("generator arity mismatch");

  struct Pair {
    size_t i, j;
    unsigned sugar;
    Monomial lcm;
    size_t serial;
  };
  std::vector<Poly> G;
  std::vector<Monomial> lms;
  std::vector<Rational> lcs;
  std::vector<unsigned> sugar;
  std::vector<Pair> B;
  size_t serial = 0;

  auto add = [&](Poly f, unsigned s) {
    f = f.primitive(ord);
    size_t k = G.size();
    auto [m, c] = f.lead(ord);
    for (size_t i = 0; i < k; ++i) {
      Monomial l = mono_lcm(lms[i], m);
      unsigned d = total_degree(l);
      unsigned si = sugar[i] + d - total_degree(lms[i]), sk = s + d - total_degree(m);
      B.push_back({i, k, std::max(si, sk), l, serial++});
    }
    G.push_back(std::move(f));
    lms.push_back(m);
    lcs.push_back(c);
    sugar.push_back(s);
  };

  for (auto& g : generators) {
    Poly r = detail::reduce(g, G, lms, lcs, ord);
    if (!r.is_zero()) add(r, std::max<int>(g.degree(), 0));
  }

  auto pending = [&](size_t a, size_t b) {
    if (a > b) std::swap(a, b);
    for (auto& p : B)
      if (p.i == a && p.j == b) return true;
    return false;
  };

  while (!B.empty()) {
    auto best = B.begin();
    for (auto it = std::next(B.begin()); it != B.end(); ++it) {
      if (it->sugar != best->sugar) {
        if (it->sugar < best->sugar) best = it;
        continue;
      }
      int c = ord.compare(it->lcm, best->lcm);
      if (c < 0 || (c == 0 && it->serial < best->serial)) best = it;
    }
    Pair pr = *best;
    B.erase(best);
    if (coprime(lms[pr.i], lms[pr.j])) continue;
    bool chain = false;
    for (size_t k = 0; k < G.size() && !chain; ++k)
      chain = k != pr.i && k != pr.j && divides(lms[k], pr.lcm) && !pending(pr.i, k) && !pending(pr.j, k);
    if (chain) continue;
    Poly r = detail::reduce(detail::spoly(G[pr.i], G[pr.j], ord), G, lms, lcs, ord);
    if (!r.is_zero()) add(r, pr.sugar);
  }

  // minimal basis, then inter-reduce
  std::vector<size_t> keep;
  for (size_t i = 0; i < G.size(); ++i) {
    bool redundant = false;
    for (size_t j = 0; j < G.size() && !redundant; ++j) {
      if (i == j || !divides(lms[j], lms[i])) continue;
      redundant = lms[j] != lms[i] || j < i;
    }
    if (!redundant) keep.push_back(i);
  }
  std::vector<Poly> M;
  for (auto i : keep) M.push_back(G[i]);
  std::vector<Poly> out;
  for (size_t i = 0; i < M.size(); ++i) {
    std::vector<Poly> others;
    std::vector<Monomial> olm;
    std::vector<Rational> olc;
    for (size_t j = 0; j < M.size(); ++j) {
      if (j == i) continue;
      others.push_back(M[j]);
      auto [m, c] = M[j].lead(ord);
      olm.push_back(m);
      olc.push_back(c);
    }
    out.push_back(detail::reduce(M[i], others, olm, olc, ord).primitive(ord));
  }
  std::sort(out.begin(), out.end(),
            [&](const Poly& a, const Poly& b) { return ord.compare(a.lead(ord).first, b.lead(ord).first) > 0; });

  auto gb = std::make_shared<GroebnerBasis>();
  gb->nvars = nvars;
  gb->order = ord;
  gb->gens = std::move(out);
  gb->reduced = true;
  return gb;
}

inline Ideal zero_ideal(size_t nvars, const MonomialOrder& ord = {}) {
  auto gb = std::make_shared<GroebnerBasis>();
  gb->nvars = nvars;
  gb->order = ord;
  gb->reduced = true;
  return gb;
}

/// Fully lead-reduced representative of f + I.
inline Poly reduce_mod(const Poly& f, const GroebnerBasis& gb) {
  if (f.nvars() != gb.nvars) throw DomainError("arity mismatch in normal form");
  if (gb.gens.empty()) return f;
  std::vector<Rational> lcs;
  for (auto& g : gb.gens) lcs.push_back(g.lead(gb.order).second);
  return detail::reduce(f, gb.gens, gb.lead_monomials(), lcs, gb.order);
}

/// A coset f + I held by its normal form.
struct QuotientElement {
  Ideal ideal;
  Poly rep;

  bool is_zero() const { return rep.is_zero(); }
  friend bool operator==(const QuotientElement& a, const QuotientElement& b) { return a.rep == b.rep; }
};

inline QuotientElement normal_form(const Poly& f, const Ideal& gb) { return {gb, reduce_mod(f, *gb)}; }

inline bool ideal_membership(const Poly& f, const Ideal& gb) { return reduce_mod(f, *gb).is_zero(); }

/// Checks that every S-polynomial of the basis reduces to zero.
inline bool satisfies_buchberger_criterion(const GroebnerBasis& gb) {
  for (size_t i = 0; i < gb.gens.size(); ++i)
    for (size_t j = i + 1; j < gb.gens.size(); ++j)
      if (!reduce_mod(detail::spoly(gb.gens[i], gb.gens[j], gb.order), gb).is_zero()) return false;
  return true;
}

/// Monomials of total degree <= d in n variables, in graded order.
inline std::vector<Monomial> monomials_up_to(size_t n, unsigned d) {
  if (n == 0) return {Monomial{}};
  std::vector<Monomial> out;
  Monomial m(n, 0);
  std::function<void(size_t, unsigned)> rec = [&](size_t i, unsigned left) {
    if (i + 1 == n || n == 0) {
      if (n) m[i] = left;
      out.push_back(m);
      return;
    }
    for (unsigned e = left + 1; e-- > 0;) {
      m[i] = e;
      rec(i + 1, left - e);
    }
  };
  for (unsigned t = 0; t <= d; ++t) rec(0, t);
  return out;
}

/// Monomials of degree <= d not divisible by any leading monomial.
inline std::vector<Monomial> standard_monomials(const GroebnerBasis& gb, unsigned d) {
  auto lms = gb.lead_monomials();
  std::vector<Monomial> out;
  for (auto& m : monomials_up_to(gb.nvars, d)) {
    bool ok = true;
    for (auto& l : lms) ok = ok && !divides(l, m);
    if (ok) out.push_back(m);
  }
  return out;
}

/// Solves sum_j M[r][j] X_j = rhs[r] in A/I with each X_j supported on
/// standard monomials of degree <= d, trying d = 0, 1, ..., max_degree.
inline std::optional<std::vector<Poly>> solve_over_quotient(const std::vector<std::vector<Poly>>& M,
                                                            const std::vector<Poly>& rhs, const Ideal& gb,
                                                            unsigned max_degree) {
  size_t rows = M.size(), cols = rows ? M[0].size() : 0, n = gb->nvars;
  for (unsigned d = 0; d <= max_degree; ++d) {
    auto basis = standard_monomials(*gb, d);
    size_t nb = basis.size();
    // unknown (j, b) at column j*nb + b; equations indexed by (row, monomial)
    std::map<std::pair<size_t, Monomial>, size_t> eq_index;
    std::vector<std::vector<std::pair<size_t, Rational>>> eqs;
    std::vector<Rational> b;
    auto eq = [&](size_t r, const Monomial& m) {
      auto [it, fresh] = eq_index.try_emplace({r, m}, eqs.size());
      if (fresh) {
        eqs.emplace_back();
        b.push_back(0);
      }
      return it->second;
    };
    for (size_t r = 0; r < rows; ++r) {
      for (size_t j = 0; j < cols; ++j) {
        if (M[r][j].is_zero()) continue;
        for (size_t k = 0; k < nb; ++k) {
          Poly t = reduce_mod(M[r][j] * Poly::term(basis[k], 1), *gb);
          for (auto& [m, c] : t.terms()) eqs[eq(r, m)].push_back({j * nb + k, c});
        }
      }
      Poly rr = reduce_mod(rhs[r], *gb);
      for (auto& [m, c] : rr.terms()) b[eq(r, m)] += c;
    }
    Matrix A(eqs.size(), cols * nb);
    for (size_t e = 0; e < eqs.size(); ++e)
      for (auto& [col, c] : eqs[e]) A(e, col) += c;
    auto x = solve(A, b);
    if (!x) continue;
    std::vector<Poly> X(cols, Poly(n));
    for (size_t j = 0; j < cols; ++j)
      for (size_t k = 0; k < nb; ++k) X[j].add_term(basis[k], (*x)[j * nb + k]);
    return X;
  }
  return std::nullopt;
}

/// Inverse of a in A/I if one exists among representatives of degree <= d.
inline std::optional<Poly> quotient_inverse(const Poly& a, const Ideal& gb, unsigned max_degree) {
  Poly r = reduce_mod(a, *gb);
  if (r.is_zero()) return std::nullopt;
  if (r.is_constant()) return Poly(gb->nvars, 1 / r.constant_term());
  auto x = solve_over_quotient({{r}}, {Poly(gb->nvars, 1)}, gb, max_degree);
  if (!x) return std::nullopt;
  return (*x)[0];
}

}  // namespace adelikit
