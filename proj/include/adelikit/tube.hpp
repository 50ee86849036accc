#pragma once
// Etale charts, the flattening operator, the power-series tube solver,
// bound verification, and adelic tubes (membership and refinement).

#include <map>
#include <set>

#include <functional>

#include "adelikit/norms.hpp"
#include "adelikit/parallel.hpp"
#include "adelikit/series.hpp"

namespace adelikit {

// ------------------------------------------------------------ ring helpers

/// Determinant over A/I by cofactor expansion (small sizes only).
inline Poly ring_det(const std::vector<std::vector<Poly>>& M, const GroebnerBasis& ring) {
  size_t n = M.size();
  if (n == 0) return Poly(ring.nvars, 1);
  if (n == 1) return reduce_mod(M[0][0], ring);
  Poly acc(ring.nvars);
  for (size_t j = 0; j < n; ++j) {
    if (M[0][j].is_zero()) continue;
    std::vector<std::vector<Poly>> minor;
    for (size_t i = 1; i < n; ++i) {
      std::vector<Poly> row;
      for (size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(M[i][k]);
      minor.push_back(std::move(row));
    }
    Poly t = M[0][j] * ring_det(minor, ring);
    if (j % 2) acc -= t;
    else acc += t;
  }
  return reduce_mod(acc, ring);
}

/// Inverse over A/I via the adjugate; nullopt if det is not a unit found
/// among representatives of degree <= max_degree.
inline std::optional<std::vector<std::vector<Poly>>> ring_inverse(const std::vector<std::vector<Poly>>& M,
                                                                  const Ideal& ring, unsigned max_degree = 6) {
  size_t n = M.size();
  auto dinv = quotient_inverse(ring_det(M, *ring), ring, max_degree);
  if (!dinv) return std::nullopt;
  std::vector<std::vector<Poly>> inv(n, std::vector<Poly>(n, Poly(ring->nvars)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      std::vector<std::vector<Poly>> minor;
      for (size_t r = 0; r < n; ++r) {
        if (r == j) continue;
        std::vector<Poly> row;
        for (size_t c = 0; c < n; ++c)
          if (c != i) row.push_back(M[r][c]);
        minor.push_back(std::move(row));
      }
      Poly cof = ring_det(minor, *ring);
      if ((i + j) % 2) cof = -cof;
      inv[i][j] = reduce_mod(cof * *dinv, *ring);
    }
  return inv;
}

/// Substitutes ring elements into a Q-polynomial and reduces.
inline Poly eval_in_ring(const Poly& f, const std::vector<Poly>& point, const GroebnerBasis& ring) {
  return reduce_mod(f.substitute(point), ring);
}

// ------------------------------------------------------------ charts

struct EtaleChart {
  std::vector<std::string> vars;  // ambient coordinates z_1..z_m
  Ideal ideal;                    // ideal of U
  std::vector<Poly> etale;        // f_1..f_q
  size_t p = 0;                   // f_1..f_p cut out E
  std::vector<std::vector<Poly>> a;  // d_i = sum_j a[i][j] d/dz_j

  size_t m() const { return vars.size(); }
  size_t q() const { return etale.size(); }

  /// d_i h, reduced mod I.
  Poly derive(size_t i, const Poly& h) const {
    Poly acc(m());
    for (size_t j = 0; j < m(); ++j)
      if (!a[i][j].is_zero()) acc += a[i][j] * h.derivative(j);
    return reduce_mod(acc, *ideal);
  }
};

inline EtaleChart build_chart(const std::vector<std::string>& vars, const std::vector<Poly>& ideal_gens,
                              const std::vector<Poly>& etale, size_t p, const MonomialOrder& ord = {},
                              unsigned max_degree = 6) {
  size_t m = vars.size(), q = etale.size();
  if (p < 1 || p > q) throw DomainError("need 1 <= p <= q");
  EtaleChart ch;
  ch.vars = vars;
  ch.ideal = ideal_gens.empty() ? zero_ideal(m, ord) : groebner_basis(ideal_gens, m, ord);
  ch.etale = etale;
  ch.p = p;
  std::vector<std::vector<Poly>> J;  // rows: f_1..f_q, then the basis of I
  for (auto& f : etale) {
    std::vector<Poly> row;
    for (size_t j = 0; j < m; ++j) row.push_back(f.derivative(j));
    J.push_back(std::move(row));
  }
  for (auto& g : ch.ideal->gens) {
    std::vector<Poly> row;
    for (size_t j = 0; j < m; ++j) row.push_back(g.derivative(j));
    J.push_back(std::move(row));
  }
  for (size_t i = 0; i < q; ++i) {
    std::vector<Poly> rhs(J.size(), Poly(m));
    rhs[i] = Poly(m, 1);
    auto x = solve_over_quotient(J, rhs, ch.ideal, max_degree);
    if (!x)
      throw DomainError("chart: no derivation d_" + std::to_string(i + 1) +
                        " with d_i f_j = delta_ij and d_i(I) in I over the ring (searched degree <= " +
                        std::to_string(max_degree) + ")");
    ch.a.push_back(*x);
  }
  for (size_t i = 0; i < q; ++i) {
    for (size_t j = 0; j < q; ++j)
      if (!ideal_membership(ch.derive(i, etale[j]) - Poly(m, i == j ? 1 : 0), ch.ideal))
        throw DomainError("chart verification failed: d_i f_j != delta_ij");
    for (auto& g : ch.ideal->gens)
      if (!ideal_membership(ch.derive(i, g), ch.ideal)) throw DomainError("chart verification failed: d_i(I) not in I");
  }
  return ch;
}

/// Ideal of E = V(f_1..f_p) inside U.
inline Ideal subvariety_ideal(const EtaleChart& ch) {
  std::vector<Poly> gens = ch.ideal->gens;
  for (size_t t = 0; t < ch.p; ++t) gens.push_back(ch.etale[t]);
  return groebner_basis(gens, ch.m(), ch.ideal->order);
}

// ------------------------------------------------------------ solver

/// A with A(0) = e and B_r(A) = C_r (rows in minor_rows) mod order N,
/// solved one degree layer at a time: the layer-J coefficient of A is
/// M^{-1}(C_J - P_J), where P_J collects the contributions of lower layers.
inline std::vector<Series> solve_tube_system(const std::vector<Poly>& B, const std::vector<Series>& C,
                                             const std::vector<Poly>& e, const std::vector<size_t>& minor_rows,
                                             unsigned N) {
  if (B.size() != C.size() || C.empty()) throw DomainError("B and C must have the same nonzero length");
  const Ideal& ring = C[0].ring();
  size_t sigma = e.size(), nu = C[0].nu();
  if (minor_rows.size() != sigma) throw DomainError("minor must be sigma x sigma");
  for (size_t r = 0; r < B.size(); ++r) {
    if (B[r].nvars() != sigma) throw DomainError("B_r arity differs from the point");
    if (!(reduce_mod(C[r].constant_term() - eval_in_ring(B[r], e, *ring), *ring)).is_zero())
      throw DomainError("inconsistent constant terms: C_" + std::to_string(r + 1) + "(0) != B_" +
                        std::to_string(r + 1) + "(e)");
  }
  std::vector<std::vector<Poly>> M;
  for (auto r : minor_rows) {
    if (r >= B.size()) throw DomainError("minor row out of range");
    std::vector<Poly> row;
    for (size_t i = 0; i < sigma; ++i) row.push_back(eval_in_ring(B[r].derivative(i), e, *ring));
    M.push_back(std::move(row));
  }
  auto Minv = ring_inverse(M, ring);
  if (!Minv) throw DomainError("singular minor: determinant is not a unit in the coefficient ring");

  unsigned order = N;
  for (auto& c : C) order = std::min(order, c.order());
  std::vector<Series> A;
  for (size_t i = 0; i < sigma; ++i) A.push_back(Series::constant(ring, nu, order, e[i]));
  std::vector<Series> Bs;
  for (auto& b : B) Bs.push_back(exact_series(ring, b));

  auto monos = monomials_up_to(nu, order == 0 ? 0 : order - 1);
  for (unsigned d = 1; d < order; ++d) {
    std::vector<Series> P;
    for (auto r : minor_rows) P.push_back(compose(Bs[r], A, d + 1));
    for (auto& J : monos) {
      if (total_degree(J) != d) continue;
      std::vector<Poly> rhs;
      for (size_t k = 0; k < sigma; ++k) rhs.push_back(C[minor_rows[k]].coeff(J) - P[k].coeff(J));
      for (size_t i = 0; i < sigma; ++i) {
        Poly x(ring->nvars);
        for (size_t k = 0; k < sigma; ++k) x += (*Minv)[i][k] * rhs[k];
        A[i].set(J, x);
      }
    }
  }
  return A;
}

/// max over rows of the lowest order at which B_r(A) - C_r is nonzero
/// (order() when it vanishes to the truncation order).
inline std::vector<bool> residuals_vanish(const std::vector<Poly>& B, const std::vector<Series>& C,
                                          const std::vector<Series>& A, unsigned N) {
  std::vector<bool> ok;
  for (size_t r = 0; r < B.size(); ++r)
    ok.push_back((compose(exact_series(C[r].ring(), B[r]), A, N) - C[r].truncate(N)).is_zero());
  return ok;
}

struct TubeSolution {
  Ideal ring;                  // ideal of E (coefficients live in O(E))
  std::vector<Series> A;       // A_1..A_m in u_1..u_p
  std::vector<Poly> B;         // basis of I, then f_1..f_q
  std::vector<Series> C;
  std::vector<size_t> minor_rows;
  std::vector<bool> residual_zero;
  std::vector<Integer> data_primes;
  unsigned order = 0;
};

/// Rows of an invertible minor of [d_i B_r (e)], first in lexicographic order.
inline std::optional<std::vector<size_t>> find_minor(const std::vector<Poly>& B, const std::vector<Poly>& e,
                                                     const Ideal& ring, const std::vector<size_t>& avoid_first = {}) {
  size_t sigma = e.size(), R = B.size();
  std::vector<size_t> rows(sigma);
  std::function<std::optional<std::vector<size_t>>(size_t, size_t)> rec =
      [&](size_t k, size_t start) -> std::optional<std::vector<size_t>> {
    if (k == sigma) {
      if (!avoid_first.empty() && rows == avoid_first) return std::nullopt;
      std::vector<std::vector<Poly>> M;
      for (auto r : rows) {
        std::vector<Poly> row;
        for (size_t i = 0; i < sigma; ++i) row.push_back(eval_in_ring(B[r].derivative(i), e, *ring));
        M.push_back(std::move(row));
      }
      if (quotient_inverse(ring_det(M, *ring), ring, 2)) return rows;
      return std::nullopt;
    }
    for (size_t r = start; r < R; ++r) {
      rows[k] = r;
      if (auto got = rec(k + 1, r + 1)) return got;
    }
    return std::nullopt;
  };
  return rec(0, 0);
}

inline TubeSolution parameterize_tube(const EtaleChart& ch, unsigned N,
                                      std::optional<std::vector<size_t>> minor_rows = std::nullopt) {
  TubeSolution sol;
  sol.ring = subvariety_ideal(ch);
  sol.order = N;
  size_t m = ch.m(), p = ch.p;
  for (auto& g : ch.ideal->gens) sol.B.push_back(g);
  for (auto& f : ch.etale) sol.B.push_back(f);
  for (size_t r = 0; r < ch.ideal->gens.size(); ++r) sol.C.push_back(Series(sol.ring, p, N));
  for (size_t t = 0; t < ch.q(); ++t) {
    if (t < p) sol.C.push_back(Series::variable(sol.ring, p, N, t));
    else sol.C.push_back(Series::constant(sol.ring, p, N, ch.etale[t]));
  }
  std::vector<Poly> e;
  for (size_t j = 0; j < m; ++j) e.push_back(reduce_mod(Poly::var(m, j), *sol.ring));
  if (!minor_rows) minor_rows = find_minor(sol.B, e, sol.ring);
  if (!minor_rows) throw DomainError("no invertible minor of the Jacobian over O(E)");
  sol.minor_rows = *minor_rows;
  sol.A = solve_tube_system(sol.B, sol.C, e, sol.minor_rows, N);
  sol.residual_zero = residuals_vanish(sol.B, sol.C, sol.A, N);

  std::set<Integer> primes;
  auto add = [&](const std::vector<Integer>& v) { primes.insert(v.begin(), v.end()); };
  add(basis_primes(*ch.ideal));
  add(basis_primes(*sol.ring));
  for (auto& b : sol.B) add(coefficient_primes(b));
  for (auto& row : ch.a)
    for (auto& x : row) add(coefficient_primes(x));
  std::vector<std::vector<Poly>> M;
  for (auto r : sol.minor_rows) {
    std::vector<Poly> row;
    for (size_t i = 0; i < m; ++i) row.push_back(eval_in_ring(sol.B[r].derivative(i), e, *sol.ring));
    M.push_back(std::move(row));
  }
  add(coefficient_primes(ring_det(M, *sol.ring)));
  sol.data_primes.assign(primes.begin(), primes.end());
  return sol;
}

/// solve_tube_system packaged with residuals and data primes.
inline TubeSolution solve_tube(const std::vector<Poly>& B, const std::vector<Series>& C, const std::vector<Poly>& e,
                               const std::vector<size_t>& minor_rows, unsigned N) {
  TubeSolution sol;
  sol.ring = C.at(0).ring();
  sol.order = N;
  sol.B = B;
  sol.C = C;
  sol.minor_rows = minor_rows;
  sol.A = solve_tube_system(B, C, e, minor_rows, N);
  sol.residual_zero = residuals_vanish(B, C, sol.A, N);
  std::set<Integer> primes;
  auto add = [&](const std::vector<Integer>& v) { primes.insert(v.begin(), v.end()); };
  add(basis_primes(*sol.ring));
  for (auto& b : B) add(coefficient_primes(b));
  for (auto& c : C)
    for (auto& [J, x] : c.coeffs()) add(coefficient_primes(x));
  for (auto& x : e) add(coefficient_primes(x));
  std::vector<std::vector<Poly>> M;
  for (auto r : minor_rows) {
    std::vector<Poly> row;
    for (size_t i = 0; i < e.size(); ++i) row.push_back(eval_in_ring(B[r].derivative(i), e, *sol.ring));
    M.push_back(std::move(row));
  }
  add(coefficient_primes(ring_det(M, *sol.ring)));
  sol.data_primes.assign(primes.begin(), primes.end());
  return sol;
}

// ------------------------------------------------------------ flattening

struct Flattening {
  Poly rep;             // sum_{|J|<N} (-f)^J d^J a / J!  mod I
  Series along_tube;    // rep composed with the tube parameterization
};

/// The flattening of a, truncated at f-adic order N.
inline Poly flatten_rep(const Poly& a, const EtaleChart& ch, unsigned N) {
  size_t p = ch.p, m = ch.m();
  Poly total(m);
  // d^J a / J! for all J with |J| < N, built by raising one index at a time
  std::map<Monomial, Poly> der;
  der[Monomial(p, 0)] = reduce_mod(a, *ch.ideal);
  for (auto& J : monomials_up_to(p, N == 0 ? 0 : N - 1)) {
    if (total_degree(J) > 0) {
      size_t i = 0;
      while (J[i] == 0) ++i;
      Monomial prev(J);
      --prev[i];
      der[J] = ch.derive(i, der[prev]) * Rational(1, J[i]);
    }
    const Poly& dj = der[J];
    if (dj.is_zero()) continue;
    Poly mono(m, total_degree(J) % 2 ? -1 : 1);
    for (size_t i = 0; i < p; ++i) mono = mono * ch.etale[i].pow(J[i]);
    total += reduce_mod(mono * dj, *ch.ideal);
  }
  return reduce_mod(total, *ch.ideal);
}

/// Pulls a function on U back along a tube parameterization.
inline Series along_tube(const Poly& h, const TubeSolution& sol) {
  return compose(exact_series(sol.ring, h), sol.A, sol.order);
}

inline Flattening flatten(const Poly& a, const EtaleChart& ch, unsigned N) {
  Flattening out;
  out.rep = flatten_rep(a, ch, N);
  out.along_tube = along_tube(out.rep, parameterize_tube(ch, N));
  return out;
}

// ------------------------------------------------------------ bounds

struct BoundsReport {
  long alpha = 0, beta = 0;
  std::vector<Integer> bad;             // data-divisor primes
  std::map<Place, Rational> tau_log_p;  // tau_v = p^(value), only where != 1
  bool degree_bound_ok = true;
  bool tau_one_off_bad = true;
};

/// Gauss norm of a normal-form representative.
inline Rational representative_norm(const Poly& rep, const Place& v) { return gauss_norm(rep, v); }

/// Fits (alpha, beta) on the orders below fit_order, then checks the degree
/// bound at every computed order and tau_v = 1 off the data primes.
inline BoundsReport verify_bounds(const TubeSolution& sol, unsigned fit_order = 6) {
  BoundsReport rep;
  rep.bad = sol.data_primes;
  long beta = 0;
  for (auto& a : sol.A) beta = std::max<long>(beta, a.constant_term().degree());
  long alpha = 0;
  std::set<Integer> primes;
  for (auto& a : sol.A)
    for (auto& [J, c] : a.coeffs()) {
      long o = total_degree(J), d = c.degree();
      if (o > 0 && o < static_cast<long>(fit_order) && d > beta) alpha = std::max(alpha, (d - beta + o - 1) / o);
      for (auto& p : coefficient_primes(c)) primes.insert(p);
    }
  rep.alpha = alpha;
  rep.beta = beta;
  for (auto& a : sol.A)
    for (auto& [J, c] : a.coeffs())
      if (c.degree() > static_cast<long>(total_degree(J)) * alpha + beta) rep.degree_bound_ok = false;

  std::vector<Integer> ps(primes.begin(), primes.end());
  std::vector<Rational> taus(ps.size());
  parallel_for(ps.size(), [&](size_t k) {
    Place v{false, ps[k]};
    Rational best = 0;
    for (auto& a : sol.A)
      for (auto& [J, c] : a.coeffs()) {
        Rational nv = representative_norm(c, v);
        if (nv == 0) continue;
        long e = valuation(nv, ps[k]);  // log_p of the norm
        best = std::max(best, Rational(e, total_degree(J) + 1));
      }
    best.canonicalize();
    taus[k] = best;
  });
  for (size_t k = 0; k < ps.size(); ++k) {
    if (taus[k] <= 0) continue;
    rep.tau_log_p[Place{false, ps[k]}] = taus[k];
    if (!std::binary_search(rep.bad.begin(), rep.bad.end(), ps[k])) rep.tau_one_off_bad = false;
  }
  if (!rep.degree_bound_ok || !rep.tau_one_off_bad)
    throw DomainError("bound verification failed (implementation bug): " +
                      std::string(rep.degree_bound_ok ? "tau_v > 1 outside the data bad set" : "degree bound"));
  return rep;
}

// ------------------------------------------------------------ adelic tubes

struct AdelicTube {
  std::vector<std::string> vars;  // z_1..z_l
  Ideal ideal;                    // ideal of M in these coordinates
  std::vector<Poly> y;            // y_1..y_p cutting out Y
  Integer rho;
  unsigned alpha = 2;

  void validate() const {
    if (rho == 0) throw DomainError("rho must be nonzero");
    if (alpha < 2) throw DomainError("alpha must be at least 2");
  }
};

namespace detail {
// v(x) with +infinity for zero encoded as nullopt
inline std::optional<long> val(const Rational& x, const Integer& p) {
  if (x == 0) return std::nullopt;
  return valuation(x, p);
}
}  // namespace detail

inline bool tube_membership(const std::vector<Rational>& point, const AdelicTube& T, const Place& v) {
  T.validate();
  if (v.infinite) throw DomainError("tube membership is tested at finite places");
  if (point.size() != T.vars.size()) throw DomainError("point has the wrong number of coordinates");
  for (auto& g : T.ideal->gens)
    if (g.evaluate(point) != 0) throw DomainError("point is not on the variety");
  long vr = valuation(Rational(T.rho), v.p);
  for (auto& yi : T.y) {
    auto vy = detail::val(yi.evaluate(point), v.p);
    if (!vy) continue;  // y_i = 0: every inequality holds
    for (auto& zr : point) {
      auto vz = detail::val(zr, v.p);
      for (unsigned a1 = 1; a1 <= T.alpha; ++a1)
        for (unsigned a2 = 0; a1 + a2 <= T.alpha; ++a2) {
          if (a2 > 0 && !vz) continue;
          long lhs = static_cast<long>(a1) * *vy + (a2 ? static_cast<long>(a2) * *vz : 0);
          if (!(lhs > vr)) return false;
        }
    }
  }
  return true;
}

struct RefinementResult {
  AdelicTube tube;
  unsigned tau0 = 0;
  std::vector<Integer> bad_primes;       // where lifting coefficients have |c|_v != 1
  std::map<Integer, long> extra_powers;  // steps taken by the certificate loop
  std::map<Integer, bool> certificate;   // per checked prime
};

namespace detail {

struct Lifting {
  const AdelicTube& T;
  const AdelicTube& Tp;
  const std::vector<std::vector<Poly>>& h;
  const std::vector<Poly>& g;
};

/// Lower bound for v(F) from coordinate valuations, by the ultrametric inequality.
inline std::optional<long> val_lower(const Poly& F, const std::vector<long>& zeta, const Integer& p) {
  std::optional<long> best;
  for (auto& [m, c] : F.terms()) {
    long v = valuation(c, p);
    for (size_t i = 0; i < m.size(); ++i) v += static_cast<long>(m[i]) * zeta[i];
    if (!best || v < *best) best = v;
  }
  return best;
}

/// Grid certificate at p: every valuation vector of (y'_w, z'_r) in the grid
/// that satisfies the refined inequalities also satisfies those of T.
inline bool implication_certificate(const Lifting& L, unsigned alpha2, const Integer& rho2, const Integer& p) {
  size_t pw = L.Tp.y.size(), lz = L.Tp.vars.size();
  long vr2 = valuation(Rational(rho2), p), vr = valuation(Rational(L.T.rho), p);
  long G = std::max<long>(3, std::min<long>(8, vr2 + 2));
  size_t dims = pw + lz;
  double pts = std::pow(2.0 * G + 1, static_cast<double>(dims));
  while (pts > 2e5 && G > 2) {
    --G;
    pts = std::pow(2.0 * G + 1, static_cast<double>(dims));
  }
  std::vector<long> x(dims, -G);
  for (;;) {
    std::vector<long> eta(x.begin(), x.begin() + pw), zeta(x.begin() + pw, x.end());
    bool inside = true;
    for (size_t w = 0; w < pw && inside; ++w)
      for (unsigned a1 = 1; a1 <= alpha2 && inside; ++a1) {
        if (!(a1 * eta[w] > vr2)) inside = false;
        for (size_t r = 0; r < lz && inside; ++r)
          for (unsigned a2 = 1; a1 + a2 <= alpha2 && inside; ++a2)
            if (!(a1 * eta[w] + static_cast<long>(a2) * zeta[r] > vr2)) inside = false;
      }
    if (inside) {
      std::vector<std::optional<long>> vz;
      for (auto& gr : L.g) vz.push_back(val_lower(gr, zeta, p));
      for (size_t i = 0; i < L.h.size(); ++i) {
        std::optional<long> vy;
        for (size_t w = 0; w < pw; ++w) {
          auto t = val_lower(L.h[i][w], zeta, p);
          if (t) {
            long c = *t + eta[w];
            if (!vy || c < *vy) vy = c;
          }
        }
        if (!vy) continue;
        for (unsigned a1 = 1; a1 <= L.T.alpha; ++a1) {
          if (!(a1 * *vy > vr)) return false;
          for (auto& z : vz)
            for (unsigned a2 = 1; a1 + a2 <= L.T.alpha; ++a2)
              if (z && !(a1 * *vy + static_cast<long>(a2) * *z > vr)) return false;
        }
      }
    }
    size_t k = 0;
    while (k < dims && ++x[k] > G) x[k++] = -G;
    if (k == dims) break;
  }
  return true;
}

}  // namespace detail

/// Refines T' to T'' (same embedding as T') with T''^v inside T^v for all v,
/// given y_i = sum_w h[i][w] y'_w and z_i = g[i](z') on M.
inline RefinementResult refine_tube(const AdelicTube& T, const AdelicTube& Tp, const std::vector<std::vector<Poly>>& h,
                                    const std::vector<Poly>& g) {
  T.validate();
  Tp.validate();
  size_t lp = Tp.vars.size();
  if (g.size() != T.vars.size()) throw DomainError("need one g_i per coordinate of T");
  if (h.size() != T.y.size()) throw DomainError("need one row h_i per defining function of T");
  for (auto& row : h) {
    if (row.size() != Tp.y.size()) throw DomainError("h rows must have one entry per defining function of T'");
    for (auto& x : row)
      if (x.nvars() != lp) throw DomainError("h entries must be polynomials in the coordinates of T'");
  }
  for (auto& x : g)
    if (x.nvars() != lp) throw DomainError("g entries must be polynomials in the coordinates of T'");
  for (auto& q : T.ideal->gens)
    if (!ideal_membership(q.substitute(g), Tp.ideal))
      throw DomainError("lifting data does not map M to M (an ideal generator does not pull back into I')");
  for (size_t i = 0; i < h.size(); ++i) {
    Poly rhs(lp);
    for (size_t w = 0; w < Tp.y.size(); ++w) rhs += h[i][w] * Tp.y[w];
    if (!ideal_membership(T.y[i].substitute(g) - rhs, Tp.ideal))
      throw DomainError("lifting data fails: y_" + std::to_string(i + 1) + " != sum_w h_iw y'_w on M");
  }

  RefinementResult res;
  bool identity = lp == T.vars.size() && Tp.y.size() == T.y.size();
  for (size_t i = 0; i < g.size() && identity; ++i) identity = g[i] == Poly::var(lp, i);
  for (size_t i = 0; i < h.size() && identity; ++i)
    for (size_t w = 0; w < h[i].size() && identity; ++w) identity = h[i][w] == Poly(lp, i == w ? 1 : 0);

  unsigned tau0 = 0;
  std::set<Integer> bad;
  auto scan = [&](const Poly& x) {
    tau0 = std::max<unsigned>(tau0, std::max(x.degree(), 0));
    for (auto& p : coefficient_primes(x)) bad.insert(p);
  };
  for (auto& row : h)
    for (auto& x : row) scan(x);
  for (auto& x : g) scan(x);
  res.tau0 = tau0;
  res.bad_primes.assign(bad.begin(), bad.end());

  AdelicTube out = Tp;
  out.alpha = identity ? std::max(T.alpha, Tp.alpha) : std::max(2 * std::max(tau0, 1u) * T.alpha, Tp.alpha);
  out.rho = abs(T.rho * Tp.rho);
  if (!identity)
    for (auto& p : bad) out.rho *= p;

  std::set<Integer> check(bad.begin(), bad.end());
  for (auto& p : prime_divisors(T.rho)) check.insert(p);
  for (auto& p : prime_divisors(Tp.rho)) check.insert(p);
  detail::Lifting L{T, Tp, h, g};
  for (auto& p : check) {
    long steps = 0;
    while (!detail::implication_certificate(L, out.alpha, out.rho, p)) {
      if (++steps > 64) throw DomainError("refinement: certificate did not pass at p = " + p.get_str());
      out.rho *= p;
    }
    res.extra_powers[p] = steps;
    res.certificate[p] = true;
  }
  res.tube = out;
  return res;
}

}  // namespace adelikit
