#pragma once
// Seeded generators and independent reference computations for the tests.

#include <random>
#include <string>
#include <vector>

#include "adelikit/gfunctions.hpp"
#include "adelikit/parse.hpp"
#include "adelikit/tube.hpp"
#include "adelikit/weight.hpp"

namespace testkit {

using namespace adelikit;
using Rng = std::mt19937_64;

inline long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

inline Rational small_rational(Rng& rng, long h, bool fractions = true) {
  long n = uniform(rng, -h, h);
  long d = fractions ? uniform(rng, 1, h) : 1;
  return make_rational(n, d);
}

/// Random polynomial with at most `terms` terms of degree <= deg.
inline Poly random_poly(Rng& rng, size_t nvars, unsigned deg, size_t terms, long h, bool constant = true,
                        bool fractions = false) {
  auto monos = monomials_up_to(nvars, deg);
  Poly f(nvars);
  for (size_t t = 0; t < terms; ++t) {
    const Monomial& m = monos[uniform(rng, 0, static_cast<long>(monos.size()) - 1)];
    if (!constant && total_degree(m) == 0) continue;
    f += Poly::term(m, small_rational(rng, h, fractions));
  }
  return f;
}

inline std::vector<Integer> small_primes(long bound) {
  std::vector<Integer> out;
  for (long p = 2; p <= bound; ++p) {
    bool prime = true;
    for (long d = 2; d * d <= p; ++d)
      if (p % d == 0) prime = false;
    if (prime) out.push_back(p);
  }
  return out;
}

/// Every prime dividing a numerator or denominator of some coefficient.
inline std::set<Integer> data_primes(const std::vector<Poly>& fs) {
  std::set<Integer> s;
  for (auto& f : fs)
    for (auto& [m, c] : f.terms()) {
      for (auto& p : prime_divisors(c.get_num())) s.insert(p);
      for (auto& p : prime_divisors(c.get_den())) s.insert(p);
    }
  return s;
}

// ------------------------------------------------------------ truncated series over Q

/// Dense-ish truncated multivariate series with rational coefficients.
using QMap = std::map<Monomial, Rational>;

inline QMap qmul(const QMap& a, const QMap& b, unsigned N) {
  QMap out;
  for (auto& [ma, ca] : a)
    for (auto& [mb, cb] : b) {
      Monomial m = mono_mul(ma, mb);
      if (total_degree(m) < N) out[m] += ca * cb;
    }
  for (auto it = out.begin(); it != out.end();)
    it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

/// B(A) by expanding every monomial of B as a product of powers.
inline QMap naive_compose(const Poly& B, const std::vector<QMap>& A, size_t nu, unsigned N) {
  QMap out;
  for (auto& [M, c] : B.terms()) {
    QMap term{{Monomial(nu, 0), c}};
    for (size_t i = 0; i < M.size(); ++i)
      for (unsigned k = 0; k < M[i]; ++k) term = qmul(term, A[i], N);
    for (auto& [m, x] : term) out[m] += x;
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

inline QMap to_qmap(const Series& s) {
  QMap out;
  for (auto& [m, c] : s.coeffs()) out[m] = c.constant_term();
  return out;
}

inline Series from_qmap(const Ideal& ring, size_t nu, unsigned N, const QMap& q) {
  Series s(ring, nu, N);
  for (auto& [m, c] : q) s.set(m, Poly(ring->nvars, c));
  return s;
}

// ------------------------------------------------------------ hypergeometric fixture

/// Lambda = [[0, 1/s], [1/(4-4s), 1/(1-s)]]: flat section 2F1(1/2,1/2;1;s).
inline LogConnection hypergeometric_connection() {
  std::vector<std::string> s{"s"};
  return LogConnection{2,
                       {parse_poly("0", s), parse_poly("1", s), parse_poly("1", s), parse_poly("1", s)},
                       {parse_poly("1", s), parse_poly("s", s), parse_poly("4-4*s", s), parse_poly("1-s", s)}};
}

inline Rational hypergeometric_coefficient(unsigned n) {
  Rational b = make_rational(binomial(2 * n, n), ipow(4, n));
  return b * b;
}

/// v_2 of ((2n choose n)/4^n)^2 from the binary digit sum (Kummer).
inline long kummer_v2(unsigned long n) {
  long ones = 0;
  for (unsigned long x = n; x; x >>= 1) ones += x & 1;
  return 2 * (ones - 2 * static_cast<long>(n));
}

// ------------------------------------------------------------ nilpotent operators

struct JordanData {
  Matrix N;
  std::vector<unsigned> blocks;
  Matrix P;  // columns: the Jordan basis
};

inline Matrix random_invertible(Rng& rng, size_t n) {
  for (;;) {
    Matrix P(n, n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) P(i, j) = uniform(rng, -2, 2);
    if (determinant(P) != 0) return P;
  }
}

/// N = P J P^{-1} for a random Jordan type with blocks of size <= max_block.
inline JordanData random_nilpotent(Rng& rng, size_t n, unsigned max_block, bool conjugate = true) {
  JordanData d;
  size_t left = n;
  while (left) {
    unsigned b = static_cast<unsigned>(uniform(rng, 1, std::min<long>(max_block, static_cast<long>(left))));
    d.blocks.push_back(b);
    left -= b;
  }
  Matrix J(n, n);
  size_t at = 0;
  for (unsigned b : d.blocks) {
    for (unsigned i = 1; i < b; ++i) J(at + i - 1, at + i) = 1;
    at += b;
  }
  d.P = conjugate ? random_invertible(rng, n) : Matrix::identity(n);
  d.N = d.P * J * *inverse(d.P);
  return d;
}

/// W_r spanned by the Jordan basis vectors of weight <= r: in a block of
/// size k the i-th vector (N e_{i+1} = e_i) has weight w - k + 2i - 1.
inline std::vector<Subspace> jordan_filtration(const JordanData& d, int w) {
  size_t n = d.N.rows();
  std::vector<std::pair<int, size_t>> weights;
  size_t at = 0;
  for (unsigned k : d.blocks) {
    for (unsigned i = 1; i <= k; ++i) weights.push_back({w - static_cast<int>(k) + 2 * static_cast<int>(i) - 1, at + i - 1});
    at += k;
  }
  std::vector<Subspace> W;
  for (int r = 0; r <= 2 * w; ++r) {
    std::vector<Vec> gens;
    for (auto& [wt, col] : weights)
      if (wt <= r) {
        Vec v(n);
        for (size_t i = 0; i < n; ++i) v[i] = d.P(i, col);
        gens.push_back(v);
      }
    W.emplace_back(n, gens);
  }
  return W;
}

inline StrataData random_strata(Rng& rng) {
  StrataData s;
  long c = uniform(rng, 1, 6), e = uniform(rng, 0, 8);
  for (long i = 0; i < c; ++i) s.components.push_back({1, uniform(rng, 0, 4), uniform(rng, 0, 25)});
  for (long i = 0; i < e; ++i) s.double_curves.push_back({1, uniform(rng, 0, 6)});
  s.triple_points = uniform(rng, 0, 10);
  return s;
}

// ------------------------------------------------------------ charts

struct ChartCase {
  std::string label;
  EtaleChart chart;
};

/// Seeded etale charts of three shapes: a graph curve in the plane, a skewed
/// plane with a curve as E, and a graph surface in 3-space.
inline ChartCase random_chart(Rng& rng) {
  long kind = uniform(rng, 0, 2);
  if (kind == 0) {
    std::vector<std::string> v{"x", "y"};
    Poly h = random_poly(rng, 1, 3, 3, 4, false, true);
    Poly g = Poly::var(2, 1) - h.substitute({Poly::var(2, 0)});
    return {"curve y = " + to_string(h, {"x"}), build_chart(v, {g}, {Poly::var(2, 0)}, 1)};
  }
  if (kind == 1) {
    std::vector<std::string> v{"x", "y"};
    Poly phi = random_poly(rng, 1, 3, 3, 4, false, true);
    Poly f1 = Poly::var(2, 0) + phi.substitute({Poly::var(2, 1)});
    return {"plane, f1 = " + to_string(f1, v), build_chart(v, {}, {f1, Poly::var(2, 1)}, 1)};
  }
  std::vector<std::string> v{"x", "y", "z"};
  Poly h = random_poly(rng, 2, 2, 3, 3, false, true);
  Poly g = Poly::var(3, 2) - h.substitute({Poly::var(3, 0), Poly::var(3, 1)});
  size_t p = static_cast<size_t>(uniform(rng, 1, 2));
  return {"surface z = " + to_string(h, {"x", "y"}), build_chart(v, {g}, {Poly::var(3, 0), Poly::var(3, 1)}, p)};
}

/// The four chart fixtures shipped with the example corpus.
inline std::vector<ChartCase> fixture_charts() {
  std::vector<ChartCase> out;
  std::vector<std::string> z{"z1", "z2"}, xy{"x", "y"};
  out.push_back({"hyperbola", build_chart(z, {parse_poly("z1*z2-1", z)}, {parse_poly("z1-1", z)}, 1)});
  out.push_back({"parabola", build_chart(xy, {parse_poly("y-x^2-2*x", xy)}, {parse_poly("x", xy)}, 1)});
  out.push_back({"plane", build_chart(xy, {}, {parse_poly("x", xy), parse_poly("y", xy)}, 1)});
  out.push_back({"skew plane", build_chart(xy, {}, {parse_poly("x-y^2", xy), parse_poly("y", xy)}, 1)});
  return out;
}

/// Checks the flattening properties of `a` on a chart at order N.
struct FlattenCheck {
  bool killed = true;      // d_l delta(a) vanishes along the tube below order N - 1
  bool idempotent = true;  // delta(delta(a)) = delta(a) along the tube
  bool constant = true;    // delta(a) is constant along the tube with value a|_E
};

inline FlattenCheck check_flatten(const Poly& a, const EtaleChart& ch, const TubeSolution& sol, unsigned N) {
  FlattenCheck c;
  Poly d = flatten_rep(a, ch, N);
  Series along = along_tube(d, sol);
  for (size_t l = 0; l < ch.p; ++l) {
    Series dl = along_tube(ch.derive(l, d), sol).truncate(N - 1);
    if (!dl.is_zero()) c.killed = false;
  }
  Series twice = along_tube(flatten_rep(d, ch, N), sol);
  if (!(twice == along)) c.idempotent = false;
  Poly restricted = reduce_mod(a, *sol.ring);
  Series expect = Series::constant(sol.ring, ch.p, along.order(), restricted);
  if (!(along == expect)) c.constant = false;
  return c;
}

/// Retraction coordinates (f_1..f_p, delta(z_j)) pulled back along the tube.
inline bool retraction_is_identity(const EtaleChart& ch, const TubeSolution& sol, unsigned N) {
  for (size_t i = 0; i < ch.p; ++i) {
    Series s = along_tube(ch.etale[i], sol);
    Series u = Series::variable(sol.ring, ch.p, s.order(), i);
    if (!(s == u)) return false;
  }
  for (size_t j = 0; j < ch.m(); ++j) {
    Series s = along_tube(flatten_rep(Poly::var(ch.m(), j), ch, N), sol);
    Series e = Series::constant(sol.ring, ch.p, s.order(), reduce_mod(Poly::var(ch.m(), j), *sol.ring));
    if (!(s == e)) return false;
  }
  return true;
}

}  // namespace testkit
