#pragma once
// Log connections over Q(s) with a pole of order <= 1 at s = 0, flat
// sections, radius profiles, heights, relevant places, relation residuals.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "adelikit/linalg.hpp"
#include "adelikit/parallel.hpp"
#include "adelikit/polynomial.hpp"

namespace adelikit {

using QSeries = std::vector<Rational>;  // c_0, c_1, ..., c_{N-1}

struct LogConnection {
  size_t m = 0;
  std::vector<Poly> num, den;  // row-major m*m entries of Lambda, univariate in s

  const Poly& numerator(size_t i, size_t j) const { return num[i * m + j]; }
  const Poly& denominator(size_t i, size_t j) const { return den[i * m + j]; }

  void validate() const {
    if (num.size() != m * m || den.size() != m * m) throw DomainError("connection needs m*m entries");
    for (size_t k = 0; k < m * m; ++k) {
      if (num[k].nvars() != 1 || den[k].nvars() != 1) throw DomainError("connection entries must be univariate in s");
      if (den[k].is_zero()) throw DomainError("zero denominator in connection entry");
    }
  }
};

namespace detail {

inline unsigned s_order(const Poly& f) {
  unsigned o = std::numeric_limits<unsigned>::max();
  for (auto& [mono, c] : f.terms()) o = std::min(o, mono[0]);
  return o;
}

inline QSeries poly_coeffs(const Poly& f, unsigned shift, unsigned N) {
  QSeries out(N);
  for (auto& [mono, c] : f.terms())
    if (mono[0] >= shift && mono[0] - shift < N) out[mono[0] - shift] = c;
  return out;
}

/// a / b as a power series, b(0) != 0.
inline QSeries series_div(const QSeries& a, const QSeries& b) {
  size_t N = a.size();
  QSeries q(N);
  Rational inv = 1 / b[0];
  for (size_t n = 0; n < N; ++n) {
    Rational acc = a[n];
    for (size_t k = 1; k <= n && k < b.size(); ++k) acc -= b[k] * q[n - k];
    q[n] = acc * inv;
  }
  return q;
}

}  // namespace detail

/// s * Lambda(s) as m*m power series truncated at N.
inline std::vector<QSeries> omega_series(const LogConnection& c, unsigned N) {
  c.validate();
  std::vector<QSeries> out;
  for (size_t k = 0; k < c.m * c.m; ++k) {
    if (c.num[k].is_zero()) {
      out.emplace_back(N);
      continue;
    }
    unsigned b = detail::s_order(c.num[k]), a = detail::s_order(c.den[k]);
    if (1 + b < a)
      throw DomainError("pole of order " + std::to_string(a - b) + " at s = 0 in entry (" + std::to_string(k / c.m + 1) +
                        "," + std::to_string(k % c.m + 1) + ")");
    unsigned shift = 1 + b - a;
    QSeries q = detail::series_div(detail::poly_coeffs(c.num[k], b, N), detail::poly_coeffs(c.den[k], a, N));
    QSeries s(N);
    for (unsigned n = 0; n + shift < N; ++n) s[n + shift] = q[n];
    out.push_back(std::move(s));
  }
  return out;
}

inline Matrix residue(const LogConnection& c) {
  auto om = omega_series(c, 1);
  Matrix N(c.m, c.m);
  for (size_t k = 0; k < c.m * c.m; ++k) N(k / c.m, k % c.m) = om[k][0];
  return N;
}

struct GSystem {
  std::vector<QSeries> comps;
  std::string provenance;
  size_t order() const { return comps.empty() ? 0 : comps[0].size(); }
};

/// Recursion ((n)I - N) v_n = sum_{k=1}^{n} Omega_k v_{n-k}.
inline GSystem flat_section(const LogConnection& c, const Vec& v0, unsigned N) {
  if (v0.size() != c.m) throw DomainError("initial vector has the wrong dimension");
  if (N == 0) throw DomainError("order must be positive");
  auto om = omega_series(c, N);
  Matrix Res(c.m, c.m);
  for (size_t k = 0; k < c.m * c.m; ++k) Res(k / c.m, k % c.m) = om[k][0];
  Vec Nv = Res * v0;
  for (auto& x : Nv)
    if (x != 0) throw DomainError("initial vector is not in ker N");
  std::vector<Vec> v(N, Vec(c.m));
  v[0] = v0;
  for (unsigned n = 1; n < N; ++n) {
    Matrix M = Matrix::identity(c.m);
    for (size_t i = 0; i < c.m; ++i)
      for (size_t j = 0; j < c.m; ++j) M(i, j) = (i == j ? Rational(n) : Rational(0)) - Res(i, j);
    auto Minv = inverse(M);
    if (!Minv) throw DomainError("resonant residue: " + std::to_string(n) + " is an eigenvalue of N");
    Vec rhs(c.m);
    for (unsigned k = 1; k <= n; ++k)
      for (size_t i = 0; i < c.m; ++i)
        for (size_t j = 0; j < c.m; ++j) {
          const Rational& w = om[i * c.m + j][k];
          if (w != 0 && v[n - k][j] != 0) rhs[i] += w * v[n - k][j];
        }
    v[n] = *Minv * rhs;
  }
  GSystem g;
  g.comps.assign(c.m, QSeries(N));
  for (unsigned n = 0; n < N; ++n)
    for (size_t i = 0; i < c.m; ++i) g.comps[i][n] = v[n][i];
  g.provenance = "flat section of a log connection of rank " + std::to_string(c.m);
  return g;
}

namespace detail {

/// D = s * nabla = theta - Omega on truncated vectors of series.
inline std::vector<QSeries> apply_D(const std::vector<QSeries>& om, size_t m, const std::vector<QSeries>& v) {
  size_t N = v[0].size();
  std::vector<QSeries> out(m, QSeries(N));
  for (size_t i = 0; i < m; ++i)
    for (size_t n = 0; n < N; ++n) {
      Rational acc = Rational(static_cast<long>(n)) * v[i][n];
      for (size_t j = 0; j < m; ++j) {
        const QSeries& w = om[i * m + j];
        for (size_t k = 0; k <= n; ++k)
          if (w[k] != 0 && v[j][n - k] != 0) acc -= w[k] * v[j][n - k];
      }
      out[i][n] = acc;
    }
  return out;
}

}  // namespace detail

/// Flat section from an arbitrary extension v of v0 (v[i][0] = v0_i): the
/// truncated sum over j < N of (-s)^j nabla^j v / j!, applied `passes` times.
/// On the order-N truncation each pass multiplies the layer-n part by
/// (1 - D/n), so `passes` >= nilpotency index of N makes the result exact.
inline GSystem flat_section_from_extension(const LogConnection& c, const std::vector<QSeries>& ext, unsigned passes) {
  if (ext.size() != c.m || ext.empty()) throw DomainError("extension has the wrong dimension");
  size_t N = ext[0].size();
  auto om = omega_series(c, static_cast<unsigned>(N));
  Matrix Res(c.m, c.m);
  for (size_t k = 0; k < c.m * c.m; ++k) Res(k / c.m, k % c.m) = om[k][0];
  Vec v0(c.m);
  for (size_t i = 0; i < c.m; ++i) v0[i] = ext[i][0];
  for (auto& x : Res * v0)
    if (x != 0) throw DomainError("initial vector is not in ker N");
  if (!Res.pow(c.m).is_zero()) throw DomainError("extension formula needs a nilpotent residue");
  std::vector<QSeries> v = ext;
  for (unsigned pass = 0; pass < passes; ++pass) {
    std::vector<QSeries> term = v, sum = v;
    for (size_t j = 1; j < N; ++j) {
      // term_j = -(D - (j-1)) term_{j-1} / j
      auto Dt = detail::apply_D(om, c.m, term);
      for (size_t i = 0; i < c.m; ++i)
        for (size_t n = 0; n < N; ++n) {
          term[i][n] = -(Dt[i][n] - Rational(static_cast<long>(j - 1)) * term[i][n]) / Rational(static_cast<long>(j));
          sum[i][n] += term[i][n];
        }
    }
    v = std::move(sum);
  }
  GSystem g;
  g.comps = v;
  g.provenance = "flat section (extension formula, " + std::to_string(passes) + " passes)";
  return g;
}

/// Smallest e with N^e = 0, or 0 if N is not nilpotent.
inline unsigned nilpotency_index_of(const Matrix& N) {
  Matrix P = Matrix::identity(N.rows());
  for (unsigned e = 1; e <= N.rows(); ++e) {
    P = P * N;
    if (P.is_zero()) return e;
  }
  return N.rows() == 0 ? 1 : 0;
}

/// True when s (d/ds - Lambda) G vanishes through order N - 1.
inline bool ode_residual_vanishes(const LogConnection& c, const GSystem& g) {
  auto om = omega_series(c, static_cast<unsigned>(g.order()));
  auto r = detail::apply_D(om, c.m, g.comps);
  for (auto& comp : r)
    for (auto& x : comp)
      if (x != 0) return false;
  return true;
}

/// G(lambda s).
inline GSystem rescale(const GSystem& g, const Rational& lambda) {
  GSystem out = g;
  for (auto& comp : out.comps) {
    Rational pw = 1;
    for (auto& x : comp) {
      x *= pw;
      pw *= lambda;
    }
  }
  out.provenance = g.provenance + ", rescaled s -> " + to_string(lambda) + "s";
  return out;
}

// ------------------------------------------------------------ radius

/// Slack in log-radius before a place is flagged as below one.
inline constexpr double kRadiusTolerance = 0.01;

struct PlaceRadius {
  Place place;
  std::optional<double> log_radius;  // nullopt: no nonzero coefficients late in the window (infinite)
  std::optional<double> log_radius_lower, log_radius_upper;
  bool below_one = false;

  double radius() const { return log_radius ? std::exp(*log_radius) : std::numeric_limits<double>::infinity(); }
};

struct RadiusProfile {
  unsigned window = 0;
  std::vector<PlaceRadius> places;

  const PlaceRadius* find(const Place& v) const {
    for (auto& r : places)
      if (r.place == v) return &r;
    return nullptr;
  }
};

namespace detail {

/// L_n = max_i log |c_{i,n}|_v, or nullopt when all vanish.
inline std::optional<double> envelope_point(const GSystem& g, size_t n, const Place& v) {
  std::optional<double> best;
  for (auto& comp : g.comps)
    if (comp[n] != 0) {
      double l = log_abs_value(comp[n], v);
      if (!best || l > *best) best = l;
    }
  return best;
}

struct WindowMax {
  std::optional<double> value;
  size_t arg = 0;
};

inline WindowMax window_max(const GSystem& g, size_t lo, size_t hi, const Place& v) {
  WindowMax w;
  for (size_t n = lo; n <= hi; ++n) {
    auto l = envelope_point(g, n, v);
    if (l && (!w.value || *l > *w.value)) {
      w.value = l;
      w.arg = n;
    }
  }
  return w;
}

}  // namespace detail

/// log-radius estimates from the upper envelope of log|c_n|_v: with U the
/// top half of the window and Lo the quarter below it, the growth rate is
/// (max_U - max_Lo) / (argmax_U - argmax_Lo) and log radius = -rate.
inline RadiusProfile radius_profile(const GSystem& g, const std::vector<Place>& places, unsigned window) {
  if (window < 32) throw DomainError("window must be at least 32");
  if (g.order() < window + 1) throw DomainError("series is shorter than the window");
  RadiusProfile prof;
  prof.window = window;
  prof.places.resize(places.size());
  parallel_for(places.size(), [&](size_t k) {
    const Place& v = places[k];
    PlaceRadius r;
    r.place = v;
    auto U = detail::window_max(g, window / 2 + 1, window, v);
    auto Lo = detail::window_max(g, window / 4 + 1, window / 2, v);
    if (U.value) {
      std::vector<double> rates;
      if (Lo.value && U.arg != Lo.arg) rates.push_back((*U.value - *Lo.value) / double(U.arg - Lo.arg));
      rates.push_back(*U.value / double(U.arg));
      if (Lo.value) rates.push_back(*Lo.value / double(Lo.arg));
      double est = rates[0];
      auto [mn, mx] = std::minmax_element(rates.begin(), rates.end());
      r.log_radius = -est;
      r.log_radius_lower = -*mx;
      r.log_radius_upper = -*mn;
      r.below_one = *r.log_radius < -kRadiusTolerance;
    }
    prof.places[k] = r;
  });
  return prof;
}

inline double weil_height(const Rational& xi) {
  if (xi == 0) return 0;
  return std::max(log_abs(Rational(xi.get_num())), log_abs(Rational(xi.get_den())));
}

// ------------------------------------------------------------ relevance

inline std::vector<Place> candidate_places(const Rational& xi) {
  std::vector<Place> out;
  for (auto& p : prime_divisors(abs(xi.get_num()))) out.push_back(Place{false, p});
  if (abs(xi) < 1) out.push_back(Place::inf());
  return out;
}

/// Places v with |xi|_v < 1 whose radius estimate exceeds |xi|_v.
inline std::vector<Place> relevant_places(const Rational& xi, const GSystem& g, unsigned window = 0) {
  if (xi == 0) throw DomainError("xi must be nonzero");
  auto cand = candidate_places(xi);
  if (cand.empty()) return {};
  if (window == 0) window = static_cast<unsigned>(g.order() - 1);
  auto prof = radius_profile(g, cand, window);
  std::vector<Place> out;
  for (auto& r : prof.places) {
    double lx = log_abs_value(xi, r.place);
    if (!r.log_radius || *r.log_radius > lx + 1e-12) out.push_back(r.place);
  }
  return out;
}

// ------------------------------------------------------------ height

struct HeightResult {
  double sigma = 0;
  double sigma_half = 0, sigma_quarter = 0;
  bool divergent = false;
};

/// sigma_N = (1/N) sum_v log+ max_{n <= N} max_i |c_{i,n}|_v, over the
/// primes of the denominators and the infinite place.
inline double height_statistic(const GSystem& g, size_t N) {
  if (N == 0 || N > g.order()) throw DomainError("height window exceeds the series");
  std::set<Integer> primes;
  for (auto& comp : g.comps)
    for (size_t n = 0; n < N; ++n)
      if (comp[n] != 0)
        for (auto& p : prime_divisors(comp[n].get_den())) primes.insert(p);
  std::vector<Place> places;
  for (auto& p : primes) places.push_back(Place{false, p});
  places.push_back(Place::inf());
  std::vector<double> contrib(places.size());
  parallel_for(places.size(), [&](size_t k) {
    double best = 0;
    for (auto& comp : g.comps)
      for (size_t n = 0; n < N; ++n)
        if (comp[n] != 0) best = std::max(best, log_abs_value(comp[n], places[k]));
    contrib[k] = best;
  });
  double total = 0;
  for (double c : contrib) total += c;
  return total / double(N);
}

/// Flags divergence when the statistic keeps rising by a fixed amount per
/// doubling of the window (at least logarithmic growth).
inline HeightResult truncated_height(const GSystem& g, size_t N) {
  if (N < 8) throw DomainError("height window must be at least 8");
  HeightResult h;
  h.sigma = height_statistic(g, N);
  h.sigma_half = height_statistic(g, N / 2);
  h.sigma_quarter = height_statistic(g, N / 4);
  double d2 = h.sigma - h.sigma_half, d1 = h.sigma_half - h.sigma_quarter;
  h.divergent = d2 > 0.25 && d2 >= 0.5 * d1;
  return h;
}

// ------------------------------------------------------------ relations

struct RelationResidual {
  Rational value;        // P(G(xi)) on the truncation
  Rational abs_value;    // |value|_v
  bool homogeneous = true;
  std::optional<double> log_tail_bound;  // log of the estimated truncation tail at v
  std::string caveat;
};

inline Rational evaluate_truncation(const QSeries& c, const Rational& xi) {
  Rational acc = 0;
  for (size_t n = c.size(); n-- > 0;) acc = acc * xi + c[n];
  return acc;
}

inline bool is_homogeneous(const Poly& P) {
  long d = -1;
  for (auto& [m, c] : P.terms()) {
    long t = total_degree(m);
    if (d >= 0 && t != d) return false;
    d = t;
  }
  return true;
}

inline RelationResidual evaluate_relation(const Poly& P, const GSystem& g, const Rational& xi, const Place& v,
                                          unsigned N) {
  if (P.nvars() != g.comps.size()) throw DomainError("relation arity differs from the system");
  if (N == 0 || N > g.order()) throw DomainError("order exceeds the series");
  RelationResidual out;
  out.homogeneous = is_homogeneous(P);
  std::optional<PlaceRadius> rad;
  if (xi != 0) {
    auto rel = relevant_places(xi, g);
    if (std::find(rel.begin(), rel.end(), v) == rel.end())
      throw DomainError("place " + v.str() + " is not relevant for xi = " + to_string(xi));
    if (g.order() > 32) rad = radius_profile(g, {v}, static_cast<unsigned>(g.order() - 1)).places[0];
  }
  std::vector<Rational> vals;
  for (auto& comp : g.comps) vals.push_back(evaluate_truncation(QSeries(comp.begin(), comp.begin() + N), xi));
  out.value = P.evaluate(vals);
  out.abs_value = abs_value(out.value, v);
  if (xi == 0) {
    out.log_tail_bound = -std::numeric_limits<double>::infinity();
    out.caveat = "exact (xi = 0)";
  } else if (rad && rad->log_radius) {
    out.log_tail_bound = double(N) * (log_abs_value(xi, v) - *rad->log_radius);
    out.caveat = "tail estimated from the radius profile";
  } else if (rad) {
    out.log_tail_bound = -std::numeric_limits<double>::infinity();
    out.caveat = "tail estimated from the radius profile (no late coefficients)";
  } else {
    out.caveat = "unbounded tail";
  }
  return out;
}

}  // namespace adelikit
