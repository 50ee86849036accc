#pragma once
// Exact rationals over Q and the places of Q.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace adelikit {

using Integer = mpz_class;
using Rational = mpq_class;

/// Error raised for inputs outside an operation's domain.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what, std::string path = {})
      : std::runtime_error(what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Raised when a search exceeds its budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Rational make_rational(const Integer& n, const Integer& d) {
  if (d == 0) throw DomainError("zero denominator");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(s));
    return make_rational(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
  } catch (const std::invalid_argument&) {
    throw DomainError("malformed rational '" + s + "'");
  }
}

/// "num/den" in lowest terms; integers print without a denominator.
inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Integer ipow(const Integer& b, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

inline Rational qpow(const Rational& b, long e) {
  if (e >= 0)
    return Rational(ipow(b.get_num(), e), ipow(b.get_den(), e));
  if (b == 0) throw DomainError("zero to a negative power");
  Rational r(ipow(b.get_den(), -e), ipow(b.get_num(), -e));
  r.canonicalize();
  return r;
}

inline Integer factorial(unsigned long n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

inline Integer binomial(unsigned long n, unsigned long k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// ---------------------------------------------------------------- primes

inline bool is_prime(const Integer& n) {
  return n >= 2 && mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

namespace detail {

inline Integer pollard_brent(const Integer& n, unsigned long seed) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  Integer y = seed % (n - 1) + 1, c = (seed * 7 + 3) % (n - 1) + 1, m = 64;
  Integer g = 1, r = 1, q = 1, x, ys;
  auto f = [&](const Integer& v) {
    Integer t = v * v + c;
    mpz_mod(t.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
    return t;
  };
  while (g == 1) {
    x = y;
    for (Integer i = 0; i < r; ++i) y = f(y);
    Integer k = 0;
    while (k < r && g == 1) {
      ys = y;
      for (Integer i = 0; i < m && i < r - k; ++i) {
        y = f(y);
        Integer d = abs(x - y);
        q = q * d % n;
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      k += m;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = f(ys);
      Integer d = abs(x - ys);
      mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  return g;
}

inline void factor_into(Integer n, std::vector<Integer>& out) {
  if (n < 2) return;
  for (unsigned long p = 2; p < 10000 && Integer(p) * p <= n; p += (p == 2 ? 1 : 2)) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      out.emplace_back(p);
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
    }
  }
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  Integer d = n;
  for (unsigned long seed = 1; d == n; ++seed) d = pollard_brent(n, seed);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace detail

/// Distinct prime divisors of |n|, ascending.
inline std::vector<Integer> prime_divisors(const Integer& n) {
  std::vector<Integer> out;
  detail::factor_into(abs(n), out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------- places

struct Place {
  bool infinite = false;
  Integer p = 0;

  static Place inf() { return Place{true, 0}; }
  static Place prime(const Integer& p) {
    if (!is_prime(p)) throw DomainError("not a prime: " + p.get_str());
    return Place{false, p};
  }

  std::string str() const { return infinite ? "inf" : "p:" + p.get_str(); }
  static Place parse(const std::string& s) {
    if (s == "inf") return inf();
    if (s.rfind("p:", 0) == 0) return prime(Integer(s.substr(2)));
    throw DomainError("malformed place '" + s + "'");
  }

  friend bool operator==(const Place& a, const Place& b) {
    return a.infinite == b.infinite && (a.infinite || a.p == b.p);
  }
  // finite places by prime, the infinite place last
  friend bool operator<(const Place& a, const Place& b) {
    if (a.infinite != b.infinite) return b.infinite;
    return !a.infinite && a.p < b.p;
  }
};

/// v_p(n) for n != 0.
inline long valuation(const Integer& n, const Integer& p) {
  if (n == 0) throw DomainError("valuation of zero");
  Integer rest;
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

inline long valuation(const Rational& q, const Integer& p) {
  return valuation(q.get_num(), p) - valuation(q.get_den(), p);
}

/// |q|_v, normalized so that |p|_p = 1/p.
inline Rational abs_value(const Rational& q, const Place& v) {
  if (q == 0) return 0;
  if (v.infinite) return abs(q);
  return qpow(Rational(v.p), -valuation(q, v.p));
}

/// Finite places where |q|_v != 1.
inline std::vector<Place> bad_places(const Rational& q) {
  if (q == 0) throw DomainError("bad_places of zero");
  std::vector<Integer> ps = prime_divisors(q.get_num());
  auto dps = prime_divisors(q.get_den());
  ps.insert(ps.end(), dps.begin(), dps.end());
  std::sort(ps.begin(), ps.end());
  std::vector<Place> out;
  for (auto& p : ps) out.push_back(Place{false, p});
  return out;
}

/// log of |q| for q != 0, as a double; safe for huge numerators.
inline double log_abs(const Rational& q) {
  auto lg = [](const Integer& n) {
    long e;
    double m = mpz_get_d_2exp(&e, n.get_mpz_t());
    return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
  };
  return lg(q.get_num()) - lg(q.get_den());
}

/// log |q|_v for q != 0.
inline double log_abs_value(const Rational& q, const Place& v) {
  if (v.infinite) return log_abs(q);
  return -static_cast<double>(valuation(q, v.p)) * std::log(v.p.get_d());
}

}  // namespace adelikit
