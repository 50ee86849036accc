#pragma once
// Sparse multivariate polynomials over Q and degree-first monomial orders.

#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "adelikit/rational.hpp"

namespace adelikit {

using Monomial = std::vector<std::uint32_t>;

inline unsigned total_degree(const Monomial& m) {
  return std::accumulate(m.begin(), m.end(), 0u);
}

inline bool divides(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r(a);
  for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

inline Monomial mono_div(const Monomial& a, const Monomial& b) {
  Monomial r(a);
  for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

inline Monomial mono_lcm(const Monomial& a, const Monomial& b) {
  Monomial r(a);
  for (size_t i = 0; i < r.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

inline bool coprime(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] && b[i]) return false;
  return true;
}

/// A total order refining total degree. `priority[k]` is the variable that
/// is k-th most significant; empty means the declared order.
struct MonomialOrder {
  enum class Kind { degrevlex, deglex };
  Kind kind = Kind::degrevlex;
  std::vector<int> priority;

  static MonomialOrder parse(const std::string& s) {
    if (s == "degrevlex") return {Kind::degrevlex, {}};
    if (s == "deglex") return {Kind::deglex, {}};
    throw DomainError("unknown monomial order '" + s + "'");
  }
  std::string name() const { return kind == Kind::degrevlex ? "degrevlex" : "deglex"; }

  int var(size_t k) const { return priority.empty() ? static_cast<int>(k) : priority[k]; }

  /// -1, 0, 1 as a < b, a == b, a > b.
  int compare(const Monomial& a, const Monomial& b) const {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db ? -1 : 1;
    size_t n = a.size();
    if (kind == Kind::deglex) {
      for (size_t k = 0; k < n; ++k) {
        int i = var(k);
        if (a[i] != b[i]) return a[i] > b[i] ? 1 : -1;
      }
    } else {
      for (size_t k = n; k-- > 0;) {
        int i = var(k);
        if (a[i] != b[i]) return a[i] < b[i] ? 1 : -1;
      }
    }
    return 0;
  }

  friend bool operator==(const MonomialOrder& a, const MonomialOrder& b) {
    return a.kind == b.kind && a.priority == b.priority;
  }
};

class Poly {
 public:
  using Terms = std::map<Monomial, Rational>;

  Poly() = default;
  explicit Poly(size_t nvars) : n_(nvars) {}
  Poly(size_t nvars, const Rational& c) : n_(nvars) {
    if (c != 0) t_[Monomial(nvars, 0)] = c;
  }

  static Poly var(size_t nvars, size_t i) {
    Poly p(nvars);
    Monomial m(nvars, 0);
    m[i] = 1;
    p.t_[m] = 1;
    return p;
  }
  static Poly term(const Monomial& m, const Rational& c) {
    Poly p(m.size());
    if (c != 0) p.t_[m] = c;
    return p;
  }

  size_t nvars() const { return n_; }
  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  size_t size() const { return t_.size(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (auto& [m, c] : t_) d = std::max<int>(d, total_degree(m));
    return d;
  }

  Rational coeff(const Monomial& m) const {
    auto it = t_.find(m);
    return it == t_.end() ? Rational(0) : it->second;
  }
  Rational constant_term() const { return coeff(Monomial(n_, 0)); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && total_degree(t_.begin()->first) == 0); }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = t_.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) t_.erase(it);
    }
  }

  /// Leading monomial and coefficient; requires a nonzero polynomial.
  std::pair<Monomial, Rational> lead(const MonomialOrder& ord) const {
    auto best = t_.begin();
    for (auto it = std::next(t_.begin()); it != t_.end(); ++it)
      if (ord.compare(it->first, best->first) > 0) best = it;
    return {best->first, best->second};
  }

  /// this += c * m * g
  void add_scaled(const Poly& g, const Rational& c, const Monomial& m) {
    for (auto& [gm, gc] : g.t_) add_term(mono_mul(gm, m), c * gc);
  }

  Poly& operator+=(const Poly& o) {
    for (auto& [m, c] : o.t_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (auto& [m, c] : o.t_) add_term(m, -c);
    return *this;
  }
  Poly& operator*=(const Rational& c) {
    if (c == 0) {
      t_.clear();
      return *this;
    }
    for (auto& [m, x] : t_) x *= c;
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
  friend Poly operator*(const Rational& c, Poly a) { return a *= c; }
  friend Poly operator-(Poly a) { return a *= Rational(-1); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r(a.n_);
    for (auto& [m, c] : b.t_) r.add_scaled(a, c, m);
    return r;
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.t_ == b.t_; }

  Poly pow(unsigned e) const {
    Poly r(n_, 1), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return r;
  }

  Poly derivative(size_t i) const {
    Poly r(n_);
    for (auto& [m, c] : t_) {
      if (m[i] == 0) continue;
      Monomial d(m);
      --d[i];
      r.add_term(d, c * m[i]);
    }
    return r;
  }

  Rational evaluate(const std::vector<Rational>& x) const {
    Rational s = 0;
    for (auto& [m, c] : t_) {
      Rational t = c;
      for (size_t i = 0; i < n_; ++i)
        if (m[i]) t *= qpow(x[i], m[i]);
      s += t;
    }
    return s;
  }

  /// Substitute polynomials (all of one common arity) for the variables.
  Poly substitute(const std::vector<Poly>& xs) const {
    size_t k = xs.empty() ? 0 : xs[0].nvars();
    Poly r(k);
    std::vector<std::vector<Poly>> powers(n_);
    for (auto& [m, c] : t_) {
      Poly t(k, c);
      for (size_t i = 0; i < n_; ++i) {
        if (!m[i]) continue;
        auto& pw = powers[i];
        if (pw.empty()) pw.push_back(Poly(k, 1));
        while (pw.size() <= m[i]) pw.push_back(pw.back() * xs[i]);
        t = t * pw[m[i]];
      }
      r += t;
    }
    return r;
  }

  /// Positive rational c with (1/c) * this integral with coprime coefficients.
  Rational content() const {
    Integer g = 0, l = 1;
    for (auto& [m, c] : t_) {
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num().get_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
    }
    if (g == 0) return 0;
    return make_rational(g, l);
  }

  /// Integer-primitive associate with positive leading coefficient.
  Poly primitive(const MonomialOrder& ord) const {
    if (is_zero()) return *this;
    Rational c = content();
    if (lead(ord).second < 0) c = -c;
    return *this * (1 / c);
  }

  /// Terms sorted descending under `ord`.
  std::vector<std::pair<Monomial, Rational>> sorted_terms(const MonomialOrder& ord) const {
    std::vector<std::pair<Monomial, Rational>> v(t_.begin(), t_.end());
    std::sort(v.begin(), v.end(), [&](auto& a, auto& b) { return ord.compare(a.first, b.first) > 0; });
    return v;
  }

 private:
  size_t n_ = 0;
  Terms t_;
};

/// Variable names plus a monomial order.
struct Ring {
  std::vector<std::string> vars;
  MonomialOrder order;
  size_t nvars() const { return vars.size(); }
};

inline std::string to_string(const Poly& f, const std::vector<std::string>& vars, const MonomialOrder& ord = {}) {
  if (f.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (auto& [m, c] : f.sorted_terms(ord)) {
    Rational a = abs(c);
    bool unit_mono = total_degree(m) == 0;
    s += first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
    first = false;
    std::string mono;
    for (size_t i = 0; i < m.size(); ++i) {
      if (!m[i]) continue;
      if (!mono.empty()) mono += "*";
      mono += vars[i];
      if (m[i] > 1) mono += "^" + std::to_string(m[i]);
    }
    if (unit_mono) s += to_string(a);
    else if (a == 1) s += mono;
    else s += to_string(a) + "*" + mono;
  }
  return s;
}

}  // namespace adelikit
