#pragma once
// Truncated multivariate power series with coefficients in A/I.

#include <functional>
#include <limits>

#include "adelikit/groebner.hpp"

namespace adelikit {

/// Order of a series that is really a polynomial (no truncation).
inline constexpr unsigned kExact = std::numeric_limits<unsigned>::max();

class Series {
 public:
  using Coeffs = std::map<Monomial, Poly>;

  Series() = default;
  Series(Ideal ring, size_t nu, unsigned order) : ring_(std::move(ring)), nu_(nu), order_(order) {}

  static Series constant(Ideal ring, size_t nu, unsigned order, const Poly& c) {
    Series s(ring, nu, order);
    s.set(Monomial(nu, 0), c);
    return s;
  }
  static Series variable(Ideal ring, size_t nu, unsigned order, size_t i) {
    Series s(ring, nu, order);
    Monomial m(nu, 0);
    m[i] = 1;
    s.set(m, Poly(s.ring_->nvars, 1));
    return s;
  }
  /// A polynomial in u_1..u_nu with rational coefficients.
  static Series from_poly(Ideal ring, const Poly& p, unsigned order) {
    Series s(ring, p.nvars(), order);
    for (auto& [m, c] : p.terms()) s.set(m, Poly(s.ring_->nvars, c));
    return s;
  }

  const Ideal& ring() const { return ring_; }
  size_t nu() const { return nu_; }
  unsigned order() const { return order_; }
  bool exact() const { return order_ == kExact; }
  const Coeffs& coeffs() const { return c_; }
  size_t rvars() const { return ring_->nvars; }

  Poly coeff(const Monomial& m) const {
    auto it = c_.find(m);
    return it == c_.end() ? Poly(rvars()) : it->second;
  }
  Poly constant_term() const { return coeff(Monomial(nu_, 0)); }
  bool is_zero() const { return c_.empty(); }

  /// Sets the coefficient at m (reduced); ignored at or beyond the order.
  void set(const Monomial& m, const Poly& p) {
    if (total_degree(m) >= order_) return;
    Poly r = reduce_mod(p, *ring_);
    if (r.is_zero()) c_.erase(m);
    else c_[m] = std::move(r);
  }
  void add_to(const Monomial& m, const Poly& p) {
    if (total_degree(m) >= order_) return;
    set(m, coeff(m) + p);
  }

  Series truncate(unsigned n) const {
    Series s(ring_, nu_, std::min(order_, n));
    for (auto& [m, c] : c_)
      if (total_degree(m) < s.order_) s.c_[m] = c;
    return s;
  }

  /// Largest total degree present, or -1.
  int degree() const {
    int d = -1;
    for (auto& [m, c] : c_) d = std::max<int>(d, total_degree(m));
    return d;
  }

  friend bool operator==(const Series& a, const Series& b) {
    return a.nu_ == b.nu_ && a.order_ == b.order_ && a.c_ == b.c_;
  }

  void check_compatible(const Series& o) const {
    if (nu_ != o.nu_) throw DomainError("series arity mismatch");
    if (ring_ != o.ring_ && !(ring_->gens == o.ring_->gens && ring_->nvars == o.ring_->nvars))
      throw DomainError("series coefficient ring mismatch");
  }

  friend Series operator+(const Series& a, const Series& b) {
    a.check_compatible(b);
    Series s = a.truncate(b.order_);
    for (auto& [m, c] : b.c_) s.add_to(m, c);
    return s;
  }
  friend Series operator-(const Series& a) {
    Series s = a;
    for (auto& [m, c] : s.c_) c *= Rational(-1);
    return s;
  }
  friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

  /// Multiplication by a ring element.
  Series scale(const Poly& r) const {
    Series s(ring_, nu_, order_);
    for (auto& [m, c] : c_) s.set(m, c * r);
    return s;
  }

  friend Series operator*(const Series& a, const Series& b) {
    a.check_compatible(b);
    Series s(a.ring_, a.nu_, std::min(a.order_, b.order_));
    std::map<Monomial, Poly> acc;
    for (auto& [ma, ca] : a.c_) {
      unsigned da = total_degree(ma);
      for (auto& [mb, cb] : b.c_) {
        if (da + total_degree(mb) >= s.order_) continue;
        auto [it, fresh] = acc.try_emplace(mono_mul(ma, mb), Poly(a.rvars()));
        it->second += ca * cb;
      }
    }
    for (auto& [m, c] : acc) s.set(m, c);
    return s;
  }

  Series derivative(size_t i) const {
    if (i >= nu_) throw DomainError("derivative index out of range");
    Series s(ring_, nu_, exact() ? kExact : (order_ == 0 ? 0 : order_ - 1));
    for (auto& [m, c] : c_) {
      if (!m[i]) continue;
      Monomial d(m);
      --d[i];
      s.set(d, c * Rational(m[i]));
    }
    return s;
  }

 private:
  Ideal ring_;
  size_t nu_ = 0;
  unsigned order_ = 0;
  Coeffs c_;
};

/// A polynomial in z_1..z_sigma over Q, seen as an exact series over `ring`.
inline Series exact_series(Ideal ring, const Poly& p) { return Series::from_poly(std::move(ring), p, kExact); }

namespace detail {

inline void require_gating(const Series& B, const std::vector<Series>& A) {
  if (B.nu() != A.size()) throw DomainError("composition arity mismatch");
  if (B.exact()) return;  // (I): B is a polynomial
  for (auto& a : A)
    if (!a.constant_term().is_zero())
      throw DomainError("composition rejected: (I) fails since B is not a polynomial; (II)/(III) fail since A(0) != 0");
}

}  // namespace detail

/// B(A_1, ..., A_sigma) truncated at N, by Horner substitution.
inline Series compose(const Series& B, const std::vector<Series>& A, unsigned N) {
  detail::require_gating(B, A);
  if (A.empty()) throw DomainError("composition with no inner series");
  unsigned order = std::min(N, B.order());
  for (auto& a : A) {
    a.check_compatible(A[0]);
    order = std::min(order, a.order());
  }
  const Ideal& ring = A[0].ring();
  size_t nu = A[0].nu();
  std::vector<Series> inner;
  for (auto& a : A) inner.push_back(a.truncate(order));
  using Item = std::pair<Monomial, Poly>;
  std::function<Series(const std::vector<Item>&, size_t)> horner = [&](const std::vector<Item>& terms,
                                                                        size_t i) -> Series {
    if (i == B.nu()) {
      Poly c(ring->nvars);
      for (auto& [m, p] : terms) c += p;
      return Series::constant(ring, nu, order, c);
    }
    std::map<unsigned, std::vector<Item>> groups;
    for (auto& t : terms) groups[t.first[i]].push_back(t);
    Series acc(ring, nu, order);
    unsigned top = groups.empty() ? 0 : groups.rbegin()->first;
    for (unsigned e = top + 1; e-- > 0;) {
      if (e != top) acc = acc * inner[i];
      auto it = groups.find(e);
      if (it != groups.end()) acc = acc + horner(it->second, i + 1);
    }
    return acc;
  };
  std::vector<Item> terms(B.coeffs().begin(), B.coeffs().end());
  return horner(terms, 0);
}

/// The prec order on multi-indices: by total size, then lexicographically.
inline bool prec(const Monomial& a, const Monomial& b) {
  unsigned da = total_degree(a), db = total_degree(b);
  if (da != db) return da < db;
  return a < b;
}

/// (d_lambda B)(point) for B with coefficients in the ring.
inline Poly partial_at(const Series& B, const Monomial& lambda, const std::vector<Poly>& point, const GroebnerBasis& ring) {
  Poly acc(ring.nvars);
  for (auto& [M, c] : B.coeffs()) {
    if (!divides(lambda, M)) continue;
    Rational fall = 1;
    Poly t = c;
    for (size_t i = 0; i < M.size(); ++i) {
      for (unsigned k = 0; k < lambda[i]; ++k) fall *= M[i] - k;
      unsigned rest = M[i] - lambda[i];
      if (rest) t = reduce_mod(t * point[i].pow(rest), ring);
    }
    acc += t * fall;
  }
  return reduce_mod(acc, ring);
}

/// The J-th Taylor coefficient of B o A by the closed Faa di Bruno sum over
/// lambda and the chains l_1 < ... < l_s (prec order) with multiplicities k_a.
inline Poly faa_di_bruno_coefficient(const Series& B, const std::vector<Series>& A, const Monomial& J) {
  detail::require_gating(B, A);
  const Ideal& ring = A[0].ring();
  size_t sigma = A.size(), nu = J.size();
  unsigned nJ = total_degree(J);
  for (auto& a : A)
    if (nJ >= a.order()) throw DomainError("coefficient index beyond the truncation order");
  if (!B.exact() && nJ >= B.order()) throw DomainError("coefficient index beyond the truncation order");
  std::vector<Poly> a0;
  for (auto& a : A) a0.push_back(a.constant_term());
  if (nJ == 0) return partial_at(B, Monomial(sigma, 0), a0, *ring);

  // nonzero l <= J componentwise, sorted by prec
  std::vector<Monomial> ells;
  for (auto& m : monomials_up_to(nu, nJ))
    if (total_degree(m) > 0 && divides(m, J)) ells.push_back(m);
  std::sort(ells.begin(), ells.end(), prec);

  // compositions of m into sigma parts
  std::map<unsigned, std::vector<Monomial>> comps;
  auto compositions = [&](unsigned m) -> const std::vector<Monomial>& {
    auto it = comps.find(m);
    if (it != comps.end()) return it->second;
    auto& out = comps[m];
    for (auto& k : monomials_up_to(sigma, m))
      if (total_degree(k) == m) out.push_back(k);
    return out;
  };

  std::map<Monomial, Poly> bucket;  // lambda -> inner sum
  Monomial lambda(sigma, 0);
  std::function<void(size_t, const Monomial&, const Poly&)> rec = [&](size_t pos, const Monomial& rem,
                                                                       const Poly& prod) {
    if (total_degree(rem) == 0) {
      auto [it, fresh] = bucket.try_emplace(lambda, Poly(ring->nvars));
      it->second += prod;
      return;
    }
    for (size_t q = pos; q < ells.size(); ++q) {
      const Monomial& l = ells[q];
      for (unsigned m = 1;; ++m) {
        Monomial ml(l);
        for (auto& x : ml) x *= m;
        if (!divides(ml, rem)) break;
        Monomial rem2 = mono_div(rem, ml);
        for (auto& k : compositions(m)) {
          Poly p = prod;
          Rational denom = 1;
          bool zero = false;
          for (size_t i = 0; i < sigma && !zero; ++i) {
            if (!k[i]) continue;
            Poly a = A[i].coeff(l);
            if (a.is_zero()) zero = true;
            p = reduce_mod(p * a.pow(k[i]), *ring);
            denom *= Rational(factorial(k[i]));
          }
          if (zero) continue;
          for (size_t i = 0; i < sigma; ++i) lambda[i] += k[i];
          rec(q + 1, rem2, p * (1 / denom));
          for (size_t i = 0; i < sigma; ++i) lambda[i] -= k[i];
        }
      }
    }
  };
  rec(0, J, Poly(ring->nvars, 1));

  Poly total(ring->nvars);
  for (auto& [lam, inner] : bucket) total += partial_at(B, lam, a0, *ring) * inner;
  return reduce_mod(total, *ring);
}

/// Multiplicative inverse when the constant term is a nonzero rational.
inline Series invert(const Series& f, unsigned N) {
  Poly a0 = f.constant_term();
  if (a0.is_zero() || !a0.is_constant())
    throw DomainError("constant term is not a certified unit (only nonzero rational constants are accepted)");
  Rational inv = 1 / a0.constant_term();
  unsigned order = std::min(N, f.order());
  if (order == kExact) throw DomainError("inversion needs a finite order");
  Series b(f.ring(), f.nu(), order);
  auto monos = monomials_up_to(f.nu(), order - 1);  // graded, so L before M
  for (auto& M : monos) {
    if (total_degree(M) == 0) {
      b.set(M, Poly(f.rvars(), inv));
      continue;
    }
    Poly acc(f.rvars());
    for (auto& [J, aJ] : f.coeffs()) {
      if (total_degree(J) == 0 || !divides(J, M)) continue;
      Poly bl = b.coeff(mono_div(M, J));
      if (!bl.is_zero()) acc += aJ * bl;
    }
    b.set(M, acc * (-inv));
  }
  return b;
}

}  // namespace adelikit
