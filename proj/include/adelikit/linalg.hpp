#pragma once
// Dense exact linear algebra over Q and subspace bookkeeping.

#include <optional>
#include <vector>

#include "adelikit/rational.hpp"

namespace adelikit {

using Vec = std::vector<Rational>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t r, size_t c) : r_(r), c_(c), a_(r * c) {}
  static Matrix identity(size_t n) {
    Matrix m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  /// Matrix whose rows are the given vectors (all of length `cols`).
  static Matrix from_rows(const std::vector<Vec>& rows, size_t cols) {
    Matrix m(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    return m;
  }

  size_t rows() const { return r_; }
  size_t cols() const { return c_; }
  Rational& operator()(size_t i, size_t j) { return a_[i * c_ + j]; }
  const Rational& operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }

  Vec row(size_t i) const { return Vec(a_.begin() + i * c_, a_.begin() + (i + 1) * c_); }
  Vec col(size_t j) const {
    Vec v(r_);
    for (size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  bool is_zero() const {
    for (auto& x : a_)
      if (x != 0) return false;
    return true;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix m(a.r_, b.c_);
    for (size_t i = 0; i < a.r_; ++i)
      for (size_t k = 0; k < a.c_; ++k) {
        if (a(i, k) == 0) continue;
        for (size_t j = 0; j < b.c_; ++j) m(i, j) += a(i, k) * b(k, j);
      }
    return m;
  }
  friend Vec operator*(const Matrix& a, const Vec& v) {
    Vec out(a.r_);
    for (size_t i = 0; i < a.r_; ++i)
      for (size_t k = 0; k < a.c_; ++k)
        if (a(i, k) != 0) out[i] += a(i, k) * v[k];
    return out;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
  }

  Matrix transpose() const {
    Matrix t(c_, r_);
    for (size_t i = 0; i < r_; ++i)
      for (size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix pow(unsigned e) const {
    Matrix r = identity(r_), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return r;
  }

  /// In-place reduced row echelon form; returns pivot columns.
  std::vector<size_t> rref() {
    std::vector<size_t> piv;
    size_t r = 0;
    for (size_t j = 0; j < c_ && r < r_; ++j) {
      size_t p = r;
      while (p < r_ && (*this)(p, j) == 0) ++p;
      if (p == r_) continue;
      if (p != r)
        for (size_t k = 0; k < c_; ++k) std::swap((*this)(p, k), (*this)(r, k));
      Rational inv = 1 / (*this)(r, j);
      for (size_t k = j; k < c_; ++k) (*this)(r, k) *= inv;
      for (size_t i = 0; i < r_; ++i) {
        if (i == r || (*this)(i, j) == 0) continue;
        Rational f = (*this)(i, j);
        for (size_t k = j; k < c_; ++k) (*this)(i, k) -= f * (*this)(r, k);
      }
      piv.push_back(j);
      ++r;
    }
    return piv;
  }

 private:
  size_t r_ = 0, c_ = 0;
  std::vector<Rational> a_;
};

/// Rank by fraction-free (Bareiss) elimination on an integer rescaling.
inline size_t rank(const Matrix& m) {
  size_t R = m.rows(), C = m.cols();
  std::vector<std::vector<Integer>> a(R, std::vector<Integer>(C));
  for (size_t i = 0; i < R; ++i) {
    Integer l = 1;
    for (size_t j = 0; j < C; ++j)
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den().get_mpz_t());
    for (size_t j = 0; j < C; ++j) a[i][j] = m(i, j).get_num() * (l / m(i, j).get_den());
  }
  Integer prev = 1;
  size_t r = 0;
  for (size_t j = 0; j < C && r < R; ++j) {
    size_t p = r;
    while (p < R && a[p][j] == 0) ++p;
    if (p == R) continue;
    std::swap(a[p], a[r]);
    for (size_t i = r + 1; i < R; ++i) {
      for (size_t k = j + 1; k < C; ++k) {
        Integer t = a[r][j] * a[i][k] - a[i][j] * a[r][k];
        mpz_divexact(a[i][k].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][j] = 0;
    }
    prev = a[r][j];
    ++r;
  }
  return r;
}

inline Rational determinant(Matrix m) {
  size_t n = m.rows();
  Rational det = 1;
  for (size_t j = 0; j < n; ++j) {
    size_t p = j;
    while (p < n && m(p, j) == 0) ++p;
    if (p == n) return 0;
    if (p != j) {
      for (size_t k = 0; k < n; ++k) std::swap(m(p, k), m(j, k));
      det = -det;
    }
    det *= m(j, j);
    for (size_t i = j + 1; i < n; ++i) {
      if (m(i, j) == 0) continue;
      Rational f = m(i, j) / m(j, j);
      for (size_t k = j; k < n; ++k) m(i, k) -= f * m(j, k);
    }
  }
  return det;
}

/// Basis of {x : m x = 0}.
inline std::vector<Vec> nullspace(Matrix m) {
  auto piv = m.rref();
  std::vector<bool> is_piv(m.cols(), false);
  for (auto p : piv) is_piv[p] = true;
  std::vector<Vec> out;
  for (size_t f = 0; f < m.cols(); ++f) {
    if (is_piv[f]) continue;
    Vec x(m.cols());
    x[f] = 1;
    for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = -m(r, f);
    out.push_back(std::move(x));
  }
  return out;
}

/// Some solution of m x = b (free variables zero), if one exists.
inline std::optional<Vec> solve(const Matrix& m, const Vec& b) {
  Matrix aug(m.rows(), m.cols() + 1);
  for (size_t i = 0; i < m.rows(); ++i) {
    for (size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
    aug(i, m.cols()) = b[i];
  }
  auto piv = aug.rref();
  if (!piv.empty() && piv.back() == m.cols()) return std::nullopt;
  Vec x(m.cols());
  for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug(r, m.cols());
  return x;
}

inline std::optional<Matrix> inverse(const Matrix& m) {
  size_t n = m.rows();
  Matrix aug(n, 2 * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  auto piv = aug.rref();
  if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
  Matrix inv(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

// ------------------------------------------------------------ subspaces

/// A subspace of Q^n stored as a canonical (RREF) row basis, so equal
/// subspaces compare equal.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(size_t n) : n_(n) {}
  Subspace(size_t n, const std::vector<Vec>& gens) : n_(n) {
    Matrix m = Matrix::from_rows(gens, n);
    auto piv = m.rref();
    for (size_t r = 0; r < piv.size(); ++r) basis_.push_back(m.row(r));
  }
  static Subspace whole(size_t n) {
    std::vector<Vec> g;
    for (size_t i = 0; i < n; ++i) {
      Vec e(n);
      e[i] = 1;
      g.push_back(e);
    }
    return Subspace(n, g);
  }

  size_t ambient() const { return n_; }
  size_t dim() const { return basis_.size(); }
  const std::vector<Vec>& basis() const { return basis_; }

  bool contains(const Vec& v) const {
    auto g = basis_;
    g.push_back(v);
    return Subspace(n_, g).dim() == dim();
  }
  bool contains(const Subspace& o) const { return (*this + o).dim() == dim(); }

  friend Subspace operator+(const Subspace& a, const Subspace& b) {
    auto g = a.basis_;
    g.insert(g.end(), b.basis_.begin(), b.basis_.end());
    return Subspace(a.n_, g);
  }
  friend bool operator==(const Subspace& a, const Subspace& b) {
    return a.n_ == b.n_ && a.basis_ == b.basis_;
  }

  /// Orthogonal-complement style dual: solutions y of <b, y> = 0 for all b.
  Subspace annihilator() const {
    if (basis_.empty()) return whole(n_);
    return Subspace(n_, nullspace(Matrix::from_rows(basis_, n_)));
  }

  friend Subspace intersect(const Subspace& a, const Subspace& b) {
    return (a.annihilator() + b.annihilator()).annihilator();
  }

 private:
  size_t n_ = 0;
  std::vector<Vec> basis_;
};

/// m(U) for a square or rectangular m acting on column vectors.
inline Subspace image(const Matrix& m, const Subspace& u) {
  std::vector<Vec> g;
  for (auto& b : u.basis()) g.push_back(m * b);
  return Subspace(m.rows(), g);
}

inline Subspace kernel(const Matrix& m) { return Subspace(m.cols(), nullspace(m)); }

/// {x : m x in U}.
inline Subspace preimage(const Matrix& m, const Subspace& u) {
  // x with m x in U  <=>  a (m x) = 0 for every annihilating functional a of U
  auto ann = u.annihilator().basis();
  if (ann.empty()) return Subspace::whole(m.cols());
  Matrix a = Matrix::from_rows(ann, m.rows());
  return kernel(a * m);
}

}  // namespace adelikit
