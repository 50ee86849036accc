#pragma once
// Monodromy weight filtrations of nilpotent operators, Steenbrink E1 terms
// for semistable surface degenerations, and Picard jump thresholds.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adelikit/linalg.hpp"

namespace adelikit {

struct NilpotencyInfo {
  unsigned k = 0;
  std::vector<std::string> warnings;
};

/// Least k with N^k = 0.
inline NilpotencyInfo nilpotency_order(const Matrix& N, int w = 2) {
  if (N.rows() != N.cols()) throw DomainError("operator must be square");
  size_t n = N.rows();
  NilpotencyInfo info;
  if (n == 0) {
    info.k = 1;
    return info;
  }
  Matrix P = N;
  for (unsigned k = 1; k <= n; ++k) {
    if (P.is_zero()) {
      info.k = k;
      if (w == 2 && k > 3)
        info.warnings.push_back("nilpotency order " + std::to_string(k) + " exceeds 3 for weight center 2");
      return info;
    }
    P = P * N;
  }
  throw DomainError("operator is not nilpotent");
}

struct WeightFiltration {
  int w = 2;
  std::vector<Subspace> W;  // W[r] for r = 0..2w

  std::vector<size_t> graded_dims() const {
    std::vector<size_t> g;
    for (size_t r = 0; r < W.size(); ++r) g.push_back(W[r].dim() - (r ? W[r - 1].dim() : 0));
    return g;
  }
  /// W_r with W_r = 0 below the window and everything above it.
  Subspace at(long r) const {
    if (r < 0) return Subspace(W.empty() ? 0 : W[0].ambient());
    if (r >= static_cast<long>(W.size())) return W.back();
    return W[r];
  }
};

namespace detail {

/// M_l = A, M_{-l-1} = B, then recurses on (M_{l-1}, M_{-l}).
inline void deligne_step(const Matrix& N, const Subspace& A, const Subspace& B, int l,
                         std::map<int, Subspace>& M) {
  M[l] = A;
  M[-l - 1] = B;
  if (l <= 0) return;
  Matrix Nl = N.pow(static_cast<unsigned>(l));
  Subspace upper = intersect(A, preimage(Nl, B));
  Subspace lower = image(Nl, A) + B;
  deligne_step(N, upper, lower, l - 1, M);
}

}  // namespace detail

inline WeightFiltration weight_filtration(const Matrix& N, int w = 2) {
  if (w < 0) throw DomainError("weight center must be nonnegative");
  auto info = nilpotency_order(N, w);
  int l = static_cast<int>(info.k) - 1;
  if (l > w)
    throw DomainError("nilpotency order " + std::to_string(info.k) + " too large for weight center " +
                      std::to_string(w));
  size_t n = N.rows();
  std::map<int, Subspace> M;
  detail::deligne_step(N, Subspace::whole(n), Subspace(n), l, M);
  WeightFiltration F;
  F.w = w;
  for (int r = 0; r <= 2 * w; ++r) {
    int i = r - w;
    if (i > l) F.W.push_back(Subspace::whole(n));
    else if (i < -l - 1) F.W.push_back(Subspace(n));
    else F.W.push_back(M.at(i));
  }
  return F;
}

/// Closed forms for nilpotency order at most 3, centered at w.
inline WeightFiltration closed_form_filtration(const Matrix& N, int w = 2) {
  auto info = nilpotency_order(N, w);
  size_t n = N.rows();
  Subspace all = Subspace::whole(n), zero(n);
  std::map<int, Subspace> M;  // indexed by r - w
  if (info.k == 1) {
    M[-1] = zero;
    M[0] = all;
  } else if (info.k == 2) {
    M[1] = all;
    M[0] = kernel(N);
    M[-1] = image(N, all);
    M[-2] = zero;
  } else if (info.k == 3) {
    Matrix N2 = N * N;
    Subspace kerN2 = kernel(N2), imN2 = image(N2, all);
    M[2] = all;
    M[1] = kerN2;
    M[0] = intersect(kerN2, preimage(N, imN2)) + imN2;
    M[-1] = image(N, kerN2) + imN2;
    M[-2] = imN2;
    M[-3] = zero;
  } else {
    throw DomainError("closed forms cover nilpotency order at most 3");
  }
  if (static_cast<int>(info.k) - 1 > w) throw DomainError("nilpotency order too large for the weight center");
  WeightFiltration F;
  F.w = w;
  int top = M.rbegin()->first, bottom = M.begin()->first;
  for (int r = 0; r <= 2 * w; ++r) {
    int i = r - w;
    F.W.push_back(i > top ? all : i < bottom ? zero : M.at(i));
  }
  return F;
}

struct FiltrationCheck {
  bool increasing = true;
  bool shifts_by_two = true;  // N W_r in W_{r-2}
  bool hard_lefschetz = true; // N^r : Gr_{w+r} -> Gr_{w-r} bijective
};

inline FiltrationCheck check_filtration(const Matrix& N, const WeightFiltration& F) {
  FiltrationCheck c;
  long top = 2L * F.w;
  for (long r = 1; r <= top; ++r)
    if (!F.at(r).contains(F.at(r - 1))) c.increasing = false;
  for (long r = 0; r <= top; ++r)
    if (!F.at(r - 2).contains(image(N, F.at(r)))) c.shifts_by_two = false;
  auto gr = [&](long r) { return F.at(r).dim() - F.at(r - 1).dim(); };
  for (long r = 1; r <= F.w; ++r) {
    Matrix Nr = N.pow(static_cast<unsigned>(r));
    Subspace low = F.at(F.w - r - 1);
    size_t rk = (image(Nr, F.at(F.w + r)) + low).dim() - low.dim();
    if (rk != gr(F.w + r) || gr(F.w + r) != gr(F.w - r)) c.hard_lefschetz = false;
  }
  // the top and bottom of the window must be everything and nothing
  if (F.at(top).dim() != N.rows()) c.increasing = false;
  return c;
}

// ------------------------------------------------------------ Steenbrink

struct ComponentBetti {
  long h0 = 1, h1 = 0, h2 = 0;
};
struct CurveBetti {
  long h0 = 1, h1 = 0;
};

struct StrataData {
  std::vector<ComponentBetti> components;
  std::vector<CurveBetti> double_curves;
  long triple_points = 0;

  void validate() const {
    auto nonneg = [](long x, const std::string& where) {
      if (x < 0) throw DomainError("negative Betti number at " + where);
    };
    for (size_t i = 0; i < components.size(); ++i) {
      std::string at = "components[" + std::to_string(i) + "]";
      nonneg(components[i].h0, at + ".h0");
      nonneg(components[i].h1, at + ".h1");
      nonneg(components[i].h2, at + ".h2");
    }
    for (size_t i = 0; i < double_curves.size(); ++i) {
      std::string at = "double_curves[" + std::to_string(i) + "]";
      nonneg(double_curves[i].h0, at + ".h0");
      nonneg(double_curves[i].h1, at + ".h1");
    }
    nonneg(triple_points, "triple_points");
  }
};

struct E1Term {
  int p = 0, q = 0;
  long dim = 0;
  std::string description;
  std::optional<long> e2_dim;
};

/// Optional d1 data around one term: `in` maps into it, `out` maps out of it.
struct D1Maps {
  int p = 0, q = 0;
  std::optional<Matrix> in, out;
};

struct SteenbrinkE1 {
  std::vector<E1Term> terms;  // (2,0), (1,1), (0,2), (-1,3), (-2,4)
  std::vector<std::string> vanishing;

  long dim(int p, int q) const {
    for (auto& t : terms)
      if (t.p == p && t.q == q) return t.dim;
    throw DomainError("no such E1 term");
  }
};

inline SteenbrinkE1 steenbrink_e1(const StrataData& s, const std::vector<D1Maps>& d1 = {}) {
  s.validate();
  long h0y3 = s.triple_points, h1y2 = 0, h2y1 = 0;
  for (auto& c : s.double_curves) h1y2 += c.h1;
  for (auto& c : s.components) h2y1 += c.h2;
  SteenbrinkE1 e;
  e.terms = {{2, 0, h0y3, "H^0(Y^[3])", {}},
             {1, 1, h1y2, "H^1(Y^[2])", {}},
             {0, 2, h2y1 + h0y3, "H^2(Y^[1]) + H^0(Y^[3])(-1)", {}},
             {-1, 3, h1y2, "H^1(Y^[2])(-1)", {}},
             {-2, 4, h0y3, "H^0(Y^[3])(-2)", {}}};
  e.vanishing = {"E^{-2,3} = H^1(Y^[3])(2) = 0"};
  for (auto& m : d1) {
    E1Term* t = nullptr;
    for (auto& x : e.terms)
      if (x.p == m.p && x.q == m.q) t = &x;
    if (!t) throw DomainError("d1 data for an unknown term (" + std::to_string(m.p) + "," + std::to_string(m.q) + ")");
    size_t d = static_cast<size_t>(t->dim);
    if (m.in && m.in->rows() != d) throw DomainError("incoming d1 has the wrong target dimension");
    if (m.out && m.out->cols() != d) throw DomainError("outgoing d1 has the wrong source dimension");
    if (m.in && m.out && !(*m.out * *m.in).is_zero()) throw DomainError("d1 maps do not compose to zero");
    long ker = m.out ? static_cast<long>(d - rank(*m.out)) : static_cast<long>(d);
    long im = m.in ? static_cast<long>(rank(*m.in)) : 0;
    t->e2_dim = ker - im;
  }
  return e;
}

// ------------------------------------------------------------ thresholds

enum class Family { Generic, K3 };

inline Family parse_family(const std::string& s) {
  if (s == "generic") return Family::Generic;
  if (s == "K3" || s == "k3") return Family::K3;
  throw DomainError("unknown family '" + s + "'");
}

/// Additive Picard-rank jump forced by nilpotency order k.
inline long jump_threshold(long k, std::optional<long> dim_im_N, Family fam) {
  if (k != 2 && k != 3) throw DomainError("nilpotency order must be 2 or 3");
  if (fam == Family::K3) {
    if (k == 2 && dim_im_N && *dim_im_N > 2) throw DomainError("K3 with k = 2 requires dim im N <= 2");
    return 5 - k;
  }
  if (k == 3) return 2;
  if (!dim_im_N) throw DomainError("dim im N is required when k = 2");
  if (*dim_im_N < 1) throw DomainError("dim im N must be at least 1 when k = 2");
  return *dim_im_N + 1;
}

}  // namespace adelikit
