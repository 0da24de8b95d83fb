#pragma once

// Brute-force ground truth for small compact pairs. Everything here is
// computed from matrix commutators and ad-traces; no closed form from the
// other modules is used.

#include "ehhk/catalog.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehhk::oracle {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class AlgebraType { so, su, sp };

struct LieAlgebraModel {
  std::string name;
  int dim = 0;
  std::vector<MatrixXd> basis;  // real matrices, Frobenius-orthonormal
  std::vector<MatrixXd> ad;     // ad[i](k, l): coefficient of X_k in [X_i, X_l]
  MatrixXd killing;             // tr(ad X_i ad X_j)

  VectorXd coords(const MatrixXd& m) const {
    VectorXd c(dim);
    for (int k = 0; k < dim; ++k) c[k] = (basis[k].array() * m.array()).sum();
    return c;
  }

  MatrixXd matrix(const VectorXd& c) const {
    MatrixXd m = MatrixXd::Zero(basis[0].rows(), basis[0].cols());
    for (int k = 0; k < dim; ++k) m += c[k] * basis[k];
    return m;
  }

  VectorXd bracket(const VectorXd& u, const VectorXd& v) const {
    VectorXd out = VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i)
      if (u[i] != 0) out += u[i] * (ad[i] * v);
    return out;
  }

  double killing_form(const VectorXd& u, const VectorXd& v) const { return u.dot(killing * v); }

  double jacobi_residual() const {
    double worst = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        // ad[X_i, X_j] = [ad X_i, ad X_j]
        MatrixXd lhs = MatrixXd::Zero(dim, dim);
        VectorXd cij = ad[i].col(j);
        for (int k = 0; k < dim; ++k) lhs += cij[k] * ad[k];
        worst = std::max(worst, (lhs - (ad[i] * ad[j] - ad[j] * ad[i])).cwiseAbs().maxCoeff());
      }
    return worst;
  }
};

namespace detail {

inline MatrixXd realify(const MatrixXcd& z) {
  const auto n = z.rows();
  MatrixXd r(2 * n, 2 * n);
  r << z.real(), -z.imag(), z.imag(), z.real();
  return r;
}

// Modified Gram-Schmidt under the Frobenius product; drops dependent inputs.
inline std::vector<MatrixXd> orthonormalize(const std::vector<MatrixXd>& gens, double tol = 1e-12) {
  std::vector<MatrixXd> out;
  for (MatrixXd m : gens) {
    for (const auto& b : out) m -= (b.array() * m.array()).sum() * b;
    const double nrm = m.norm();
    if (nrm > tol) out.push_back(m / nrm);
  }
  return out;
}

inline MatrixXcd unit(int n, int i, int j) {
  MatrixXcd e = MatrixXcd::Zero(n, n);
  e(i, j) = 1;
  return e;
}

// u(n) generators: E_jk - E_kj, i(E_jk + E_kj), i E_jj.
inline std::vector<MatrixXcd> unitary_generators(int n, bool traceless) {
  const std::complex<double> I(0, 1);
  std::vector<MatrixXcd> g;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      g.push_back(unit(n, j, k) - unit(n, k, j));
      g.push_back(I * (unit(n, j, k) + unit(n, k, j)));
    }
  if (traceless) {
    for (int j = 0; j + 1 < n; ++j) g.push_back(I * (unit(n, j, j) - unit(n, j + 1, j + 1)));
  } else {
    for (int j = 0; j < n; ++j) g.push_back(I * unit(n, j, j));
  }
  return g;
}

// sp(n) = {[[A, B], [-conj(B), conj(A)]] : A in u(n), B complex symmetric}.
inline std::vector<MatrixXcd> symplectic_generators(int n) {
  const std::complex<double> I(0, 1);
  auto block = [n](const MatrixXcd& A, const MatrixXcd& B) {
    MatrixXcd m(2 * n, 2 * n);
    m << A, B, -B.conjugate(), A.conjugate();
    return m;
  };
  const MatrixXcd zero = MatrixXcd::Zero(n, n);
  std::vector<MatrixXcd> g;
  for (const auto& A : unitary_generators(n, false)) g.push_back(block(A, zero));
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      MatrixXcd S = unit(n, j, k) + unit(n, k, j);
      if (j == k) S /= 2.0;
      g.push_back(block(zero, S));
      g.push_back(block(zero, I * S));
    }
  return g;
}

inline std::vector<MatrixXcd> orthogonal_generators(int n) {
  std::vector<MatrixXcd> g;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) g.push_back(unit(n, j, k) - unit(n, k, j));
  return g;
}

inline std::vector<MatrixXd> realify_all(const std::vector<MatrixXcd>& zs) {
  std::vector<MatrixXd> out;
  for (const auto& z : zs) out.push_back(realify(z));
  return out;
}

}  // namespace detail

// Structure constants from commutators, Killing form from ad-traces.
inline LieAlgebraModel model_from_basis(std::string name, std::vector<MatrixXd> basis) {
  LieAlgebraModel m;
  m.name = std::move(name);
  m.basis = std::move(basis);
  m.dim = static_cast<int>(m.basis.size());
  m.ad.assign(m.dim, MatrixXd::Zero(m.dim, m.dim));
  for (int i = 0; i < m.dim; ++i)
    for (int l = 0; l < m.dim; ++l) {
      MatrixXd c = m.basis[i] * m.basis[l] - m.basis[l] * m.basis[i];
      VectorXd v = m.coords(c);
      if ((m.matrix(v) - c).cwiseAbs().maxCoeff() > 1e-10)
        throw std::logic_error(m.name + ": basis is not closed under the bracket");
      m.ad[i].col(l) = v;
    }
  m.killing.resize(m.dim, m.dim);
  for (int i = 0; i < m.dim; ++i)
    for (int j = i; j < m.dim; ++j) m.killing(i, j) = m.killing(j, i) = (m.ad[i] * m.ad[j]).trace();
  return m;
}

inline LieAlgebraModel build_algebra(AlgebraType type, int n) {
  std::vector<MatrixXd> gens;
  std::string name;
  switch (type) {
    case AlgebraType::so:
      if (n < 3) throw std::invalid_argument("so(n) needs n >= 3");
      name = "so(" + std::to_string(n) + ")";
      for (const auto& z : detail::orthogonal_generators(n)) gens.push_back(z.real());
      break;
    case AlgebraType::su:
      if (n < 2) throw std::invalid_argument("su(n) needs n >= 2");
      name = "su(" + std::to_string(n) + ")";
      gens = detail::realify_all(detail::unitary_generators(n, true));
      break;
    case AlgebraType::sp:
      if (n < 1) throw std::invalid_argument("sp(n) needs n >= 1");
      name = "sp(" + std::to_string(n) + ")";
      gens = detail::realify_all(detail::symplectic_generators(n));
      break;
  }
  auto basis = detail::orthonormalize(gens);
  if (basis.size() > 200) throw std::invalid_argument(name + ": dimension above desk scale");
  return model_from_basis(name, std::move(basis));
}

// ---------------------------------------------------------------------------
// Embedded pairs h = k + q

enum class EmbedCase { su3_so3, so5_so4, sp2_sp1sp1, su3_t2, su4_sp2 };

inline std::vector<EmbedCase> all_embed_cases() {
  return {EmbedCase::su3_so3, EmbedCase::so5_so4, EmbedCase::sp2_sp1sp1, EmbedCase::su3_t2, EmbedCase::su4_sp2};
}

inline const char* to_string(EmbedCase c) {
  switch (c) {
    case EmbedCase::su3_so3: return "SU(3)/SO(3)";
    case EmbedCase::so5_so4: return "SO(5)/SO(4)";
    case EmbedCase::sp2_sp1sp1: return "Sp(2)/Sp(1)xSp(1)";
    case EmbedCase::su3_t2: return "SU(3)/T^2";
    case EmbedCase::su4_sp2: return "SU(4)/Sp(2)";
  }
  return "?";
}

// Catalog row describing the same pair (up to local isomorphism).
inline std::string catalog_id(EmbedCase c) {
  switch (c) {
    case EmbedCase::su3_so3: return "SU(m)/SO(m)[m=3]";
    case EmbedCase::so5_so4: return "Sp(2m)/Sp(m)xSp(m)[m=1]";  // so(5) = sp(2), so(4) = sp(1) + sp(1)
    case EmbedCase::sp2_sp1sp1: return "Sp(2m)/Sp(m)xSp(m)[m=1]";
    case EmbedCase::su3_t2: return "SU(m)/T^(m-1)[m=3]";
    case EmbedCase::su4_sp2: return "SU(2m)/Sp(m)[m=2]";
  }
  return "";
}

struct KillingIdeal {
  double a = 0;
  std::vector<int> columns;  // columns of k_basis spanning the ideal
};

struct EmbeddedPair {
  EmbedCase which{};
  LieAlgebraModel h;
  MatrixXd k_basis;  // dim_h x d, -Kil_h-orthonormal
  MatrixXd q_basis;  // dim_h x n, -Kil_h-orthonormal, orthogonal to k
  std::vector<KillingIdeal> ideals;  // ascending a; a = 0 (center) first

  int d() const { return static_cast<int>(k_basis.cols()); }
  int n() const { return static_cast<int>(q_basis.cols()); }
};

namespace detail {

// -Kil_h-orthonormal basis of span(cols), returned as columns.
inline MatrixXd killing_orthonormal(const LieAlgebraModel& h, const std::vector<VectorXd>& vecs) {
  std::vector<VectorXd> out;
  auto ip = [&](const VectorXd& u, const VectorXd& v) { return -h.killing_form(u, v); };
  for (VectorXd v : vecs) {
    for (const auto& b : out) v -= ip(b, v) * b;
    const double nrm2 = ip(v, v);
    if (nrm2 > 1e-20) out.push_back(v / std::sqrt(nrm2));
  }
  MatrixXd m(h.dim, out.size());
  for (std::size_t i = 0; i < out.size(); ++i) m.col(i) = out[i];
  return m;
}

inline std::vector<VectorXd> coords_of(const LieAlgebraModel& h, const std::vector<MatrixXd>& ms) {
  std::vector<VectorXd> out;
  for (const auto& m : ms) {
    VectorXd c = h.coords(m);
    if ((h.matrix(c) - m).cwiseAbs().maxCoeff() > 1e-10)
      throw std::logic_error(h.name + ": subalgebra generator outside h");
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

// ad of k on itself in the k basis; entry (m, j) of ad(Z_i) is -Kil_h([Z_i, Z_j], Z_m).
inline std::vector<MatrixXd> k_adjoint(const EmbeddedPair& p) {
  const int d = p.d();
  std::vector<MatrixXd> ad(d, MatrixXd::Zero(d, d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      VectorXd br = p.h.bracket(p.k_basis.col(i), p.k_basis.col(j));
      for (int m = 0; m < d; ++m) ad[i](m, j) = -p.h.killing_form(br, p.k_basis.col(m));
    }
  return ad;
}

inline EmbeddedPair embed_pair(EmbedCase c) {
  EmbeddedPair p;
  p.which = c;
  const std::complex<double> I(0, 1);
  std::vector<MatrixXd> k_gens;
  switch (c) {
    case EmbedCase::su3_so3:
      p.h = build_algebra(AlgebraType::su, 3);
      k_gens = detail::realify_all(detail::orthogonal_generators(3));
      break;
    case EmbedCase::so5_so4:
      p.h = build_algebra(AlgebraType::so, 5);
      for (const auto& z : detail::orthogonal_generators(4)) {
        MatrixXd m = MatrixXd::Zero(5, 5);
        m.topLeftCorner(4, 4) = z.real();
        k_gens.push_back(m);
      }
      break;
    case EmbedCase::sp2_sp1sp1: {
      p.h = build_algebra(AlgebraType::sp, 2);
      // Diagonal quaternionic matrices: A and B both diagonal.
      for (int j = 0; j < 2; ++j) {
        MatrixXcd A = MatrixXcd::Zero(2, 2), B = MatrixXcd::Zero(2, 2), Z = MatrixXcd::Zero(2, 2);
        A(j, j) = I;
        B(j, j) = 1;
        auto block = [](const MatrixXcd& a, const MatrixXcd& b) {
          MatrixXcd m(4, 4);
          m << a, b, -b.conjugate(), a.conjugate();
          return m;
        };
        k_gens.push_back(detail::realify(block(A, Z)));
        k_gens.push_back(detail::realify(block(Z, B)));
        k_gens.push_back(detail::realify(block(Z, I * B)));
      }
      break;
    }
    case EmbedCase::su3_t2:
      p.h = build_algebra(AlgebraType::su, 3);
      for (int j = 0; j < 2; ++j)
        k_gens.push_back(detail::realify(I * (detail::unit(3, j, j) - detail::unit(3, j + 1, j + 1))));
      break;
    case EmbedCase::su4_sp2:
      p.h = build_algebra(AlgebraType::su, 4);
      k_gens = detail::realify_all(detail::symplectic_generators(2));
      break;
  }
  p.k_basis = detail::killing_orthonormal(p.h, detail::coords_of(p.h, k_gens));

  // q: -Kil_h-orthogonal complement of k.
  std::vector<VectorXd> all;
  for (int i = 0; i < p.k_basis.cols(); ++i) all.push_back(p.k_basis.col(i));
  for (int i = 0; i < p.h.dim; ++i) all.push_back(VectorXd::Unit(p.h.dim, i));
  MatrixXd full = detail::killing_orthonormal(p.h, all);
  p.q_basis = full.rightCols(full.cols() - p.k_basis.cols());

  // Killing ratios: Kil_k v = a Kil_h v on k, i.e. eigenvalues of -Kil_k in
  // the -Kil_h-orthonormal basis; equal eigenvalues are grouped.
  const auto adk = k_adjoint(p);
  const int d = p.d();
  MatrixXd kil_k(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) kil_k(i, j) = (adk[i] * adk[j]).trace();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(-kil_k);
  // Rotate k_basis onto the eigenvectors so each ideal is a column range.
  p.k_basis = p.k_basis * es.eigenvectors();
  for (int i = 0; i < d; ++i) {
    const double a = std::abs(es.eigenvalues()[i]) < 1e-12 ? 0.0 : es.eigenvalues()[i];
    if (p.ideals.empty() || std::abs(p.ideals.back().a - a) > 1e-9) p.ideals.push_back({a, {}});
    p.ideals.back().columns.push_back(i);
  }
  return p;
}

// ad(Z_i)|q in the q basis.
inline std::vector<MatrixXd> isotropy_action(const EmbeddedPair& p) {
  const int n = p.n(), d = p.d();
  std::vector<MatrixXd> out(d, MatrixXd::Zero(n, n));
  for (int i = 0; i < d; ++i)
    for (int b = 0; b < n; ++b) {
      VectorXd br = p.h.bracket(p.k_basis.col(i), p.q_basis.col(b));
      for (int a = 0; a < n; ++a) out[i](a, b) = -p.h.killing_form(br, p.q_basis.col(a));
    }
  return out;
}

inline MatrixXd casimir_isotropy(const EmbeddedPair& p) {
  MatrixXd cas = MatrixXd::Zero(p.n(), p.n());
  for (const auto& m : isotropy_action(p)) cas -= m * m;
  return cas;
}

// Largest |[k, q]| component outside q, and |[k, k]| component outside k.
inline double reductive_defect(const EmbeddedPair& p) {
  double worst = 0;
  auto outside = [&](const VectorXd& v, const MatrixXd& B) {
    VectorXd r = v;
    for (int i = 0; i < B.cols(); ++i) r += p.h.killing_form(v, B.col(i)) * B.col(i);
    return r.cwiseAbs().maxCoeff();
  };
  for (int i = 0; i < p.d(); ++i) {
    for (int b = 0; b < p.n(); ++b) worst = std::max(worst, outside(p.h.bracket(p.k_basis.col(i), p.q_basis.col(b)), p.q_basis));
    for (int j = 0; j < p.d(); ++j) worst = std::max(worst, outside(p.h.bracket(p.k_basis.col(i), p.k_basis.col(j)), p.k_basis));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// g = h + h, Delta k, p = p1 + p2 + p3

struct DoubledSpace {
  EmbeddedPair pair;
  int n = 0, d = 0;
  MatrixXd E;      // 2 dim_h x (2n + d): Q-orthonormal basis of p, columns p1 | p2 | p3
  MatrixXd delta;  // 2 dim_h x d: Q-orthonormal basis of Delta k
  std::vector<std::vector<int>> p3_blocks;  // p-indices of each p3^l, ideals order
  // C[a](c, b) = Q([E_a, E_b], E_c): the p-component of brackets in the E basis.
  std::vector<MatrixXd> C;

  int dim_p() const { return static_cast<int>(E.cols()); }

  VectorXd bracket(const VectorXd& u, const VectorXd& v) const {
    const int m = pair.h.dim;
    VectorXd out(2 * m);
    out.head(m) = pair.h.bracket(u.head(m), v.head(m));
    out.tail(m) = pair.h.bracket(u.tail(m), v.tail(m));
    return out;
  }

  double Q(const VectorXd& u, const VectorXd& v) const {
    const int m = pair.h.dim;
    return -pair.h.killing_form(u.head(m), v.head(m)) - pair.h.killing_form(u.tail(m), v.tail(m));
  }

  // Kil_g by ad-traces on g = h + h.
  double killing_g(const VectorXd& u, const VectorXd& v) const {
    const int m = pair.h.dim;
    return pair.h.killing_form(u.head(m), v.head(m)) + pair.h.killing_form(u.tail(m), v.tail(m));
  }
};

inline DoubledSpace build_doubled(EmbeddedPair pair) {
  DoubledSpace ds;
  const int m = pair.h.dim, n = pair.n(), d = pair.d();
  ds.n = n;
  ds.d = d;
  ds.E = MatrixXd::Zero(2 * m, 2 * n + d);
  ds.delta = MatrixXd::Zero(2 * m, d);
  for (int a = 0; a < n; ++a) {
    ds.E.col(a).head(m) = pair.q_basis.col(a);
    ds.E.col(n + a).tail(m) = pair.q_basis.col(a);
  }
  const double r = 1 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    ds.E.col(2 * n + i) << r * pair.k_basis.col(i), -r * pair.k_basis.col(i);
    ds.delta.col(i) << r * pair.k_basis.col(i), r * pair.k_basis.col(i);
  }
  for (const auto& ideal : pair.ideals) {
    std::vector<int> idx;
    for (int c : ideal.columns) idx.push_back(2 * n + c);
    ds.p3_blocks.push_back(idx);
  }
  ds.pair = std::move(pair);
  const int P = ds.dim_p();
  ds.C.assign(P, MatrixXd::Zero(P, P));
  for (int a = 0; a < P; ++a)
    for (int b = 0; b < P; ++b) {
      VectorXd br = ds.bracket(ds.E.col(a), ds.E.col(b));
      for (int c = 0; c < P; ++c) ds.C[a](c, b) = ds.Q(br, ds.E.col(c));
    }
  return ds;
}

// [ijk] = sum over Q-orthonormal bases of Q([e_a, e_b], e_c)^2 for blocks
// p1, p2, then each p3^l.
inline std::vector<std::vector<int>> block_indices(const DoubledSpace& ds) {
  std::vector<std::vector<int>> blocks(2);
  for (int a = 0; a < ds.n; ++a) {
    blocks[0].push_back(a);
    blocks[1].push_back(ds.n + a);
  }
  for (const auto& b : ds.p3_blocks) blocks.push_back(b);
  return blocks;
}

// Tensor over the given blocks, flattened as t[(i*N + j)*N + k].
inline std::vector<double> structural_constants_bruteforce(const DoubledSpace& ds,
                                                           const std::vector<std::vector<int>>& blocks) {
  const std::size_t N = blocks.size();
  std::vector<double> t(N * N * N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t k = 0; k < N; ++k) {
        double s = 0;
        for (int a : blocks[i])
          for (int b : blocks[j])
            for (int c : blocks[k]) s += ds.C[a](c, b) * ds.C[a](c, b);
        t[(i * N + j) * N + k] = s;
      }
  return t;
}

// Blocks p1, p2, p3 (all of p3 together).
inline std::vector<std::vector<int>> three_blocks(const DoubledSpace& ds) {
  auto b = block_indices(ds);
  std::vector<int> p3;
  for (std::size_t l = 2; l < b.size(); ++l) p3.insert(p3.end(), b[l].begin(), b[l].end());
  return {b[0], b[1], p3};
}

// Gram matrix of g = (x1, x2, x3, x4) in the E basis; x4 couples (X,0) with (0,X).
inline MatrixXd gram_matrix(const DoubledSpace& ds, double x1, double x2, double x3, double x4) {
  const int P = ds.dim_p(), n = ds.n;
  MatrixXd G = MatrixXd::Zero(P, P);
  for (int a = 0; a < n; ++a) {
    G(a, a) = x1;
    G(n + a, n + a) = x2;
    G(a, n + a) = G(n + a, a) = x4;
  }
  for (int i = 0; i < ds.d; ++i) G(2 * n + i, 2 * n + i) = x3;
  return G;
}

struct IllConditioned : std::domain_error {
  using std::domain_error::domain_error;
};

// Ric(E_a, E_b) for the metric with Gram matrix G:
//   Ric(X,Y) = -1/2 sum g([X,X_i]_p, X_j) g([Y,X_i]_p, X_j)
//              + 1/4 sum g([X_i,X_j]_p, X) g([X_i,X_j]_p, Y) - 1/2 Kil_g(X, Y)
// over a g-orthonormal basis X_i obtained by Cholesky.
inline MatrixXd ricci_bruteforce(const DoubledSpace& ds, const MatrixXd& G) {
  const int P = ds.dim_p();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0)) throw std::domain_error("metric is not positive definite");
  if (hi / lo > 1e8) throw IllConditioned("metric condition number exceeds 1e8");
  Eigen::LLT<MatrixXd> llt(G);
  // X = L^{-T}: columns are g-orthonormal in E coordinates.
  MatrixXd X = llt.matrixL().transpose().solve(MatrixXd::Identity(P, P));

  auto br = [&](const VectorXd& u, const VectorXd& v) {
    VectorXd out = VectorXd::Zero(P);
    for (int a = 0; a < P; ++a)
      if (u[a] != 0) out += u[a] * (ds.C[a] * v);
    return out;
  };

  // W[a](i, j) = g([E_a, X_i]_p, X_j)
  std::vector<MatrixXd> W(P, MatrixXd(P, P));
  for (int a = 0; a < P; ++a) {
    MatrixXd V = ds.C[a] * X;  // columns [E_a, X_i]_p
    W[a] = V.transpose() * G * X;
  }
  // U(:, a) collects g([X_i, X_j]_p, E_a) over (i, j).
  MatrixXd U(P * P, P);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j) U.row(i * P + j) = (G * br(X.col(i), X.col(j))).transpose();

  MatrixXd ric(P, P);
  for (int a = 0; a < P; ++a)
    for (int b = a; b < P; ++b) {
      const double t1 = -0.5 * (W[a].array() * W[b].array()).sum();
      const double t2 = 0.25 * U.col(a).dot(U.col(b));
      const double t3 = -0.5 * ds.killing_g(ds.E.col(a), ds.E.col(b));
      ric(a, b) = ric(b, a) = t1 + t2 + t3;
    }
  return ric;
}

}  // namespace ehhk::oracle
