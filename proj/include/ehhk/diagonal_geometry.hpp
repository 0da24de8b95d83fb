#pragma once

// Ricci and scalar curvature of diagonal metrics g = x1 Q|p1 + x2 Q|p2 + x3 Q|p3
// on H x H / Delta K, Q = -Kil of h + h. Every r-value is an eigenvalue of the
// Ricci operator, so g is Einstein iff all of them coincide.

#include "ehhk/catalog.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ehhk {

template <class T>
T from_rational(const Rational& q) {
  if constexpr (std::is_same_v<T, Rational>) return q;
  else return q.template convert_to<T>();
}

template <class T>
struct DiagonalMetric {
  T x1, x2, x3;
};

template <class T>
void require_positive(const DiagonalMetric<T>& g) {
  if (!(g.x1 > 0 && g.x2 > 0 && g.x3 > 0)) throw std::domain_error("diagonal metric must be positive");
}

template <class T>
struct RicciEigenvalues {
  T r1, r2;
  std::vector<T> r3;  // one per Killing block, catalog order
};

template <class T>
RicciEigenvalues<T> ricci_diagonal(const SpaceSpec& s, const DiagonalMetric<T>& g) {
  require_positive(g);
  const T kappa = from_rational<T>(s.kappa);
  const T one(1), two(2), four(4), eight(8);
  auto r_outer = [&](const T& x) { return (one / (two * x)) * (one - g.x3 / (two * x)) * kappa + one / (four * x); };
  const T w = (g.x3 / eight) * (one / (g.x1 * g.x1) + one / (g.x2 * g.x2));
  RicciEigenvalues<T> r{r_outer(g.x1), r_outer(g.x2), {}};
  for (const auto& b : s.blocks) {
    const T a = from_rational<T>(b.a);
    r.r3.push_back(a * (one / (two * g.x3) - w) + w);
  }
  return r;
}

// All eigenvalues with their block dimensions: p1, p2, then each p3 block.
template <class T>
std::vector<std::pair<T, long>> weighted_eigenvalues(const SpaceSpec& s, const RicciEigenvalues<T>& r) {
  std::vector<std::pair<T, long>> out{{r.r1, s.n}, {r.r2, s.n}};
  for (std::size_t l = 0; l < r.r3.size(); ++l) out.emplace_back(r.r3[l], s.blocks[l].dim);
  return out;
}

template <class T>
T scalar_diagonal(const SpaceSpec& s, const DiagonalMetric<T>& g) {
  T sum(0);
  for (const auto& [v, m] : weighted_eigenvalues(s, ricci_diagonal(s, g))) sum += v * T(m);
  return sum;
}

// scal * vol^(2/dim) in -Kil units: a homothety invariant.
template <class T>
T scal_normalized(const SpaceSpec& s, const DiagonalMetric<T>& g) {
  using std::exp, std::log;
  const T logvol = (T(s.n) * log(g.x1) + T(s.n) * log(g.x2) + T(s.d) * log(g.x3)) / T(s.dim());
  return scalar_diagonal(s, g) * exp(logvol);
}

// max_k |r_k - rbar| / |rbar| with rbar = scal/dim.
template <class T>
double residual_of(const std::vector<std::pair<T, long>>& ev) {
  double scal = 0, dim = 0;
  for (const auto& [v, m] : ev) {
    scal += to_double(v) * m;
    dim += m;
  }
  const double mean = scal / dim;
  double worst = 0;
  for (const auto& [v, m] : ev) worst = std::max(worst, std::abs(to_double(v) - mean));
  return worst / std::abs(mean);
}

template <class T>
double einstein_residual(const SpaceSpec& s, const DiagonalMetric<T>& g) {
  return residual_of(weighted_eigenvalues(s, ricci_diagonal(s, g)));
}

// ---------------------------------------------------------------------------
// Structural constants [ijk] with respect to Q-orthonormal bases of the blocks.

template <class T>
struct StructuralConstants {
  std::vector<long> dims;    // n_k
  std::vector<T> b;          // -Kil_g|p_k = b_k Q|p_k
  std::vector<T> c;          // c[(i*N + j)*N + k]

  std::size_t size() const { return dims.size(); }
  T& at(std::size_t i, std::size_t j, std::size_t k) { return c[(i * size() + j) * size() + k]; }
  const T& at(std::size_t i, std::size_t j, std::size_t k) const { return c[(i * size() + j) * size() + k]; }

  static StructuralConstants zero(std::vector<long> dims) {
    StructuralConstants sc;
    sc.b.assign(dims.size(), T(1));
    sc.c.assign(dims.size() * dims.size() * dims.size(), T(0));
    sc.dims = std::move(dims);
    return sc;
  }

  // Sets all six permutations of (i, j, k).
  void set(std::size_t i, std::size_t j, std::size_t k, const T& v) {
    for (auto [p, q, r] : std::array<std::array<std::size_t, 3>, 6>{
             {{i, j, k}, {i, k, j}, {j, i, k}, {j, k, i}, {k, i, j}, {k, j, i}}})
      at(p, q, r) = v;
  }
};

template <class T>
StructuralConstants<T> structural_constants_closed(const SpaceSpec& s) {
  if (!s.flags.uniform_a) throw UnsupportedSpace(s.id + ": closed-form [ijk] needs a uniform Killing ratio");
  auto sc = StructuralConstants<T>::zero({s.n, s.n, s.d});
  const T kappa = from_rational<T>(s.kappa);
  const T nn(s.n);
  sc.set(0, 0, 0, (T(1) - T(2) * kappa) * nn);
  sc.set(1, 1, 1, (T(1) - T(2) * kappa) * nn);
  sc.set(0, 0, 2, kappa * nn / T(2));
  sc.set(1, 1, 2, kappa * nn / T(2));
  return sc;
}

// rho_k = b_k/(2x_k) - 1/(4n_k) sum_{i,j} [ijk] (x_i/(x_j x_k) + x_j/(x_i x_k) - x_k/(x_i x_j))
template <class T>
std::vector<T> ricci_from_structural(const StructuralConstants<T>& sc, const std::vector<T>& x) {
  const std::size_t N = sc.size();
  if (x.size() != N || sc.b.size() != N || sc.c.size() != N * N * N)
    throw std::invalid_argument("structural constants and metric have different block counts");
  std::vector<T> rho(N);
  for (std::size_t k = 0; k < N; ++k) {
    T acc(0);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        const T& c = sc.at(i, j, k);
        if (c == T(0)) continue;
        acc += c * (x[i] / (x[j] * x[k]) + x[j] / (x[i] * x[k]) - x[k] / (x[i] * x[j]));
      }
    rho[k] = sc.b[k] / (T(2) * x[k]) - acc / (T(4) * T(sc.dims[k]));
  }
  return rho;
}

template <class T>
RicciEigenvalues<T> ricci_from_structural(const SpaceSpec& s, const DiagonalMetric<T>& g,
                                          const StructuralConstants<T>& sc) {
  if (sc.size() != 3 || sc.dims[0] != s.n || sc.dims[1] != s.n || sc.dims[2] != s.d)
    throw std::invalid_argument(s.id + ": structural constants do not match blocks (n, n, d)");
  auto rho = ricci_from_structural(sc, std::vector<T>{g.x1, g.x2, g.x3});
  return {rho[0], rho[1], std::vector<T>(s.blocks.size(), rho[2])};
}

// ---------------------------------------------------------------------------
// Normal metrics z1(-Kil on first h) + z2(-Kil on second h)

template <class T>
struct NormalMetric {
  T z1, z2;
};

template <class T>
DiagonalMetric<T> normal_to_diagonal(const NormalMetric<T>& nm, const DiagonalMetric<T>& scale = {T(1), T(1), T(1)}) {
  if (!(nm.z1 > 0 && nm.z2 > 0)) throw std::domain_error("normal metric needs z1, z2 > 0");
  return {nm.z1 * scale.x1, nm.z2 * scale.x2, T(2) * nm.z1 * nm.z2 * scale.x3 / (nm.z1 + nm.z2)};
}

template <class T>
T scalar_normal(const SpaceSpec& s, const NormalMetric<T>& nm) {
  if (!(nm.z1 > 0 && nm.z2 > 0)) throw std::domain_error("normal metric needs z1, z2 > 0");
  const T dn(s.d + s.n);
  const T mid = T(2) * (T(2 * s.d + s.n) - from_rational<T>(s.S()));
  return (dn * nm.z1 * nm.z1 + mid * nm.z1 * nm.z2 + dn * nm.z2 * nm.z2) /
         (T(4) * nm.z1 * nm.z2 * (nm.z1 + nm.z2));
}

struct NormalProfile {
  double f;
  double fpp1;
};

// Normalized scalar curvature along z -> (z, 1/z), and its exact second
// derivative at the standard metric.
inline NormalProfile normal_profile(const SpaceSpec& s, double z) {
  if (!(z > 0)) throw std::domain_error("normal_profile needs z > 0");
  const double n = s.n, d = s.d, S = to_double(s.S());
  const double z2 = z * z;
  const double base = ((d + n) * z2 * z2 + 2 * (2 * d + n - S) * z2 + (d + n)) / (4 * z * (z2 + 1));
  const double f = base * std::pow(2 * z / (z2 + 1), d / (2 * n + d));
  return {f, -(d + n) * (d - 2 * n - S) / (4 * n + 2 * d)};
}

// Unit-volume completion x3 = (x1 x2)^(-n/d).
inline DiagonalMetric<double> unit_volume(const SpaceSpec& s, double x1, double x2) {
  return {x1, x2, std::pow(x1 * x2, -static_cast<double>(s.n) / s.d)};
}

inline DiagonalMetric<double> normalize_volume(const SpaceSpec& s, const DiagonalMetric<double>& g) {
  const double c = std::exp(-(s.n * std::log(g.x1) + s.n * std::log(g.x2) + s.d * std::log(g.x3)) / s.dim());
  return {g.x1 * c, g.x2 * c, g.x3 * c};
}

struct SurfacePoint {
  double x1, x2, scal_n;
};

// Log-spaced grid on [lo, hi]^2 of scal_N over unit-volume diagonal metrics.
inline std::vector<SurfacePoint> scal_surface(const SpaceSpec& s, double lo, double hi, int steps) {
  if (steps < 2 || !(lo > 0) || !(hi > lo)) throw std::invalid_argument("surface grid needs steps >= 2 and 0 < lo < hi");
  std::vector<SurfacePoint> out;
  const double l0 = std::log(lo), dl = (std::log(hi) - l0) / (steps - 1);
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) {
      double x1 = std::exp(l0 + i * dl), x2 = std::exp(l0 + j * dl);
      out.push_back({x1, x2, scal_normalized(s, unit_volume(s, x1, x2))});
    }
  return out;
}

}  // namespace ehhk
