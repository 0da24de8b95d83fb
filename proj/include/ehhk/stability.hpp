#pragma once

// The matrix L of the Lichnerowicz Laplacian on diagonal variations, in the
// basis {I_k / sqrt(n_k)}, and the stability type of the diagonal Einstein
// metrics (x, x, 1).

#include "ehhk/einstein_solver.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace ehhk {

inline Eigen::MatrixXd l_matrix_general(const StructuralConstants<double>& sc, const std::vector<double>& x) {
  const std::size_t N = sc.size();
  if (x.size() != N || sc.c.size() != N * N * N)
    throw std::invalid_argument("structural constants and metric have different block counts");
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
  for (std::size_t k = 0; k < N; ++k) {
    double acc = 0;
    for (std::size_t i = 0; i < N; ++i) {
      if (i == k) continue;
      for (std::size_t j = 0; j < N; ++j)
        if (j != k) acc += sc.at(i, j, k) * x[k] / (x[i] * x[j]);
      acc += sc.at(i, k, k) * x[i] / (x[k] * x[k]);
    }
    L(k, k) = acc / sc.dims[k];
    for (std::size_t m = k + 1; m < N; ++m) {
      double off = 0;
      for (std::size_t i = 0; i < N; ++i)
        off += sc.at(i, k, m) * (x[i] * x[i] - x[k] * x[k] - x[m] * x[m]) / (x[i] * x[k] * x[m]);
      L(k, m) = L(m, k) = off / std::sqrt(static_cast<double>(sc.dims[k]) * sc.dims[m]);
    }
  }
  return L;
}

inline Eigen::Matrix3d l_matrix(const SpaceSpec& s, const DiagonalMetric<double>& g) {
  return l_matrix_general(structural_constants_closed<double>(s), {g.x1, g.x2, g.x3});
}

enum class StabilityClass { saddle_min_along_diag, local_min_coindex_ge_2, abelian_single, degenerate_double_root };

inline const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::saddle_min_along_diag: return "saddle_min_along_diag";
    case StabilityClass::local_min_coindex_ge_2: return "local_min_coindex_ge_2";
    case StabilityClass::abelian_single: return "abelian_single";
    case StabilityClass::degenerate_double_root: return "degenerate_double_root";
  }
  return "?";
}

struct StabilityReport {
  std::string space_id;
  SolutionLabel label = SolutionLabel::g1_plus;
  Eigen::Matrix3d L;
  double lambda1 = 0, lambda2 = 0, two_rho = 0;
  StabilityClass classification = StabilityClass::saddle_min_along_diag;
  std::array<Eigen::Vector3d, 3> eigenvectors;  // kernel, lambda1, lambda2
};

inline std::array<Eigen::Vector3d, 3> l_eigenvectors(const SpaceSpec& s) {
  const double rn = std::sqrt(static_cast<double>(s.n)), rd = std::sqrt(static_cast<double>(s.d));
  return {Eigen::Vector3d(rn, rn, rd), Eigen::Vector3d(1, -1, 0), Eigen::Vector3d(-rd, -rd, 2 * rn)};
}

inline StabilityReport stability_report(const SpaceSpec& s, const EinsteinSolution& sol) {
  if (!sol.diagonal() || sol.x1 != sol.x2 || sol.x3 != 1.0)
    throw std::invalid_argument(s.id + ": stability needs a diagonal solution (x, x, 1)");
  if (einstein_residual(s, sol.diagonal_metric()) > 1e-8) throw std::invalid_argument(s.id + ": metric is not Einstein");
  const double x = sol.x1, k = to_double(s.kappa);
  StabilityReport rep;
  rep.space_id = s.id;
  rep.label = sol.label;
  rep.L = l_matrix(s, sol.diagonal_metric());
  rep.lambda1 = k / (2 * x * x);
  rep.lambda2 = static_cast<double>(s.dim()) / s.d * rep.lambda1;
  rep.two_rho = 2 * sol.rho;
  rep.eigenvectors = l_eigenvectors(s);
  if (s.flags.abelian_k) rep.classification = StabilityClass::abelian_single;
  else if (sol.double_root) rep.classification = StabilityClass::degenerate_double_root;
  else if (rep.lambda1 < rep.two_rho && rep.two_rho < rep.lambda2) rep.classification = StabilityClass::saddle_min_along_diag;
  else rep.classification = StabilityClass::local_min_coindex_ge_2;
  return rep;
}

// Exact versions of lambda1 < 2rho < lambda2 at x- and lambda1 < lambda2 < 2rho
// at x+. With c1 = 2k/(2k+1) and c2 = 2k(n+d)/(d(2k+1)):
//   lambda1 < 2rho  iff  x > c1,      2rho < lambda2  iff  x < c2,
// and the position of c relative to the roots is read off the sign of the
// quadratic 2a x^2 - (2k+1) x + (1-a+k) at c.
struct ExactStability {
  bool minus_ok = false;  // lambda1- < 2rho- < lambda2-
  bool plus_ok = false;   // lambda1+ < lambda2+ < 2rho+
};

inline ExactStability exact_stability(const SpaceSpec& s) {
  const Rational k = s.kappa;
  const Rational c1 = 2 * k / (2 * k + 1);
  const Rational c2 = 2 * k * (s.n + s.d) / (Rational(s.d) * (2 * k + 1));
  ExactStability out;
  if (s.flags.abelian_k) {
    const Rational x = (k + 1) / (2 * k + 1);
    out.minus_ok = out.plus_ok = c1 < x && x < c2;
    return out;
  }
  const auto q = diagonal_quadratic(s);
  const Rational v = q.vertex();
  const bool c1_below_minus = q(c1) > 0 && c1 < v;
  const bool c2_between = q(c2) < 0;
  out.minus_ok = c1_below_minus && c2_between;
  out.plus_ok = c2_between;  // lambda1 < lambda2 always
  return out;
}

// Hessian of scal_N on unit-volume diagonal metrics at g, in coordinates c with
// x_k -> x_k exp(c_k / sqrt(n_k)), projected on the traceless plane spanned by
// the lambda1 and lambda2 eigenvectors. Central differences in long double.
inline Eigen::Matrix2d normalized_hessian_fd(const SpaceSpec& s, const DiagonalMetric<double>& g, double h = 1e-5) {
  auto ev = l_eigenvectors(s);
  const Eigen::Vector3d u1 = ev[1].normalized(), u2 = ev[2].normalized();
  const std::array<long double, 3> w{1.0L / std::sqrt((long double)s.n), 1.0L / std::sqrt((long double)s.n),
                                     1.0L / std::sqrt((long double)s.d)};
  auto f = [&](double a, double b) {
    long double c[3];
    for (int i = 0; i < 3; ++i) c[i] = (long double)a * u1[i] + (long double)b * u2[i];
    DiagonalMetric<long double> m{g.x1 * std::exp(c[0] * w[0]), g.x2 * std::exp(c[1] * w[1]),
                                  g.x3 * std::exp(c[2] * w[2])};
    return scal_normalized(s, m);
  };
  const long double hh = h;
  const long double f0 = f(0, 0);
  Eigen::Matrix2d H;
  H(0, 0) = static_cast<double>((f(h, 0) - 2 * f0 + f(-h, 0)) / (hh * hh));
  H(1, 1) = static_cast<double>((f(0, h) - 2 * f0 + f(0, -h)) / (hh * hh));
  H(0, 1) = H(1, 0) = static_cast<double>((f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * hh * hh));
  return H;
}

// P (2 rho I - L) P^T on the same plane, for the unit-volume rescaling of g
// (rho and L scale like 1/x, scal_N does not).
inline Eigen::Matrix2d projected_second_variation(const SpaceSpec& s, const StabilityReport& rep,
                                                  const DiagonalMetric<double>& g) {
  Eigen::Matrix<double, 2, 3> P;
  P.row(0) = rep.eigenvectors[1].normalized().transpose();
  P.row(1) = rep.eigenvectors[2].normalized().transpose();
  const double vol_factor =
      std::exp((s.n * std::log(g.x1) + s.n * std::log(g.x2) + s.d * std::log(g.x3)) / s.dim());
  return vol_factor * P * (rep.two_rho * Eigen::Matrix3d::Identity() - rep.L) * P.transpose();
}

struct SaddleProbe {
  bool min_along_t = false;   // scal(t x, x/t, 1) minimal at t = 1 on the grid
  int x3_direction = 0;       // +1: scal increases both ways along the lambda2 eigenvector; -1: decreases
  bool consistent = false;    // matches the classification of the solution
};

// The x3 probe moves by log t along the unit lambda2 eigenvector in the
// coordinates x_k -> x_k exp(c_k / sqrt(n_k)), so both probes have comparable
// length even when n/d is large.
inline SaddleProbe saddle_curve_check(const SpaceSpec& s, const EinsteinSolution& sol,
                                      const std::vector<double>& t_grid = {0.98, 0.99, 1.0, 1.01, 1.02}) {
  const double x = sol.x1;
  const double center = scal_normalized(s, DiagonalMetric<double>{x, x, 1.0});
  SaddleProbe p;
  p.min_along_t = true;
  for (double t : t_grid)
    if (t != 1.0 && !(scal_normalized(s, DiagonalMetric<double>{t * x, x / t, 1.0}) > center)) p.min_along_t = false;
  const Eigen::Vector3d u = l_eigenvectors(s)[2].normalized();
  const double wn = 1 / std::sqrt(static_cast<double>(s.n)), wd = 1 / std::sqrt(static_cast<double>(s.d));
  int up = 0, down = 0;
  for (double t : t_grid) {
    if (t == 1.0) continue;
    const double e = std::log(t);
    const double v = scal_normalized(
        s, DiagonalMetric<double>{x * std::exp(e * u[0] * wn), x * std::exp(e * u[1] * wn), std::exp(e * u[2] * wd)});
    (v > center ? up : down)++;
  }
  p.x3_direction = down == 0 ? 1 : (up == 0 ? -1 : 0);
  const bool is_plus = sol.label == SolutionLabel::g1_plus && !sol.double_root;
  p.consistent = p.min_along_t && (is_plus ? p.x3_direction == 1 : p.x3_direction == -1);
  return p;
}

}  // namespace ehhk
