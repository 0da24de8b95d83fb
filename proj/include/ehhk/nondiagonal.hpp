#pragma once

// Metrics g = (x1, x2, x3, x4) on H x H / Delta K for symmetric H/K: on each
// pair (X, 0), (0, X) with X in q the Gram matrix is [[x1, x4], [x4, x2]],
// and g = x3 Q on p3. The Ricci tensor has the same shape:
// [[x1 r1, x4 r12], [x4 r12, x2 r2]] and x3 r3_l on each p3 block.

#include "ehhk/einstein_solver.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehhk {

template <class T>
struct FullMetric {
  T x1, x2, x3, x4;
  T det() const { return x1 * x2 - x4 * x4; }
};

template <class T>
void require_positive(const FullMetric<T>& g) {
  if (!(g.x1 > 0 && g.x2 > 0 && g.x3 > 0 && g.det() > 0))
    throw std::domain_error("metric needs x1, x2, x3 > 0 and x1 x2 > x4^2");
}

template <class T>
struct RicciComponents {
  T r1, r2;
  T r12;    // cancelled ratio (4 x1 x2 - 1)/(8 det) at x3 = 1; even in x4
  T ric12;  // x4 * r12: the off-diagonal tensor coefficient; odd in x4
  std::vector<T> r3;
  T R;
};

inline void require_symmetric(const SpaceSpec& s) {
  if (!s.flags.symmetric) throw UnsupportedSpace(s.id + ": 4-parameter Ricci formulas need a symmetric pair");
}

template <class T>
RicciComponents<T> ricci_full(const SpaceSpec& s, const FullMetric<T>& g_in) {
  require_symmetric(s);
  require_positive(g_in);
  // Evaluate at g/x3, then rescale eigenvalues by 1/x3.
  const T x3 = g_in.x3;
  const T x1 = g_in.x1 / x3, x2 = g_in.x2 / x3, x4 = g_in.x4 / x3;
  const T one(1), two(2), four(4), eight(8);
  const T D = x1 * x2 - x4 * x4;
  const T y = x4 * x4;
  RicciComponents<T> out;
  out.r1 = (-x2 / (eight * x1 * D) + y / (two * D) + one / (two * x1)) / x3;
  out.r2 = (-x1 / (eight * x2 * D) + y / (two * D) + one / (two * x2)) / x3;
  out.r12 = ((four * x1 * x2 - one) / (eight * D)) / x3;
  out.ric12 = g_in.x4 * out.r12;
  const T q = x1 * x1 - y;
  out.R = -two * y / D + one / (four * x1 * x1) + q * q / (four * x1 * x1 * D * D) + y / (two * x1 * x1 * D);
  for (const auto& b : s.blocks) {
    const T a = from_rational<T>(b.a);
    out.r3.push_back((a * (one - out.R) + out.R) / (two * x3));
  }
  return out;
}

// Ricci operator g^{-1} Ric on one (X,0),(0,X) pair, row-major.
template <class T>
std::array<T, 4> operator_block(const FullMetric<T>& g, const RicciComponents<T>& r) {
  const T D = g.det();
  const T a = g.x1 * r.r1, b = r.ric12, d = g.x2 * r.r2;  // tensor [[a, b], [b, d]]
  return {(g.x2 * a - g.x4 * b) / D, (g.x2 * b - g.x4 * d) / D, (-g.x4 * a + g.x1 * b) / D,
          (-g.x4 * b + g.x1 * d) / D};
}

template <class T>
double full_scalar(const SpaceSpec& s, const FullMetric<T>& g, const RicciComponents<T>& r) {
  auto m = operator_block(g, r);
  double scal = s.n * to_double(m[0] + m[3]);
  for (std::size_t l = 0; l < r.r3.size(); ++l) scal += s.blocks[l].dim * to_double(r.r3[l]);
  return scal;
}

// max deviation of g^{-1} Ric from (scal/dim) I, relative to scal/dim.
template <class T>
double einstein_residual(const SpaceSpec& s, const FullMetric<T>& g) {
  const auto r = ricci_full(s, g);
  const double mean = full_scalar(s, g, r) / s.dim();
  const auto m = operator_block(g, r);
  double worst = std::max({std::abs(to_double(m[0]) - mean), std::abs(to_double(m[3]) - mean),
                           std::abs(to_double(m[1])), std::abs(to_double(m[2]))});
  for (const auto& v : r.r3) worst = std::max(worst, std::abs(to_double(v) - mean));
  return worst / std::abs(mean);
}

// scal * vol^(2/dim), vol^2 = det^n x3^d.
inline double scal_normalized(const SpaceSpec& s, const FullMetric<double>& g) {
  const auto r = ricci_full(s, g);
  const double logvol = (s.n * std::log(g.det()) + s.d * std::log(g.x3)) / s.dim();
  return full_scalar(s, g, r) * std::exp(logvol);
}

struct UndefinedResult : std::domain_error {
  using std::domain_error::domain_error;
};

// (2n+d)(4 x1 x2 - 1)/(8 det^alpha) for an Einstein metric with x3 = 1 and
// x4 != 0, where rho = r12.
inline double scal_n_full(const SpaceSpec& s, const EinsteinSolution& sol, double tol = 1e-8) {
  const FullMetric<double> g{sol.x1, sol.x2, sol.x3, sol.x4};
  if (sol.x3 != 1.0) throw UndefinedResult(s.id + ": scal_n_full expects x3 = 1");
  if (sol.x4 == 0.0) throw UndefinedResult(s.id + ": scal_n_full needs x4 != 0");
  if (einstein_residual(s, g) > tol) throw UndefinedResult(s.id + ": metric is not Einstein");
  return (2 * s.n + s.d) * (4 * sol.x1 * sol.x2 - 1) / (8 * std::pow(g.det(), alpha(s)));
}

inline EinsteinSolution full_solution(const SpaceSpec& s, const FullMetric<double>& g, SolutionLabel label,
                                      std::optional<SolutionLabel> partner) {
  EinsteinSolution sol;
  sol.label = label;
  sol.x1 = g.x1;
  sol.x2 = g.x2;
  sol.x3 = g.x3;
  sol.x4 = g.x4;
  sol.isometric_to = partner;
  const auto r = ricci_full(s, g);
  sol.rho = full_scalar(s, g, r) / s.dim();
  sol.residual = einstein_residual(s, g);
  sol.scal_n = scal_normalized(s, g);
  return sol;
}

// g5 and g6 exist on every symmetric pair, uniform Killing ratio or not.
inline std::vector<EinsteinSolution> g5_g6(const SpaceSpec& s) {
  require_symmetric(s);
  return {full_solution(s, {0.5, 1.5, 1.0, 0.5}, SolutionLabel::g5, SolutionLabel::g6),
          full_solution(s, {1.5, 0.5, 1.0, 0.5}, SolutionLabel::g6, SolutionLabel::g5)};
}

// Up to scaling, all H x H-invariant Einstein metrics of the 4-parameter family.
// Provisional rows are admitted only when asked: their mean ratio is a stand-in.
inline std::vector<EinsteinSolution> classify_symmetric(const SpaceSpec& s, bool allow_provisional = false) {
  require_symmetric(s);
  if (!s.flags.uniform_a && !(allow_provisional && s.flags.provisional))
    throw UnsupportedSpace(s.id + ": classification needs a uniform Killing ratio");
  const Rational a = s.effective_a();
  if (a == 0) throw UnsupportedSpace(s.id + ": a = 0 is excluded");
  std::vector<EinsteinSolution> out;
  const Rational half(1, 2);
  if (a <= half) {
    SpaceSpec u = s;
    u.flags.uniform_a = true;
    for (auto& sol : solve_diagonal(u)) out.push_back(full_solution(s, {sol.x1, sol.x2, 1.0, 0.0}, sol.label, {}));
    if (a == half) out.front().double_root = true;
  } else {
    const double y = 0.5 * std::sqrt(to_double((2 * a - 1) / (2 - a)));
    out.push_back(full_solution(s, {1.0, 1.0, 1.0, y}, SolutionLabel::g3, SolutionLabel::g4));
    out.push_back(full_solution(s, {1.0, 1.0, 1.0, -y}, SolutionLabel::g4, SolutionLabel::g3));
  }
  for (auto& sol : g5_g6(s)) out.push_back(sol);
  return out;
}

inline const EinsteinSolution* find_label(const std::vector<EinsteinSolution>& sols, SolutionLabel l) {
  for (const auto& s : sols)
    if (s.label == l) return &s;
  return nullptr;
}

// Closed forms: scal_N(g5) = (2n+d) 2^(alpha-2) and, for a > 1/2,
// scal_N(g3) = (3(2n+d)/8) (4(2-a)/(3(3-2a)))^alpha.
inline double scal_n_g5(const SpaceSpec& s) { return (2 * s.n + s.d) * std::pow(2.0, alpha(s) - 2); }

inline double scal_n_g3(const SpaceSpec& s) {
  const double a = to_double(s.effective_a());
  return 3.0 * (2 * s.n + s.d) / 8 * std::pow(4 * (2 - a) / (3 * (3 - 2 * a)), alpha(s));
}

// ---------------------------------------------------------------------------
// Parametric closed forms for the symmetric families.

enum class SymmetricFamily { su_so, so_soxso, su_sp, so_so, sp_spxsp };

struct FamilyScal {
  double first = 0;   // g1 (a < 1/2) or g3 (a > 1/2)
  double second = 0;  // g2 (a < 1/2); unused otherwise
  double g5 = 0;
};

inline const char* family_id(SymmetricFamily f) {
  switch (f) {
    case SymmetricFamily::su_so: return "SU(m)/SO(m)";
    case SymmetricFamily::so_soxso: return "SO(2m)/SO(m)xSO(m)";
    case SymmetricFamily::su_sp: return "SU(2m)/Sp(m)";
    case SymmetricFamily::so_so: return "SO(m)/SO(m-1)";
    case SymmetricFamily::sp_spxsp: return "Sp(2m)/Sp(m)xSp(m)";
  }
  return "?";
}

inline long family_min_m(SymmetricFamily f) {
  switch (f) {
    case SymmetricFamily::su_so: return 3;
    case SymmetricFamily::so_soxso: return 4;
    case SymmetricFamily::su_sp: return 2;
    case SymmetricFamily::so_so: return 7;
    case SymmetricFamily::sp_spxsp: return 1;
  }
  return 0;
}

inline FamilyScal family_scal_formulas(SymmetricFamily f, long m_int) {
  if (m_int < family_min_m(f))
    throw RangeError(std::string(family_id(f)) + ": m must be >= " + std::to_string(family_min_m(f)));
  const double m = static_cast<double>(m_int);
  FamilyScal out;
  switch (f) {
    case SymmetricFamily::su_so: {
      const double r = std::sqrt(m + 2), e = 4 * (m + 1) / (3 * m + 4), c = 3 * m * m + m - 4;
      out.first = c * (3 * m + 2 + 4 * r) * std::pow((m - 2) / (m + r), e) / (16 * m - 32);
      out.second = c * (3 * m + 2 - 4 * r) * std::pow((m - 2) / (m - r), e) / (16 * m - 32);
      out.g5 = 0.5 * c * std::pow(4.0, -(2 * m + 3) / (3 * m + 4));
      break;
    }
    case SymmetricFamily::so_soxso: {
      const double r = std::sqrt(2 * m), e = (-4 * m + 2) / (3 * m - 1), c = m * (3 * m - 1);
      out.first = c * (3 * m - 2 + 2 * r) * std::pow((2 * m - 2 + r) / (2 * (m - 2)), e) / (8 * (m - 2));
      out.second = c * (3 * m - 2 - 2 * r) * std::pow((2 * m - 2 - r) / (2 * (m - 2)), e) / (8 * (m - 2));
      out.g5 = c * std::pow(2.0, -(4 * m - 1) / (3 * m - 1));
      break;
    }
    case SymmetricFamily::su_sp: {
      const double c = 6 * m * m - m - 2;
      out.first = c / 8 * std::pow(3.0, (m - 1) / (3 * m - 2)) *
                  std::pow(2 * (3 * m - 1) / (2 * m - 1), (2 * m - 1) / (3 * m - 2));
      out.g5 = c * std::pow(2.0, -(4 * m - 3) / (3 * m - 2));
      break;
    }
    case SymmetricFamily::so_so: {
      const double c = m * m + m - 2;
      out.first = c / 16 * std::pow(9.0, 1 / (m + 2)) * std::pow(4 * (m - 1) / m, m / (m + 2));
      out.g5 = c * std::pow(4.0, -(m + 3) / (m + 2));
      break;
    }
    case SymmetricFamily::sp_spxsp: {
      const double c = 6 * m * m + m;
      out.first = c * std::pow(9.0 / 16, m / (6 * m + 1)) * std::pow((3 * m + 1) / (4 * m + 1), (4 * m + 1) / (6 * m + 1));
      out.g5 = c * std::pow(4.0, -m / (6 * m + 1));
      break;
    }
  }
  return out;
}

struct NonhomothetyReport {
  bool ok = true;
  std::string failure;
};

// scal_N(g1) < scal_N(g2) < scal_N(g5) for a < 1/2; scal_N(g3) < scal_N(g5) for a > 1/2.
inline NonhomothetyReport nonhomothety_check(const SpaceSpec& s, bool allow_provisional = false) {
  NonhomothetyReport rep;
  const auto sols = classify_symmetric(s, allow_provisional);
  const auto* g5 = find_label(sols, SolutionLabel::g5);
  auto value = [&](SolutionLabel l) { return find_label(sols, l)->scal_n; };
  if (s.effective_a() < Rational(1, 2)) {
    const double s1 = value(SolutionLabel::g1_plus), s2 = value(SolutionLabel::g2_minus);
    if (!(s1 < s2 && s2 < g5->scal_n)) {
      rep.ok = false;
      rep.failure = s.id + ": expected scal(g1) < scal(g2) < scal(g5), got " + std::to_string(s1) + ", " +
                    std::to_string(s2) + ", " + std::to_string(g5->scal_n);
    }
  } else if (s.effective_a() > Rational(1, 2)) {
    const double s3 = value(SolutionLabel::g3);
    if (!(s3 < g5->scal_n)) {
      rep.ok = false;
      rep.failure = s.id + ": expected scal(g3) < scal(g5), got " + std::to_string(s3) + ", " + std::to_string(g5->scal_n);
    }
  } else {
    throw UnsupportedSpace(s.id + ": a = 1/2");
  }
  return rep;
}

}  // namespace ehhk
