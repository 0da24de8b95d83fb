#pragma once

#include "ehhk/diagonal_geometry.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace ehhk {

enum class SolutionLabel { g1_plus, g2_minus, abelian, g3, g4, g5, g6 };

inline const char* to_string(SolutionLabel l) {
  switch (l) {
    case SolutionLabel::g1_plus: return "g1_plus";
    case SolutionLabel::g2_minus: return "g2_minus";
    case SolutionLabel::abelian: return "abelian";
    case SolutionLabel::g3: return "g3";
    case SolutionLabel::g4: return "g4";
    case SolutionLabel::g5: return "g5";
    case SolutionLabel::g6: return "g6";
  }
  return "?";
}

struct EinsteinSolution {
  SolutionLabel label = SolutionLabel::g1_plus;
  double x1 = 1, x2 = 1, x3 = 1, x4 = 0;
  double rho = 0;
  double scal_n = 0;
  double residual = 0;
  bool double_root = false;                     // discriminant exactly zero
  std::optional<SolutionLabel> isometric_to;    // g3<->g4, g5<->g6

  bool diagonal() const { return x4 == 0; }
  DiagonalMetric<double> diagonal_metric() const { return {x1, x2, x3}; }
};

inline double alpha(const SpaceSpec& s) { return static_cast<double>(s.n + s.d) / (2 * s.n + s.d); }

// Coefficients of 2a x^2 - (2k+1) x + (1-a+k), whose roots are x-, x+.
struct DiagonalQuadratic {
  Rational A, B, C;
  Rational operator()(const Rational& x) const { return (A * x + B) * x + C; }
  Rational vertex() const { return -B / (2 * A); }
};

inline DiagonalQuadratic diagonal_quadratic(const SpaceSpec& s) {
  const Rational a = s.a(), k = s.kappa;
  return {2 * a, -(2 * k + 1), 1 - a + k};
}

inline EinsteinSolution diagonal_solution(const SpaceSpec& s, double x, SolutionLabel label) {
  const double k = to_double(s.kappa);
  EinsteinSolution sol;
  sol.label = label;
  sol.x1 = sol.x2 = x;
  sol.x3 = 1;
  sol.rho = ((2 * k + 1) * x - k) / (4 * x * x);
  sol.scal_n = (2 * s.n + s.d) * ((2 * k + 1) * x - k) / (4 * std::pow(x, 2 * alpha(s)));
  sol.residual = einstein_residual(s, sol.diagonal_metric());
  return sol;
}

// Solutions (x, x, 1) of the diagonal Einstein equations, plus first.
inline std::vector<EinsteinSolution> solve_diagonal(const SpaceSpec& s) {
  const double k = to_double(s.kappa);
  if (s.flags.abelian_k) return {diagonal_solution(s, (k + 1) / (2 * k + 1), SolutionLabel::abelian)};
  const Rational a = s.a();
  const Existence e = existence_condition(s);
  if (!e.strict && !e.equality) return {};
  if (e.equality) {
    auto sol = diagonal_solution(s, to_double((2 * s.kappa + 1) / (4 * a)), SolutionLabel::g1_plus);
    sol.double_root = true;
    return {sol};
  }
  const double ad = to_double(a);
  const double xp = (2 * k + 1 + std::sqrt(to_double(e.discriminant))) / (4 * ad);
  const double xm = to_double(1 - a + s.kappa) / (2 * ad * xp);  // product of roots, no cancellation
  return {diagonal_solution(s, xp, SolutionLabel::g1_plus), diagonal_solution(s, xm, SolutionLabel::g2_minus)};
}

// Value of x3 for which (1, 1, x3) is homothetic to each solution, same order.
inline std::vector<double> x3_normal_form(const SpaceSpec& s) {
  if (s.flags.abelian_k) return {to_double((2 * s.kappa + 1) / (s.kappa + 1))};
  const Existence e = existence_condition(s);
  if (!e.strict && !e.equality) return {};
  const double k = to_double(s.kappa), c = to_double(1 - s.a() + s.kappa);
  const double r = std::sqrt(to_double(e.discriminant));
  if (e.equality) return {(2 * k + 1) / (2 * c)};
  // Plus solution takes the minus sign: (2k+1-r)/(2c) = 4a/(2k+1+r), no cancellation.
  return {4 * to_double(s.a()) / (2 * k + 1 + r), (2 * k + 1 + r) / (2 * c)};
}

struct OrderingReport {
  bool ok = true;
  std::string failure;   // first violated relation
  enum class Position { below_one, straddles_one, above_one } position = Position::straddles_one;
};

inline const char* to_string(OrderingReport::Position p) {
  switch (p) {
    case OrderingReport::Position::below_one: return "x- < x+ < 1";
    case OrderingReport::Position::straddles_one: return "x- < 1 < x+";
    case OrderingReport::Position::above_one: return "1 < x- < x+";
  }
  return "?";
}

// A point c lies strictly between the roots iff q(c) < 0. Each relation is
// checked exactly on q and again on the floating-point roots.
inline OrderingReport ordering_checks(const SpaceSpec& s, const std::vector<EinsteinSolution>& sols) {
  OrderingReport rep;
  auto fail = [&](const std::string& what) {
    if (rep.ok) rep.failure = s.id + ": " + what;
    rep.ok = false;
  };
  if (s.flags.abelian_k || sols.size() != 2) {
    fail("ordering checks need two distinct solutions");
    return rep;
  }
  const auto q = diagonal_quadratic(s);
  const Rational a = s.a(), k = s.kappa;
  const Rational v = (2 * k + 1) / (4 * a);
  const Rational top = (2 * k + 1) / (2 * a);
  const Rational mid = 2 * (1 - a + k) / (2 * k + 1);
  const double xp = sols[0].x1, xm = sols[1].x1;

  if (!(q(v) < 0)) fail("x- < (2k+1)/(4a) < x+ (exact)");
  if (!(q(top) >= 0 && top > v)) fail("x+ <= (2k+1)/(2a) (exact)");
  if (!(q(mid) < 0)) fail("x- < 2(1-a+k)/(2k+1) < x+ (exact)");
  if (a < k && !(q(Rational(1)) < 0)) fail("x- < 1 < x+ when a < kappa (exact)");

  const double vd = to_double(v), topd = to_double(top), midd = to_double(mid);
  if (!(xm < vd && vd < xp)) fail("x- < (2k+1)/(4a) < x+ (roots)");
  if (!(xp <= topd * (1 + 1e-15))) fail("x+ <= (2k+1)/(2a) (roots)");
  if (!(xm < midd && midd < xp)) fail("x- < 2(1-a+k)/(2k+1) < x+ (roots)");

  const Rational q1 = q(Rational(1));
  if (q1 < 0) rep.position = OrderingReport::Position::straddles_one;
  else rep.position = v > 1 ? OrderingReport::Position::above_one : OrderingReport::Position::below_one;
  const bool roots_agree = rep.position == OrderingReport::Position::straddles_one ? (xm < 1 && 1 < xp)
                           : rep.position == OrderingReport::Position::above_one ? (1 < xm)
                                                                                   : (xp < 1);
  if (!roots_agree) fail(std::string("position of 1 relative to the roots: expected ") + to_string(rep.position));
  return rep;
}

// (2k+1)^2/16 >= (a/2)(1-a+k): the canonical-variation Einstein condition.
inline bool besse_condition(const SpaceSpec& s) {
  if (s.flags.abelian_k) return true;
  const Rational a = s.a(), k = s.kappa;
  return (2 * k + 1) * (2 * k + 1) / 16 >= a / 2 * (1 - a + k);
}

// s(x) = scal_N(x, x, 1) and its derivative; sign(s') = sign of the numerator.
inline double s_curve(const SpaceSpec& s, double x) { return scal_normalized(s, DiagonalMetric<double>{x, x, 1.0}); }

inline double s_prime_numerator(const SpaceSpec& s, double x) {
  const double a = to_double(s.effective_a()), n = s.n, d = s.d;
  return 2 * a * n * x * x - (2 * d * (1 - a) + n) * x + (n + d) * (1 - a);
}

inline double s_prime(const SpaceSpec& s, double x) {
  const double beta = 2.0 * s.n / s.dim();
  return s.d * std::pow(x, beta - 3) * s_prime_numerator(s, x) / (2.0 * s.dim());
}

}  // namespace ehhk
