#include "ehhk/stability.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

using namespace ehhk;
using ehhk::testing::catalog;

namespace {

std::vector<SpaceSpec> strict_rows() {
  std::vector<SpaceSpec> out;
  for (auto& s : ehhk::testing::uniform_rows(4))
    if (!s.flags.abelian_k && existence_condition(s).strict) out.push_back(s);
  return out;
}

}  // namespace

TEST(LMatrix, SpectrumAtEinsteinMetrics) {
  for (const auto& s : strict_rows()) {
    for (const auto& sol : solve_diagonal(s)) {
      const auto rep = stability_report(s, sol);
      EXPECT_LT((rep.L - rep.L.transpose()).cwiseAbs().maxCoeff(), 1e-14);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(rep.L);
      const auto ev = es.eigenvalues();
      const double scale = rep.lambda2;
      EXPECT_NEAR(ev[0], 0, 1e-12 * scale) << s.id;
      EXPECT_NEAR(ev[1], rep.lambda1, 1e-12 * scale) << s.id;
      EXPECT_NEAR(ev[2], rep.lambda2, 1e-12 * scale) << s.id;
      for (int i = 0; i < 3; ++i) {
        const double lam = i == 0 ? 0 : (i == 1 ? rep.lambda1 : rep.lambda2);
        const Eigen::Vector3d v = rep.eigenvectors[i];
        EXPECT_LT((rep.L * v - lam * v).norm(), 1e-12 * scale * v.norm()) << s.id << " vector " << i;
      }
    }
  }
}

TEST(LMatrix, GeneralFormMatchesOnRandomMetrics) {
  ehhk::testing::Gen g(31);
  for (const auto& s : ehhk::testing::uniform_rows(2)) {
    const DiagonalMetric<double> m{g.log_uniform(0.2, 5), g.log_uniform(0.2, 5), g.log_uniform(0.2, 5)};
    const Eigen::Matrix3d L = l_matrix(s, m);
    EXPECT_LT((L - L.transpose()).cwiseAbs().maxCoeff(), 1e-14) << s.id;
    EXPECT_TRUE(L.allFinite()) << s.id;
  }
}

TEST(Stability, SuThreeSoThreeMinusSolution) {
  const auto s = catalog().resolve("SU(m)/SO(m)[m=3]");
  const auto sols = solve_diagonal(s);
  const auto rep = stability_report(s, sols.at(1));
  EXPECT_NEAR(rep.lambda1, 0.4284, 5e-5);
  EXPECT_NEAR(rep.two_rho, 0.8806, 5e-5);
  EXPECT_NEAR(rep.lambda2, 1.8563, 5e-5);  // (13/3) lambda1
  EXPECT_EQ(rep.classification, StabilityClass::saddle_min_along_diag);
}

TEST(Stability, ClassesAndExactCriteria) {
  for (const auto& s : strict_rows()) {
    SCOPED_TRACE(s.id);
    const auto sols = solve_diagonal(s);
    const auto plus = stability_report(s, sols[0]);
    const auto minus = stability_report(s, sols[1]);
    EXPECT_EQ(minus.classification, StabilityClass::saddle_min_along_diag);
    EXPECT_EQ(plus.classification, StabilityClass::local_min_coindex_ge_2);
    EXPECT_LT(plus.lambda2, plus.two_rho);
    const auto exact = exact_stability(s);
    EXPECT_TRUE(exact.minus_ok);
    EXPECT_TRUE(exact.plus_ok);
    EXPECT_TRUE(saddle_curve_check(s, sols[0]).consistent);
    EXPECT_TRUE(saddle_curve_check(s, sols[1]).consistent);
  }
}

TEST(Stability, AbelianAndDoubleRoot) {
  const auto ab = catalog().resolve("E8/T^8");
  EXPECT_EQ(stability_report(ab, solve_diagonal(ab).at(0)).classification, StabilityClass::abelian_single);
  const auto eq = catalog().resolve("Sp(mk)/Sp(k)^m[m=4,k=3]");
  EXPECT_EQ(stability_report(eq, solve_diagonal(eq).at(0)).classification, StabilityClass::degenerate_double_root);
}

TEST(Stability, RejectsNonEinstein) {
  const auto s = catalog().resolve("E6/Sp(4)");
  EinsteinSolution sol;
  sol.x1 = sol.x2 = 1.7;
  EXPECT_THROW(stability_report(s, sol), std::invalid_argument);
  sol.x2 = 1.6;
  EXPECT_THROW(stability_report(s, sol), std::invalid_argument);
}

// The Hessian of scal_N on unit-volume metrics is half the projected second variation.
TEST(Stability, FiniteDifferenceHessian) {
  auto rows = strict_rows();
  rows.resize(std::min<std::size_t>(rows.size(), 25));
  for (const auto& s : rows) {
    for (const auto& sol : solve_diagonal(s)) {
      const auto rep = stability_report(s, sol);
      const Eigen::Matrix2d H = normalized_hessian_fd(s, sol.diagonal_metric());
      const Eigen::Matrix2d P = projected_second_variation(s, rep, sol.diagonal_metric());
      EXPECT_LT((2 * H - P).cwiseAbs().maxCoeff(), 1e-5 * P.cwiseAbs().maxCoeff()) << s.id << "\n" << H << "\n" << P;
      EXPECT_GT(P(0, 0), 0) << s.id;
      if (sol.label == SolutionLabel::g2_minus) EXPECT_LT(P(1, 1), 0) << s.id;
      else EXPECT_GT(P(1, 1), 0) << s.id;
    }
  }
}
