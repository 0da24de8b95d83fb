#include "ehhk/nondiagonal.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ehhk;
using ehhk::testing::catalog;
using ehhk::testing::Gen;

namespace {

std::vector<SpaceSpec> symmetric_rows() {
  std::vector<SpaceSpec> out;
  for (auto& s : catalog().sample(4))
    if (s.flags.symmetric && s.flags.uniform_a && s.a() != 0) out.push_back(s);
  return out;
}

FullMetric<double> random_full(Gen& g) {
  const double x1 = g.log_uniform(0.1, 10), x2 = g.log_uniform(0.1, 10);
  const double x4 = g.uniform(-0.95, 0.95) * std::sqrt(x1 * x2);
  return {x1, x2, g.log_uniform(0.1, 10), x4};
}

}  // namespace

TEST(RicciFull, ReducesToDiagonalAtZeroX4) {
  Gen g(21);
  for (const auto& s : symmetric_rows()) {
    for (int i = 0; i < 10; ++i) {
      const DiagonalMetric<double> d{g.log_uniform(0.1, 10), g.log_uniform(0.1, 10), g.log_uniform(0.1, 10)};
      const auto full = ricci_full(s, FullMetric<double>{d.x1, d.x2, d.x3, 0.0});
      const auto diag = ricci_diagonal(s, d);
      const double scale = std::abs(diag.r1) + std::abs(diag.r2) + std::abs(diag.r3[0]);
      EXPECT_NEAR(full.r1, diag.r1, 1e-12 * scale) << s.id;
      EXPECT_NEAR(full.r2, diag.r2, 1e-12 * scale) << s.id;
      EXPECT_NEAR(full.r3[0], diag.r3[0], 1e-12 * scale) << s.id;
      EXPECT_EQ(full.ric12, 0.0);
    }
  }
}

TEST(RicciFull, ParityAndScaling) {
  Gen g(22);
  const auto rows = symmetric_rows();
  for (int i = 0; i < 300; ++i) {
    const auto& s = rows[g.integer(0, rows.size() - 1)];
    const auto m = random_full(g);
    const auto r = ricci_full(s, m);
    const auto rn = ricci_full(s, FullMetric<double>{m.x1, m.x2, m.x3, -m.x4});
    EXPECT_DOUBLE_EQ(r.r12, rn.r12);
    EXPECT_DOUBLE_EQ(r.ric12, -rn.ric12);
    EXPECT_DOUBLE_EQ(r.r1, rn.r1);
    const double c = g.log_uniform(0.01, 100);
    const auto rc = ricci_full(s, FullMetric<double>{c * m.x1, c * m.x2, c * m.x3, c * m.x4});
    EXPECT_NEAR(rc.r1 * c, r.r1, 1e-11 * (std::abs(r.r1) + std::abs(r.r12)));
    EXPECT_NEAR(rc.r3[0] * c, r.r3[0], 1e-11 * (std::abs(r.r3[0]) + 1));
    EXPECT_NEAR(einstein_residual(s, m), einstein_residual(s, FullMetric<double>{m.x1, m.x2, m.x3, -m.x4}),
                1e-12 * einstein_residual(s, m) + 1e-15);
  }
}

TEST(RicciFull, RejectsDegenerateAndNonSymmetric) {
  const auto s = catalog().resolve("E6/Sp(4)");
  EXPECT_THROW(ricci_full(s, FullMetric<double>{1, 1, 1, 1}), std::domain_error);
  EXPECT_THROW(ricci_full(s, FullMetric<double>{1, 1, 0, 0}), std::domain_error);
  EXPECT_THROW(ricci_full(catalog().resolve("E6/SU(3)"), FullMetric<double>{1, 1, 1, 0}), UnsupportedSpace);
}

TEST(G5, EinsteinOnEverySymmetricPair) {
  auto rows = symmetric_rows();
  rows.push_back(catalog().resolve("SU(3)/U(2)"));
  rows.push_back(catalog().resolve("Sp(3)/Sp(1)xSp(2)"));
  rows.push_back(catalog().resolve("G2/SU(2)xSU(2)"));
  for (const auto& s : rows) {
    const auto sols = g5_g6(s);
    for (const auto& sol : sols) {
      EXPECT_LT(sol.residual, 1e-13) << s.id;
      EXPECT_NEAR(sol.scal_n, scal_n_g5(s), 1e-12 * sol.scal_n) << s.id;
      EXPECT_NEAR(sol.scal_n, scal_n_full(s, sol), 1e-12 * sol.scal_n) << s.id;
    }
    EXPECT_NEAR(ricci_full(s, FullMetric<double>{0.5, 1.5, 1.0, 0.5}).R, 1.0, 1e-14) << s.id;
  }
}

TEST(Classify, SpTwoHasEinsteinQuarter) {
  const auto s = catalog().resolve("Sp(2m)/Sp(m)xSp(m)[m=1]");
  EXPECT_LT(einstein_residual(s, FullMetric<double>{1, 1, 1, 0.25}), 1e-14);
  const auto sols = classify_symmetric(s);
  EXPECT_DOUBLE_EQ(find_label(sols, SolutionLabel::g3)->x4, 0.25);
  EXPECT_DOUBLE_EQ(find_label(sols, SolutionLabel::g4)->x4, -0.25);
}

TEST(Classify, E6F4OffDiagonal) {
  const auto s = catalog().resolve("E6/F4");
  const auto* g3 = find_label(classify_symmetric(s), SolutionLabel::g3);
  ASSERT_NE(g3, nullptr);
  EXPECT_NEAR(g3->x4, 1 / std::sqrt(10.0), 1e-15);
}

TEST(Classify, AllSolutionsAreEinstein) {
  for (const auto& s : symmetric_rows()) {
    SCOPED_TRACE(s.id);
    const auto sols = classify_symmetric(s);
    const Rational a = s.a();
    EXPECT_EQ(sols.size(), a < Rational(1, 2) ? 4u : (a == Rational(1, 2) ? 3u : 4u));
    for (const auto& sol : sols) {
      EXPECT_LT(sol.residual, 1e-12) << to_string(sol.label);
      EXPECT_NEAR(sol.scal_n, scal_normalized(s, FullMetric<double>{sol.x1, sol.x2, sol.x3, sol.x4}), 1e-12 * sol.scal_n);
    }
    if (a > Rational(1, 2)) {
      const auto* g3 = find_label(sols, SolutionLabel::g3);
      const auto* g4 = find_label(sols, SolutionLabel::g4);
      EXPECT_NEAR(g3->scal_n, scal_n_g3(s), 1e-12 * g3->scal_n);
      EXPECT_NEAR(g3->scal_n, scal_n_full(s, *g3), 1e-12 * g3->scal_n);
      EXPECT_DOUBLE_EQ(g3->scal_n, g4->scal_n);
      EXPECT_EQ(g3->isometric_to, SolutionLabel::g4);
    } else {
      EXPECT_THROW(scal_n_full(s, sols.front()), UndefinedResult);
    }
  }
}

TEST(Classify, RejectsUnsupportedRows) {
  EXPECT_THROW(classify_symmetric(catalog().resolve("SU(3)/U(2)")), UnsupportedSpace);
  EXPECT_THROW(classify_symmetric(catalog().resolve("G2/SU(2)xSU(2)")), UnsupportedSpace);
  EXPECT_NO_THROW(classify_symmetric(catalog().resolve("G2/SU(2)xSU(2)"), true));
  EXPECT_THROW(classify_symmetric(catalog().resolve("SU(m)/SO(m)[m=2]")), UnsupportedSpace);
}

TEST(ScalNFull, RejectsNonEinsteinAndDiagonal) {
  const auto s = catalog().resolve("E6/F4");
  EinsteinSolution bogus;
  bogus.x4 = 0.1;
  EXPECT_THROW(scal_n_full(s, bogus), UndefinedResult);
  bogus.x3 = 2;
  EXPECT_THROW(scal_n_full(s, bogus), UndefinedResult);
}

TEST(FamilyFormulas, AgreeWithClassification) {
  for (auto f : {SymmetricFamily::su_so, SymmetricFamily::so_soxso, SymmetricFamily::su_sp, SymmetricFamily::so_so,
                 SymmetricFamily::sp_spxsp}) {
    for (long m = family_min_m(f); m < family_min_m(f) + 8; ++m) {
      const auto s = catalog().spec(family_id(f), {{"m", m}});
      SCOPED_TRACE(s.id);
      const auto sols = classify_symmetric(s);
      const auto closed = family_scal_formulas(f, m);
      EXPECT_NEAR(closed.g5, find_label(sols, SolutionLabel::g5)->scal_n, 1e-10 * closed.g5);
      if (s.a() < Rational(1, 2)) {
        EXPECT_NEAR(closed.first, find_label(sols, SolutionLabel::g1_plus)->scal_n, 1e-10 * closed.first);
        EXPECT_NEAR(closed.second, find_label(sols, SolutionLabel::g2_minus)->scal_n, 1e-10 * closed.second);
      } else {
        EXPECT_NEAR(closed.first, find_label(sols, SolutionLabel::g3)->scal_n, 1e-10 * closed.first);
      }
    }
    EXPECT_THROW(family_scal_formulas(f, family_min_m(f) - 1), RangeError);
  }
}

TEST(FamilyFormulas, FrozenValues) {
  struct Row {
    const char* id;
    SolutionLabel first;
    double v1, v2, v5;
  };
  const Row rows[] = {
      {"E6/Sp(4)", SolutionLabel::g1_plus, 44.0482, 44.3086, 47.0750},
      {"E8/SO(16)", SolutionLabel::g1_plus, 139.8742, 140.0578, 148.4840},
      {"F4/SO(9)", SolutionLabel::g3, 27.9642, 0, 28.8834},
      {"E6/F4", SolutionLabel::g3, 42.2068, 0, 43.7266},
      {"Sp(2m)/Sp(m)xSp(m)[m=1]", SolutionLabel::g3, 5.4977, 0, 5.7423},
  };
  for (const auto& r : rows) {
    const auto sols = classify_symmetric(catalog().resolve(r.id));
    EXPECT_NEAR(find_label(sols, r.first)->scal_n, r.v1, 5e-5) << r.id;
    if (r.v2 > 0) {
      EXPECT_NEAR(find_label(sols, SolutionLabel::g2_minus)->scal_n, r.v2, 5e-5) << r.id;
    }
    EXPECT_NEAR(find_label(sols, SolutionLabel::g5)->scal_n, r.v5, 5e-5) << r.id;
  }
}

TEST(Nonhomothety, HoldsOnEverySymmetricRow) {
  for (const auto& s : symmetric_rows()) {
    if (s.a() == Rational(1, 2)) continue;
    const auto rep = nonhomothety_check(s);
    EXPECT_TRUE(rep.ok) << rep.failure;
  }
  EXPECT_TRUE(nonhomothety_check(catalog().resolve("G2/SU(2)xSU(2)"), true).ok);
}
