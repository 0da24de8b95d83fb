// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "ehhk/stability.hpp"
#include "ehhk/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace ehhk;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<SpaceSpec> all_rows(const Catalog& cat) {
  auto rows = cat.sample(3);
  rows.push_back(cat.resolve("Sp(mk)/Sp(k)^m[m=3,k=8]"));
  rows.push_back(cat.resolve("Sp(mk)/Sp(k)^m[m=4,k=3]"));
  return rows;
}

bool strict_nonabelian(const SpaceSpec& s) {
  return s.flags.uniform_a && !s.flags.abelian_k && existence_condition(s).strict;
}

// ---------------------------------------------------------------------------

Outcome criterion1(const Catalog& cat) {
  Outcome o;
  double worst = 0;
  auto expect = [&](const std::string& what, double got, double want) {
    const double dev = std::abs(got - want);
    worst = std::max(worst, dev);
    if (!(dev < 5e-4)) o.fail(what + ": " + fmt("%.6f", got) + " vs " + fmt("%.4f", want));
  };
  struct Sc1 {
    const char* id;
    double g1, g2, g5;
  };
  for (const auto& r : {Sc1{"G2/SU(2)xSU(2)", 7.8598, 8.0237, 8.5492}, Sc1{"E6/Sp(4)", 44.0481, 44.3085, 47.0750},
                        Sc1{"E7/SU(8)", 75.0853, 75.3101, 79.9213}, Sc1{"E8/SO(16)", 139.8741, 140.0578, 148.4839}}) {
    const auto s = cat.resolve(r.id);
    const auto sols = classify_symmetric(s, s.flags.provisional);
    expect(std::string(r.id) + " g1", find_label(sols, SolutionLabel::g1_plus)->scal_n, r.g1);
    expect(std::string(r.id) + " g2", find_label(sols, SolutionLabel::g2_minus)->scal_n, r.g2);
    expect(std::string(r.id) + " g5", find_label(sols, SolutionLabel::g5)->scal_n, r.g5);
  }
  struct Sc2 {
    const char* id;
    double g3, g5;
  };
  for (const auto& r : {Sc2{"F4/SO(9)", 27.9641, 28.8834}, Sc2{"E6/F4", 42.2068, 43.7266}}) {
    const auto sols = classify_symmetric(cat.resolve(r.id));
    expect(std::string(r.id) + " g3", find_label(sols, SolutionLabel::g3)->scal_n, r.g3);
    expect(std::string(r.id) + " g5", find_label(sols, SolutionLabel::g5)->scal_n, r.g5);
  }
  // Closed-form entries of the family rows, m up to 12.
  for (auto f : {SymmetricFamily::su_so, SymmetricFamily::so_soxso, SymmetricFamily::su_sp, SymmetricFamily::so_so,
                 SymmetricFamily::sp_spxsp}) {
    for (long m = family_min_m(f); m <= 12; ++m) {
      const auto s = cat.spec(family_id(f), {{"m", m}});
      const auto sols = classify_symmetric(s);
      const auto closed = family_scal_formulas(f, m);
      expect(s.id + " g5", find_label(sols, SolutionLabel::g5)->scal_n, closed.g5);
      if (s.a() < Rational(1, 2)) {
        expect(s.id + " g1", find_label(sols, SolutionLabel::g1_plus)->scal_n, closed.first);
        expect(s.id + " g2", find_label(sols, SolutionLabel::g2_minus)->scal_n, closed.second);
      } else {
        expect(s.id + " g3", find_label(sols, SolutionLabel::g3)->scal_n, closed.first);
      }
    }
  }
  if (o.ok) o.detail = "max |dev| = " + fmt("%.2e", worst) + " (tol 5e-4)";
  return o;
}

Outcome criterion2(const Catalog& cat) {
  Outcome o;
  int checked = 0;
  for (const auto& s : all_rows(cat)) {
    if (s.cond2_expected == Cond2::untabulated) continue;
    ++checked;
    const Cond2 got = existence_class(s);
    if (got != s.cond2_expected)
      o.fail(s.id + ": computed " + to_string(got) + ", tabulated " + to_string(s.cond2_expected));
  }
  for (const char* id : {"Sp(mk)/Sp(k)^m[m=3,k=8]", "Sp(mk)/Sp(k)^m[m=4,k=3]"})
    if (existence_class(cat.resolve(id)) != Cond2::equality) o.fail(std::string(id) + ": equality expected");
  if (o.ok) o.detail = std::to_string(checked) + " rows match, exact arithmetic";
  return o;
}

Outcome criterion3(const Catalog& cat) {
  Outcome o;
  VerifyOptions opt;
  opt.level = VerifyLevel::full;
  opt.samples = 50;
  opt.ricci_tol = 1e-9;
  opt.structure_tol = 1e-10;
  opt.algebra_tol = 1e-10;
  const auto checks = verify_oracle(cat, opt);
  double worst_ricci = 0;
  for (const auto& c : checks) {
    if (!c.ok) o.fail(c.name + ": " + fmt("%.3e", c.value) + " >= " + fmt("%.0e", c.tol));
    if (c.name.find("Ricci") != std::string::npos) worst_ricci = std::max(worst_ricci, c.value);
  }
  if (o.ok) o.detail = std::to_string(checks.size()) + " checks, max Ricci deviation " + fmt("%.2e", worst_ricci);
  return o;
}

Outcome criterion4(const Catalog& cat) {
  Outcome o;
  double worst = 0, worst_brute = 0;
  int count = 0;
  auto record = [&](const SpaceSpec& s, const EinsteinSolution& sol) {
    ++count;
    worst = std::max(worst, sol.residual);
    if (!(sol.residual < 1e-10)) o.fail(s.id + " " + to_string(sol.label) + ": residual " + fmt("%.2e", sol.residual));
  };
  for (const auto& s : all_rows(cat)) {
    if (s.flags.uniform_a)
      for (const auto& sol : solve_diagonal(s)) record(s, sol);
    if (s.flags.symmetric && (s.flags.uniform_a || s.flags.provisional) && s.effective_a() != 0)
      for (const auto& sol : classify_symmetric(s, true)) record(s, sol);
    else if (s.flags.symmetric)
      for (const auto& sol : g5_g6(s)) record(s, sol);
  }
  bool g5_sp2 = false;
  for (auto c : oracle::all_embed_cases()) {
    const auto s = cat.resolve(oracle::catalog_id(c));
    const auto ds = oracle::build_doubled(oracle::embed_pair(c));
    const auto sols = s.flags.symmetric && s.a() != 0 ? classify_symmetric(s) : solve_diagonal(s);
    for (const auto& sol : sols) {
      const double r = bruteforce_residual(ds, oracle::gram_matrix(ds, sol.x1, sol.x2, sol.x3, sol.x4));
      worst_brute = std::max(worst_brute, r);
      if (!(r < 1e-9)) o.fail(std::string(oracle::to_string(c)) + " " + to_string(sol.label) + ": brute-force residual " + fmt("%.2e", r));
      if (c == oracle::EmbedCase::sp2_sp1sp1 && sol.label == SolutionLabel::g5 && r < 1e-9) g5_sp2 = true;
    }
  }
  if (!g5_sp2) o.fail("g5 not verified by brute force on Sp(2)/Sp(1)xSp(1)");
  if (o.ok)
    o.detail = std::to_string(count) + " solutions, max residual " + fmt("%.2e", worst) + " (tol 1e-10); brute force max " +
               fmt("%.2e", worst_brute) + " (tol 1e-9)";
  return o;
}

Outcome criterion5(const Catalog& cat) {
  Outcome o;
  int rows = 0, hessians = 0;
  double worst_h = 0;
  for (const auto& s : all_rows(cat)) {
    if (!strict_nonabelian(s)) continue;
    ++rows;
    const auto ex = exact_stability(s);
    if (!ex.minus_ok) o.fail(s.id + ": lambda1 < 2rho- < lambda2 fails (exact)");
    if (!ex.plus_ok) o.fail(s.id + ": lambda1 < lambda2 < 2rho+ fails (exact)");
    if (hessians >= 10 || rows % 5 != 1) continue;
    ++hessians;
    for (const auto& sol : solve_diagonal(s)) {
      const auto rep = stability_report(s, sol);
      const Eigen::Matrix2d H = normalized_hessian_fd(s, sol.diagonal_metric());
      const Eigen::Matrix2d P = projected_second_variation(s, rep, sol.diagonal_metric());
      const double rel = (2 * H - P).cwiseAbs().maxCoeff() / P.cwiseAbs().maxCoeff();
      worst_h = std::max(worst_h, rel);
      if (!(rel < 1e-5)) o.fail(s.id + " " + to_string(sol.label) + ": Hessian mismatch " + fmt("%.2e", rel));
    }
  }
  if (hessians < 10) o.fail("only " + std::to_string(hessians) + " rows sampled for the Hessian");
  if (o.ok)
    o.detail = std::to_string(rows) + " strict rows exact; Hessian on " + std::to_string(hessians) +
               " rows, max rel " + fmt("%.2e", worst_h) + " (tol 1e-5)";
  return o;
}

Outcome criterion6(const Catalog& cat) {
  Outcome o;
  double worst_fp = 0, min_fpp = 1e300, min_res = 1e300;
  int rows = 0;
  for (const auto& s : all_rows(cat)) {
    ++rows;
    auto f = [&](long double z) {
      return scal_normalized(s, normal_to_diagonal(NormalMetric<long double>{z, 1 / z}));
    };
    const long double h = 1e-6L;
    const double fp = static_cast<double>((f(1 + h) - f(1 - h)) / (2 * h));
    worst_fp = std::max(worst_fp, std::abs(fp));
    if (!(std::abs(fp) < 1e-8)) o.fail(s.id + ": f'(1) = " + fmt("%.2e", fp));
    const double fpp = normal_profile(s, 1).fpp1;
    min_fpp = std::min(min_fpp, fpp);
    if (!(fpp > 0)) o.fail(s.id + ": f''(1) = " + fmt("%.3e", fpp));
    const double f1 = normal_profile(s, 1).f;
    for (double z : {1e-4, 1e4})
      if (!(normal_profile(s, z).f > f1)) o.fail(s.id + ": f(" + fmt("%g", z) + ") <= f(1)");
    const int steps = 41;
    for (int i = 0; i < steps; ++i)
      for (int j = 0; j < steps; ++j) {
        const double z1 = std::pow(10.0, -1 + 2.0 * i / (steps - 1)), z2 = std::pow(10.0, -1 + 2.0 * j / (steps - 1));
        const double r = einstein_residual(s, normal_to_diagonal(NormalMetric<double>{z1, z2}));
        min_res = std::min(min_res, r);
        if (!(r > 1e-3)) o.fail(s.id + ": normal metric residual " + fmt("%.2e", r));
      }
  }
  if (o.ok)
    o.detail = std::to_string(rows) + " rows; max |f'(1)| " + fmt("%.2e", worst_fp) + ", min f''(1) " +
               fmt("%.3e", min_fpp) + ", min normal residual " + fmt("%.3e", min_res) + " (> 1e-3)";
  return o;
}

Outcome criterion7(const Catalog& cat) {
  Outcome o;
  double worst_sym = 0, min_depart = 1e300, worst_drift = 0;
  const char* ids[] = {"SU(m)/SO(m)[m=3]", "E6/Sp(4)", "E8/SO(16)", "SU(m)/T^(m-1)[m=3]", "Sp(mk)/Sp(k)^m[m=5,k=2]"};
  for (const char* id : ids) {
    const auto s = cat.resolve(id);
    // Between x- and x+ (or above the single root) the diagonal flow exists for all time.
    const auto sols = solve_diagonal(s);
    const double x0 = sols.size() == 2 ? std::sqrt(sols[0].x1 * sols[1].x1) : 1.2 * sols.at(0).x1;
    const auto start = unit_volume_state(s, {x0, x0, 1.0});
    const auto r = integrate(s, {start, 0}, 10, true, {}, true);
    if (r.status != FlowStatus::ok) o.fail(std::string(id) + ": flow halted (" + to_string(r.status) + ")");
    for (const auto& p : r.trajectory) worst_sym = std::max(worst_sym, std::abs(p.x1 - p.x2) / p.x1);

    const std::array<double, 3> normal{1.0, 2.0, 4.0 / 3.0};
    const auto d = integrate(s, {normal, 0}, 1, false);
    const double dep = normal_curve_departure(d.final.x);
    min_depart = std::min(min_depart, dep);
    if (!(dep > 1e-3)) o.fail(std::string(id) + ": normal-curve departure " + fmt("%.2e", dep));

    for (const auto& sol : solve_diagonal(s)) {
      const std::array<double, 3> x{sol.x1, sol.x2, sol.x3};
      const auto st = integrate(s, {x, 0}, 1, true);
      double drift = 0;
      for (int i = 0; i < 3; ++i) drift = std::max(drift, std::abs(st.final.x[i] - x[i]) / x[i]);
      worst_drift = std::max(worst_drift, drift);
      if (!(drift < 1e-9)) o.fail(std::string(id) + " " + to_string(sol.label) + ": drift " + fmt("%.2e", drift));
    }
  }
  if (!(worst_sym <= 1e-10)) o.fail("x1 = x2 broken by " + fmt("%.2e", worst_sym));
  if (o.ok)
    o.detail = "max |x1-x2|/x1 " + fmt("%.1e", worst_sym) + " (tol 1e-10), min departure " + fmt("%.2e", min_depart) +
               ", max drift at g+- " + fmt("%.1e", worst_drift) + " (rtol 1e-9)";
  return o;
}

Outcome criterion8(const Catalog& cat) {
  Outcome o;
  int nonhom = 0, distinct = 0;
  for (const auto& s : all_rows(cat)) {
    if (s.flags.symmetric && (s.flags.uniform_a || s.flags.provisional) && s.effective_a() != 0 &&
        s.effective_a() != Rational(1, 2)) {
      ++nonhom;
      const auto rep = nonhomothety_check(s, true);
      if (!rep.ok) o.fail(rep.failure);
    }
    if (strict_nonabelian(s)) {
      ++distinct;
      const auto sols = solve_diagonal(s);
      const auto plus = stability_report(s, sols[0]).classification;
      const auto minus = stability_report(s, sols[1]).classification;
      if (plus == minus) o.fail(s.id + ": g+ and g- share the class " + to_string(plus));
    }
  }
  if (o.ok)
    o.detail = std::to_string(nonhom) + " scal_N orderings, " + std::to_string(distinct) + " rows with distinct classes";
  return o;
}

}  // namespace

int main() {
  const Catalog cat = load_catalog(default_catalog_path());
  struct Criterion {
    int id;
    const char* name;
    double limit;  // seconds; 0: none
    std::function<Outcome(const Catalog&)> run;
  };
  const Criterion criteria[] = {
      {1, "table reproduction", 1, criterion1},   {2, "existence audit", 1, criterion2},
      {3, "oracle equivalence", 60, criterion3},  {4, "Einstein residuals", 0, criterion4},
      {5, "stability suite", 0, criterion5},      {6, "normal metrics", 0, criterion6},
      {7, "flow properties", 30, criterion7},     {8, "non-homothety", 0, criterion8},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(cat);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    if (c.limit > 0 && dt >= c.limit) o.fail("runtime " + fmt("%.2f", dt) + " s >= " + fmt("%g", c.limit) + " s");
    std::printf("%s [%d] %s: %s (%.3f s%s)\n", o.ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), dt,
                c.limit > 0 ? (", limit " + fmt("%g", c.limit) + " s").c_str() : "");
    failed += !o.ok;
  }
  return failed == 0 ? 0 : 1;
}
