#pragma once

// Oracle suite: closed forms against brute-force Lie algebra computations on
// the five embedded pairs. Shared by `ehhk verify` and the acceptance runner.

#include "ehhk/lie_oracle.hpp"
#include "ehhk/nondiagonal.hpp"
#include "ehhk/ricci_flow.hpp"

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace ehhk {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct CheckResult {
  std::string name;
  bool ok = false;
  double value = 0;
  double tol = 0;
  std::string detail;
};

enum class VerifyLevel { fast, full };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::fast;
  std::uint64_t seed = 20240601;
  int samples = 50;
  double ricci_tol = 1e-9;
  double structure_tol = 1e-10;
  double algebra_tol = 1e-12;
  double residual_tol = 1e-9;
};

namespace verify_detail {

inline CheckResult check(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value < tol, value, tol, std::move(detail)};
}

struct MetricSampler {
  std::mt19937_64 rng;
  explicit MetricSampler(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) {
    // Fixed mapping of the 53 high bits, independent of the library's distributions.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  double log_uniform(double spread) { return std::exp(uniform(-spread, spread)); }
};

inline MatrixXd expected_tensor(const oracle::DoubledSpace& ds, double x1, double x2, double x3, double x4,
                                double r11, double r22, double r12, const std::vector<double>& r33) {
  MatrixXd E = MatrixXd::Zero(ds.dim_p(), ds.dim_p());
  for (int a = 0; a < ds.n; ++a) {
    E(a, a) = x1 * r11;
    E(ds.n + a, ds.n + a) = x2 * r22;
    E(a, ds.n + a) = E(ds.n + a, a) = r12;
  }
  for (std::size_t l = 0; l < ds.p3_blocks.size(); ++l)
    for (int i : ds.p3_blocks[l]) E(i, i) = x3 * r33[l];
  (void)x4;
  return E;
}

// Closed-form r3 per oracle ideal: match each ideal to a catalog block by its a.
inline std::vector<double> r3_per_ideal(const SpaceSpec& s, const oracle::DoubledSpace& ds,
                                        const std::vector<double>& r3_catalog) {
  std::vector<double> out;
  for (const auto& ideal : ds.pair.ideals) {
    double best = 1e300, val = 0;
    for (std::size_t l = 0; l < s.blocks.size(); ++l) {
      const double dev = std::abs(to_double(s.blocks[l].a) - ideal.a);
      if (dev < best) best = dev, val = r3_catalog[l];
    }
    out.push_back(val);
  }
  return out;
}

}  // namespace verify_detail

// Relative Einstein residual of the brute-force Ricci operator G^{-1} Ric.
inline double bruteforce_residual(const oracle::DoubledSpace& ds, const MatrixXd& G) {
  const MatrixXd op = G.llt().solve(oracle::ricci_bruteforce(ds, G));
  const double mean = op.trace() / ds.dim_p();
  return (op - mean * MatrixXd::Identity(ds.dim_p(), ds.dim_p())).cwiseAbs().maxCoeff() / std::abs(mean);
}

inline std::vector<CheckResult> verify_pair(const Catalog& cat, oracle::EmbedCase which, const VerifyOptions& opt) {
  using namespace oracle;
  std::vector<CheckResult> out;
  const std::string tag = std::string(to_string(which)) + ": ";
  const SpaceSpec s = cat.resolve(catalog_id(which));
  const EmbeddedPair pair = embed_pair(which);
  verify_detail::MetricSampler rng(opt.seed ^ (static_cast<std::uint64_t>(which) * 0x9E3779B97F4A7C15ULL));

  out.push_back(verify_detail::check(tag + "Jacobi identity", pair.h.jacobi_residual(), opt.algebra_tol));
  {
    double worst = 0;
    for (int it = 0; it < 100; ++it) {
      VectorXd X(pair.h.dim), Y(pair.h.dim), Z(pair.h.dim);
      for (int i = 0; i < pair.h.dim; ++i) X[i] = rng.uniform(-1, 1), Y[i] = rng.uniform(-1, 1), Z[i] = rng.uniform(-1, 1);
      worst = std::max(worst, std::abs(pair.h.killing_form(pair.h.bracket(X, Y), Z) +
                                       pair.h.killing_form(Y, pair.h.bracket(X, Z))));
    }
    out.push_back(verify_detail::check(tag + "Killing form ad-invariance", worst, opt.algebra_tol));
  }
  out.push_back(verify_detail::check(tag + "reductive decomposition", reductive_defect(pair), opt.algebra_tol));

  if (pair.n() != s.n || pair.d() != s.d) {
    out.push_back({tag + "dimensions match catalog", false, 0, 0,
                   "oracle (n, d) = (" + std::to_string(pair.n()) + ", " + std::to_string(pair.d()) +
                       "), catalog (" + std::to_string(s.n) + ", " + std::to_string(s.d) + ")"});
    return out;
  }
  {
    double worst = 0;
    std::ostringstream det;
    for (const auto& ideal : pair.ideals) {
      double best = 1e300;
      for (const auto& b : s.blocks) best = std::min(best, std::abs(to_double(b.a) - ideal.a));
      worst = std::max(worst, best);
      det << "a=" << ideal.a << " x" << ideal.columns.size() << " ";
    }
    out.push_back(verify_detail::check(tag + "Killing ratios match catalog", worst, opt.structure_tol, det.str()));
  }
  {
    const MatrixXd cas = casimir_isotropy(pair);
    const double kappa = to_double(s.kappa);
    const double dev = (cas - kappa * MatrixXd::Identity(s.n, s.n)).cwiseAbs().maxCoeff();
    out.push_back(verify_detail::check(tag + "Casimir = kappa I", dev, opt.structure_tol));
    double trace_target = 0;
    for (const auto& ideal : pair.ideals) trace_target += (1 - ideal.a) * ideal.columns.size();
    out.push_back(verify_detail::check(tag + "tr Casimir = sum (1-a_l) d_l", std::abs(cas.trace() - trace_target), opt.structure_tol));
  }
  {
    // -tr((ad Z|q)^2) = (a_l - 1) Kil_h(Z, Z) for Z in each ideal.
    const auto act = isotropy_action(pair);
    double worst = 0;
    for (const auto& ideal : pair.ideals)
      for (int c : ideal.columns) {
        const VectorXd Z = pair.k_basis.col(c);
        worst = std::max(worst, std::abs(-(act[c] * act[c]).trace() - (ideal.a - 1) * pair.h.killing_form(Z, Z)));
      }
    out.push_back(verify_detail::check(tag + "isotropy trace per ideal", worst, opt.structure_tol));
  }
  if (s.flags.symmetric) {
    // sum (-Kil)([X,e_a], Z_b) (-Kil)([Y,e_a], Z_b) = -Kil(X, Y)/2 for X, Y in q.
    double worst = 0;
    const int n = pair.n(), d = pair.d();
    MatrixXd M(n, n * d);  // M(x, a*d + b) = -Kil([e_x, e_a], Z_b)
    for (int x = 0; x < n; ++x)
      for (int a = 0; a < n; ++a) {
        const VectorXd br = pair.h.bracket(pair.q_basis.col(x), pair.q_basis.col(a));
        for (int b = 0; b < d; ++b) M(x, a * d + b) = -pair.h.killing_form(br, pair.k_basis.col(b));
      }
    const MatrixXd lhs = M * M.transpose();
    worst = (lhs - 0.5 * MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    out.push_back(verify_detail::check(tag + "symmetric-pair Casimir identity", worst, opt.structure_tol));
  }

  const DoubledSpace ds = build_doubled(pair);
  {
    // [p1, p2] = 0, and [p_i, p_i] has no p_j component for i != j in {1, 2}.
    double worst = 0;
    for (int a = 0; a < ds.n; ++a)
      for (int b = 0; b < ds.n; ++b)
        worst = std::max({worst, ds.C[a].col(ds.n + b).cwiseAbs().maxCoeff(),
                          ds.C[a].col(b).segment(ds.n, ds.n).cwiseAbs().maxCoeff(),
                          ds.C[ds.n + a].col(ds.n + b).head(ds.n).cwiseAbs().maxCoeff()});
    out.push_back(verify_detail::check(tag + "block bracket relations", worst, opt.algebra_tol));
  }
  {
    const auto t = structural_constants_bruteforce(ds, three_blocks(ds));
    const auto sc = structural_constants_closed<double>(s);
    double worst = 0;
    for (std::size_t i = 0; i < t.size(); ++i) worst = std::max(worst, std::abs(t[i] - sc.c[i]));
    out.push_back(verify_detail::check(tag + "[ijk] brute force vs closed form", worst, opt.structure_tol));
  }
  {
    double worst = 0;
    for (int it = 0; it < opt.samples; ++it) {
      const double x1 = rng.log_uniform(1.4), x2 = rng.log_uniform(1.4), x3 = rng.log_uniform(1.4);
      const MatrixXd R = ricci_bruteforce(ds, gram_matrix(ds, x1, x2, x3, 0));
      const auto r = ricci_diagonal(s, DiagonalMetric<double>{x1, x2, x3});
      const MatrixXd E = verify_detail::expected_tensor(ds, x1, x2, x3, 0, r.r1, r.r2, 0, verify_detail::r3_per_ideal(s, ds, r.r3));
      worst = std::max(worst, (R - E).cwiseAbs().maxCoeff());
      // Same operator through the structural-constant formula.
      const auto rs = ricci_from_structural(s, DiagonalMetric<double>{x1, x2, x3}, structural_constants_closed<double>(s));
      worst = std::max({worst, std::abs(rs.r1 - r.r1), std::abs(rs.r2 - r.r2), std::abs(rs.r3.front() - r.r3.front())});
    }
    out.push_back(verify_detail::check(tag + "diagonal Ricci, " + std::to_string(opt.samples) + " random metrics", worst,
                                opt.ricci_tol));
  }
  if (opt.level == VerifyLevel::fast) return out;

  if (s.flags.symmetric) {
    double worst = 0;
    for (int it = 0; it < opt.samples; ++it) {
      const double x1 = rng.log_uniform(1.4), x2 = rng.log_uniform(1.4), x3 = rng.log_uniform(1.4);
      const double x4 = rng.uniform(-0.9, 0.9) * std::sqrt(x1 * x2);
      const MatrixXd R = ricci_bruteforce(ds, gram_matrix(ds, x1, x2, x3, x4));
      const auto r = ricci_full(s, FullMetric<double>{x1, x2, x3, x4});
      const MatrixXd E = verify_detail::expected_tensor(ds, x1, x2, x3, x4, r.r1, r.r2, r.ric12, verify_detail::r3_per_ideal(s, ds, r.r3));
      worst = std::max(worst, (R - E).cwiseAbs().maxCoeff());
    }
    out.push_back(verify_detail::check(tag + "4-parameter Ricci, " + std::to_string(opt.samples) + " random metrics", worst,
                                opt.ricci_tol));
  }
  {
    std::vector<EinsteinSolution> sols = s.flags.symmetric && !s.flags.abelian_k ? classify_symmetric(s) : solve_diagonal(s);
    double worst = 0;
    std::string labels;
    for (const auto& sol : sols) {
      worst = std::max(worst, bruteforce_residual(ds, gram_matrix(ds, sol.x1, sol.x2, sol.x3, sol.x4)));
      labels += std::string(to_string(sol.label)) + " ";
    }
    out.push_back(verify_detail::check(tag + "Einstein residual under brute force", sols.empty() ? 0 : worst,
                                opt.residual_tol, labels));
  }
  if (s.blocks.size() == 1) {
    // Flow vector field against the brute-force operator at 5 random states.
    double worst = 0;
    for (int it = 0; it < 5; ++it) {
      const std::array<double, 3> x{rng.log_uniform(1.0), rng.log_uniform(1.0), rng.log_uniform(1.0)};
      const auto v = flow_field(s, x, false);
      const MatrixXd G = gram_matrix(ds, x[0], x[1], x[2], 0);
      const MatrixXd R = ricci_bruteforce(ds, G);
      const double b1 = -2 * R(0, 0), b2 = -2 * R(ds.n, ds.n), b3 = -2 * R(2 * ds.n, 2 * ds.n);
      worst = std::max({worst, std::abs(v[0] - b1), std::abs(v[1] - b2), std::abs(v[2] - b3)});
    }
    out.push_back(verify_detail::check(tag + "flow vector field vs brute force", worst, opt.ricci_tol));
  }
  return out;
}

inline std::vector<CheckResult> verify_oracle(const Catalog& cat, const VerifyOptions& opt) {
  std::vector<CheckResult> all;
  for (auto c : oracle::all_embed_cases()) {
    auto part = verify_pair(cat, c, opt);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

}  // namespace ehhk
