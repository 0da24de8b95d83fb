#pragma once

// Ricci flow on diagonal metrics (x1, x2, x3): x_i' = -2 r_i x_i, and the
// volume-normalized flow x_i' = -2 (r_i - scal/dim) x_i, which keeps
// x1^n x2^n x3^d fixed and increases scal.

#include "ehhk/einstein_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace ehhk {

struct FlowState {
  std::array<double, 3> x{1, 1, 1};
  double t = 0;
};

enum class FlowStatus { ok, floor_hit, blow_up, step_underflow };

inline const char* to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::ok: return "ok";
    case FlowStatus::floor_hit: return "floor_hit";
    case FlowStatus::blow_up: return "blow_up";
    case FlowStatus::step_underflow: return "step_underflow";
  }
  return "?";
}

struct FlowOptions {
  double rtol = 1e-9;
  double atol = 1e-13;
  double floor = 1e-8;
  double ceiling = 1e8;
  double h0 = 1e-3;
  double h_min = 1e-14;
  long max_steps = 2'000'000;
};

// The flow keeps a single x3 only when every p3 block has the same r3.
inline void require_flowable(const SpaceSpec& s) {
  for (const auto& b : s.blocks)
    if (b.a != s.blocks.front().a) throw UnsupportedSpace(s.id + ": diagonal flow needs a single Killing ratio");
}

inline std::array<double, 3> flow_field(const SpaceSpec& s, const std::array<double, 3>& x, bool normalized) {
  const auto r = ricci_diagonal(s, DiagonalMetric<double>{x[0], x[1], x[2]});
  double shift = 0;
  if (normalized) shift = (s.n * (r.r1 + r.r2) + s.d * r.r3.front()) / s.dim();
  return {-2 * (r.r1 - shift) * x[0], -2 * (r.r2 - shift) * x[1], -2 * (r.r3.front() - shift) * x[2]};
}

// Stage evaluations may leave the positive cone; NaN makes the step rejected.
inline std::array<double, 3> stage_field(const SpaceSpec& s, const std::array<double, 3>& x, bool normalized) {
  if (!(x[0] > 0 && x[1] > 0 && x[2] > 0)) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan};
  }
  return flow_field(s, x, normalized);
}

// Dormand-Prince 5(4) with FSAL and the standard step-size controller.
template <std::size_t N>
class DormandPrince {
 public:
  using State = std::array<double, N>;
  using Field = std::function<State(const State&)>;

  DormandPrince(Field f, FlowOptions opt) : f_(std::move(f)), opt_(opt) {}

  struct Step {
    State y;
    State k_last;
    double err;
  };

  // One trial step of size h from y with k1 = f(y).
  Step trial(const State& y, const State& k1, double h) const {
    static constexpr double a21 = 1.0 / 5, a31 = 3.0 / 40, a32 = 9.0 / 40, a41 = 44.0 / 45, a42 = -56.0 / 15,
                            a43 = 32.0 / 9, a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729, a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656, b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84, e1 = 71.0 / 57600,
                            e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                            e7 = -1.0 / 40;
    auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
      State out = y;
      for (const auto& [c, k] : terms)
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
      return out;
    };
    const State k2 = f_(comb({{a21, &k1}}));
    const State k3 = f_(comb({{a31, &k1}, {a32, &k2}}));
    const State k4 = f_(comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = f_(comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = f_(comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State y5 = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = f_(y5);
    double err = 0;
    for (std::size_t i = 0; i < N; ++i) {
      if (!std::isfinite(k7[i])) return {y5, k7, std::numeric_limits<double>::infinity()};
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    return {y5, k7, err};
  }

  const Field& field() const { return f_; }
  const FlowOptions& options() const { return opt_; }

 private:
  Field f_;
  FlowOptions opt_;
};

struct TrajectoryPoint {
  double t, x1, x2, x3, scal;
};

struct FlowResult {
  FlowState final;
  FlowStatus status = FlowStatus::ok;
  double halt_time = 0;  // time of the last accepted state
  long steps = 0;
  std::vector<TrajectoryPoint> trajectory;  // accepted steps, only when requested
};

namespace detail {

inline bool out_of_range(const std::array<double, 3>& x, const FlowOptions& o, FlowStatus& st) {
  for (double v : x) {
    if (!(v > o.floor)) {
      st = FlowStatus::floor_hit;
      return true;
    }
    if (!(v < o.ceiling)) {
      st = FlowStatus::blow_up;
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Integrates up to t_end (clamped exactly). Halts before any x_i drops to the floor.
inline FlowResult integrate(const SpaceSpec& s, FlowState start, double t_end, bool normalized,
                            const FlowOptions& opt = {}, bool record = false) {
  require_flowable(s);
  if (!(t_end >= start.t)) throw std::invalid_argument("integrate needs t_end >= t");
  FlowResult res;
  res.final = start;
  if (detail::out_of_range(start.x, opt, res.status)) {
    res.halt_time = start.t;
    return res;
  }
  DormandPrince<3> dp([&](const std::array<double, 3>& x) { return stage_field(s, x, normalized); }, opt);
  auto push = [&](const FlowState& st) {
    if (record)
      res.trajectory.push_back(
          {st.t, st.x[0], st.x[1], st.x[2], scalar_diagonal(s, DiagonalMetric<double>{st.x[0], st.x[1], st.x[2]})});
  };
  FlowState cur = start;
  push(cur);
  auto k1 = dp.field()(cur.x);
  double h = std::min(opt.h0, t_end - cur.t);
  while (cur.t < t_end) {
    if (res.steps >= opt.max_steps) {
      res.status = FlowStatus::step_underflow;
      break;
    }
    const bool last = h >= t_end - cur.t;
    if (last) h = t_end - cur.t;
    auto tr = dp.trial(cur.x, k1, h);
    bool bad = false;
    for (double v : tr.y) bad = bad || !std::isfinite(v) || !(v > 0);
    if (bad || tr.err > 1) {
      const double fac = bad ? 0.25 : std::max(0.2, 0.9 * std::pow(tr.err, -0.2));
      h *= fac;
      if (h < opt.h_min) {
        res.status = FlowStatus::step_underflow;
        break;
      }
      continue;
    }
    FlowStatus st = FlowStatus::ok;
    if (detail::out_of_range(tr.y, opt, st)) {
      res.status = st;
      break;
    }
    cur.x = tr.y;
    cur.t = last ? t_end : cur.t + h;
    k1 = tr.k_last;
    ++res.steps;
    push(cur);
    const double fac = tr.err == 0 ? 5.0 : std::min(5.0, 0.9 * std::pow(tr.err, -0.2));
    h *= fac;
  }
  res.final = cur;
  res.halt_time = cur.t;
  return res;
}

// One adaptive step of at most dt (the accepted size may be smaller).
inline FlowState flow_step(const SpaceSpec& s, const FlowState& st, double dt, bool normalized,
                           const FlowOptions& opt = {}) {
  if (!(dt > 0)) throw std::invalid_argument("flow_step needs dt > 0");
  require_flowable(s);
  DormandPrince<3> dp([&](const std::array<double, 3>& x) { return stage_field(s, x, normalized); }, opt);
  double h = dt;
  const auto k1 = dp.field()(st.x);
  while (true) {
    auto tr = dp.trial(st.x, k1, h);
    bool bad = false;
    for (double v : tr.y) bad = bad || !std::isfinite(v) || !(v > opt.floor);
    if (!bad && tr.err <= 1) return {tr.y, st.t + h};
    h *= bad ? 0.25 : std::max(0.2, 0.9 * std::pow(tr.err, -0.2));
    if (h < opt.h_min)
      throw std::runtime_error("flow_step: step size underflow at t = " + std::to_string(st.t));
  }
}

// Relative distance of (x1, x2, x3) from the homothety classes of normal
// metrics, which are exactly x3 = 2 x1 x2 / (x1 + x2).
inline double normal_curve_departure(const std::array<double, 3>& x) {
  const double h = 2 * x[0] * x[1] / (x[0] + x[1]);
  return std::abs(x[2] - h) / x[2];
}

inline std::array<double, 3> unit_volume_state(const SpaceSpec& s, const std::array<double, 3>& x) {
  const auto g = normalize_volume(s, DiagonalMetric<double>{x[0], x[1], x[2]});
  return {g.x1, g.x2, g.x3};
}

// Unnormalized flow augmented with tau' = V^(-1/dim), V = x1^n x2^n x3^d.
// Then g(t) V^(-1/dim) solves the normalized flow at time tau(t).
struct RescaledComparison {
  double tau = 0;
  std::array<double, 3> rescaled{};    // unnormalized state at t, brought to unit volume
  std::array<double, 3> normalized{};  // normalized flow at tau from the same start
  double max_rel_diff = 0;
};

inline RescaledComparison compare_rescaled(const SpaceSpec& s, const std::array<double, 3>& x0, double t_end,
                                           const FlowOptions& opt = {}) {
  require_flowable(s);
  const auto start = unit_volume_state(s, x0);
  DormandPrince<4> dp(
      [&](const std::array<double, 4>& y) {
        const auto v = stage_field(s, {y[0], y[1], y[2]}, false);
        const double logv = (s.n * (std::log(y[0]) + std::log(y[1])) + s.d * std::log(y[2])) / s.dim();
        return std::array<double, 4>{v[0], v[1], v[2], std::exp(-logv)};
      },
      opt);
  std::array<double, 4> y{start[0], start[1], start[2], 0};
  auto k1 = dp.field()(y);
  double t = 0, h = std::min(opt.h0, t_end);
  while (t < t_end) {
    const bool last = h >= t_end - t;
    if (last) h = t_end - t;
    auto tr = dp.trial(y, k1, h);
    bool bad = false;
    for (int i = 0; i < 3; ++i) bad = bad || !std::isfinite(tr.y[i]) || !(tr.y[i] > opt.floor);
    if (bad || tr.err > 1) {
      h *= bad ? 0.25 : std::max(0.2, 0.9 * std::pow(tr.err, -0.2));
      if (h < opt.h_min) throw std::runtime_error("compare_rescaled: step size underflow");
      continue;
    }
    y = tr.y;
    k1 = tr.k_last;
    t = last ? t_end : t + h;
    h *= tr.err == 0 ? 5.0 : std::min(5.0, 0.9 * std::pow(tr.err, -0.2));
  }
  RescaledComparison cmp;
  cmp.tau = y[3];
  cmp.rescaled = unit_volume_state(s, {y[0], y[1], y[2]});
  auto norm = integrate(s, {start, 0}, cmp.tau, true, opt);
  if (norm.status != FlowStatus::ok) throw std::runtime_error("compare_rescaled: normalized flow halted");
  cmp.normalized = norm.final.x;
  for (int i = 0; i < 3; ++i)
    cmp.max_rel_diff = std::max(cmp.max_rel_diff, std::abs(cmp.rescaled[i] - cmp.normalized[i]) / cmp.normalized[i]);
  return cmp;
}

// Largest drop of scal along a recorded trajectory (0 when non-decreasing).
inline double scal_monotonicity_violation(const std::vector<TrajectoryPoint>& tr) {
  double worst = 0;
  for (std::size_t i = 1; i < tr.size(); ++i)
    worst = std::max(worst, (tr[i - 1].scal - tr[i].scal) / std::max(1.0, std::abs(tr[i - 1].scal)));
  return worst;
}

// ---------------------------------------------------------------------------

enum class BasinLabel { near_g_plus, near_g_minus, escapes, floor_hit, undecided };

inline const char* to_string(BasinLabel b) {
  switch (b) {
    case BasinLabel::near_g_plus: return "near_g_plus";
    case BasinLabel::near_g_minus: return "near_g_minus";
    case BasinLabel::escapes: return "escapes";
    case BasinLabel::floor_hit: return "floor_hit";
    case BasinLabel::undecided: return "undecided";
  }
  return "?";
}

struct BasinGrid {
  double lo = 0.25, hi = 4.0;
  int steps = 9;
  double t_max = 50;
  double near = 1e-3;   // relative distance to a fixed point, unit volume
  double spread = 1e4;  // max/min of x_i beyond which the metric counts as degenerating
};

struct BasinCell {
  double x1, x2;  // start (x1, x2, x3) at unit volume
  BasinLabel label;
  std::array<double, 3> final;
};

inline double unit_volume_distance(const SpaceSpec& s, const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const auto ua = unit_volume_state(s, a), ub = unit_volume_state(s, b);
  double worst = 0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(ua[i] - ub[i]) / ub[i]);
  return worst;
}

inline BasinLabel classify_endpoint(const SpaceSpec& s, const FlowResult& r, const std::vector<EinsteinSolution>& sols,
                                    const BasinGrid& grid) {
  if (r.status == FlowStatus::floor_hit) return BasinLabel::floor_hit;
  if (r.status == FlowStatus::blow_up) return BasinLabel::escapes;
  const auto& x = r.final.x;
  for (const auto& sol : sols) {
    if (unit_volume_distance(s, x, {sol.x1, sol.x2, sol.x3}) < grid.near)
      return sol.label == SolutionLabel::g2_minus ? BasinLabel::near_g_minus : BasinLabel::near_g_plus;
  }
  const double mx = *std::max_element(x.begin(), x.end()), mn = *std::min_element(x.begin(), x.end());
  if (mx / mn > grid.spread) return BasinLabel::escapes;
  return BasinLabel::undecided;
}

inline std::vector<BasinCell> basin_sweep(const SpaceSpec& s, const BasinGrid& grid = {}) {
  require_flowable(s);
  const auto sols = solve_diagonal(s);
  if (sols.empty()) throw UnsupportedSpace(s.id + ": basin sweep needs diagonal Einstein metrics");
  if (grid.steps < 1 || !(grid.lo > 0) || !(grid.hi >= grid.lo))
    throw std::invalid_argument("basin grid needs steps >= 1 and 0 < lo <= hi");
  std::vector<BasinCell> cells;
  const double l0 = std::log(grid.lo), dl = grid.steps > 1 ? (std::log(grid.hi) - l0) / (grid.steps - 1) : 0;
  for (int i = 0; i < grid.steps; ++i)
    for (int j = 0; j < grid.steps; ++j) {
      const double x1 = std::exp(l0 + i * dl), x2 = std::exp(l0 + j * dl);
      const auto g = unit_volume(s, x1, x2);
      FlowOptions opt;
      opt.max_steps = 200'000;
      auto r = integrate(s, {{g.x1, g.x2, g.x3}, 0}, grid.t_max, true, opt);
      cells.push_back({x1, x2, classify_endpoint(s, r, sols, grid), r.final.x});
    }
  return cells;
}

}  // namespace ehhk
