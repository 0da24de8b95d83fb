// ehhk: catalog queries, Einstein metrics, stability, tables, oracle
// verification, scal_N surfaces and Ricci flow runs on H x H / Delta K.

#include "ehhk/stability.hpp"
#include "ehhk/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using ehhk::Catalog;
using ehhk::SpaceSpec;
using json = nlohmann::json;

constexpr int kExitOk = 0, kExitUsage = 1, kExitVerify = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Selector {
  std::string space;
  std::string family;
  std::optional<long> m, k;
  bool any() const { return !space.empty() || !family.empty(); }
};

struct RunConfig {
  Selector sel;
  std::string format = "csv";
  std::string out;
  std::string grid;
  std::uint64_t seed = 20240601;
  std::optional<double> tol;
};

// 6 significant digits for CSV.
std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

ehhk::Bindings bindings_of(const ehhk::CatalogEntry& e, const Selector& sel) {
  ehhk::Bindings b;
  for (const auto& p : e.params) {
    std::optional<long> v = p.name == "m" ? sel.m : p.name == "k" ? sel.k : std::nullopt;
    if (!v) throw UsageError(e.id + " needs --" + p.name);
    b[p.name] = *v;
  }
  return b;
}

SpaceSpec resolve_one(const Catalog& cat, const Selector& sel) {
  if (!sel.space.empty()) return cat.resolve(sel.space);
  if (!sel.family.empty()) {
    const auto& e = cat.at(sel.family);
    return ehhk::instantiate_family(e, bindings_of(e, sel));
  }
  throw UsageError("a space is required: --space ID or --family F --m M [--k K]");
}

std::string blocks_text(const SpaceSpec& s) {
  if (s.blocks.size() == 1) return ehhk::to_string(s.blocks[0].a);
  std::string out;
  for (const auto& b : s.blocks) out += (out.empty() ? "" : ";") + ehhk::to_string(b.a) + ":" + std::to_string(b.dim);
  return out;
}

std::string cond2_text(const SpaceSpec& s) {
  if (!s.flags.uniform_a && !s.flags.abelian_k) return "-";
  return ehhk::to_string(ehhk::existence_class(s));
}

// ---------------------------------------------------------------------------

int cmd_catalog(const Catalog& cat, const RunConfig& cfg, bool symmetric, std::optional<int> group) {
  std::vector<SpaceSpec> rows;
  if (!cfg.sel.space.empty()) {
    rows.push_back(cat.resolve(cfg.sel.space));
  } else if (!cfg.sel.family.empty()) {
    const auto& e = cat.at(cfg.sel.family);
    if (cfg.sel.m || cfg.sel.k) rows.push_back(ehhk::instantiate_family(e, bindings_of(e, cfg.sel)));
    else
      for (const auto& b : e.smallest_instances(3)) rows.push_back(ehhk::instantiate_family(e, b));
  } else {
    for (const auto& e : cat.entries) {
      if (symmetric && e.group != 1) continue;
      if (group && e.group != *group) continue;
      rows.push_back(ehhk::instantiate_family(e, e.smallest_instances(1).front()));
    }
  }
  Output out(cfg.out);
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& s : rows)
      arr.push_back({{"id", s.id},
                     {"family", s.family},
                     {"group", s.group},
                     {"dim_h", s.dim_h},
                     {"n", s.n},
                     {"d", s.d},
                     {"a", blocks_text(s)},
                     {"kappa", ehhk::to_string(s.kappa)},
                     {"rho", ehhk::to_string(s.rho)},
                     {"symmetric", s.flags.symmetric},
                     {"abelian", s.flags.abelian_k},
                     {"provisional", s.flags.provisional},
                     {"cond2", cond2_text(s)},
                     {"cond2_tabulated", ehhk::to_string(s.cond2_expected)}});
    out.os() << arr.dump(2) << "\n";
  } else {
    out.os() << "id,group,n,d,a,kappa,rho,cond2,cond2_tabulated\n";
    for (const auto& s : rows)
      out.os() << csv_field(s.id) << "," << s.group << "," << s.n << "," << s.d << "," << blocks_text(s) << ","
               << ehhk::to_string(s.kappa) << "," << ehhk::to_string(s.rho) << "," << cond2_text(s) << ","
               << ehhk::to_string(s.cond2_expected) << "\n";
  }
  return kExitOk;
}

json solution_json(const ehhk::EinsteinSolution& sol) {
  json j{{"label", ehhk::to_string(sol.label)},
         {"x1", sol.x1},
         {"x2", sol.x2},
         {"x3", sol.x3},
         {"x4", sol.x4},
         {"rho", sol.rho},
         {"scal_n", sol.scal_n},
         {"residual", sol.residual},
         {"double_root", sol.double_root}};
  j["isometric_to"] = sol.isometric_to ? json(ehhk::to_string(*sol.isometric_to)) : json(nullptr);
  return j;
}

std::vector<ehhk::EinsteinSolution> all_solutions(const SpaceSpec& s, bool diagonal_only) {
  if (!diagonal_only && s.flags.symmetric && !s.flags.abelian_k) return ehhk::classify_symmetric(s, true);
  if (!s.flags.uniform_a && !s.flags.abelian_k)
    throw ehhk::UnsupportedSpace(s.id + ": diagonal solver needs a single Killing ratio");
  return ehhk::solve_diagonal(s);
}

int cmd_einstein(const Catalog& cat, const RunConfig& cfg, bool diagonal_only) {
  const SpaceSpec s = resolve_one(cat, cfg.sel);
  const auto sols = all_solutions(s, diagonal_only);
  Output out(cfg.out);
  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& sol : sols) arr.push_back(solution_json(sol));
    out.os() << json{{"space", s.id}, {"solutions", arr}}.dump(2) << "\n";
  } else {
    out.os() << "label,x1,x2,x3,x4,rho,scal_n,residual\n";
    for (const auto& sol : sols)
      out.os() << ehhk::to_string(sol.label) << "," << num(sol.x1) << "," << num(sol.x2) << "," << num(sol.x3) << ","
               << num(sol.x4) << "," << num(sol.rho) << "," << num(sol.scal_n) << "," << num(sol.residual) << "\n";
  }
  return kExitOk;
}

int cmd_stability(const Catalog& cat, const RunConfig& cfg) {
  const SpaceSpec s = resolve_one(cat, cfg.sel);
  if (!s.flags.uniform_a && !s.flags.abelian_k)
    throw ehhk::UnsupportedSpace(s.id + ": stability needs a single Killing ratio");
  const auto sols = ehhk::solve_diagonal(s);
  std::vector<ehhk::StabilityReport> reps;
  for (const auto& sol : sols) reps.push_back(ehhk::stability_report(s, sol));
  Output out(cfg.out);
  if (cfg.format == "json") {
    json arr = json::array();
    for (std::size_t i = 0; i < reps.size(); ++i) {
      const auto& r = reps[i];
      json L = json::array();
      for (int a = 0; a < 3; ++a) L.push_back({r.L(a, 0), r.L(a, 1), r.L(a, 2)});
      arr.push_back({{"label", ehhk::to_string(r.label)},
                     {"x", sols[i].x1},
                     {"L", L},
                     {"lambda1", r.lambda1},
                     {"lambda2", r.lambda2},
                     {"two_rho", r.two_rho},
                     {"classification", ehhk::to_string(r.classification)}});
    }
    json j{{"space", s.id}, {"reports", arr}};
    if (!s.flags.abelian_k && !sols.empty() && !sols.front().double_root) {
      const auto ex = ehhk::exact_stability(s);
      j["exact"] = {{"minus_ok", ex.minus_ok}, {"plus_ok", ex.plus_ok}};
    }
    out.os() << j.dump(2) << "\n";
  } else {
    out.os() << "label,x,lambda1,lambda2,two_rho,classification\n";
    for (std::size_t i = 0; i < reps.size(); ++i)
      out.os() << ehhk::to_string(reps[i].label) << "," << num(sols[i].x1) << "," << num(reps[i].lambda1) << ","
               << num(reps[i].lambda2) << "," << num(reps[i].two_rho) << "," << ehhk::to_string(reps[i].classification)
               << "\n";
  }
  return kExitOk;
}

// Rows of the two scal_N tables: computed from the solvers, 4 decimals.
int cmd_tables(const Catalog& cat, const RunConfig& cfg, const std::string& which) {
  using ehhk::SolutionLabel;
  const bool first = which == "sc1";
  if (!first && which != "sc2") throw UsageError("tables: expected sc1 or sc2");
  const std::vector<std::string> params = first ? std::vector<std::string>{"SU(m)/SO(m)", "SO(2m)/SO(m)xSO(m)"}
                                                : std::vector<std::string>{"SU(2m)/Sp(m)", "SO(m)/SO(m-1)", "Sp(2m)/Sp(m)xSp(m)"};
  const std::vector<std::string> sporadic = first ? std::vector<std::string>{"G2/SU(2)xSU(2)", "E6/Sp(4)", "E7/SU(8)", "E8/SO(16)"}
                                                  : std::vector<std::string>{"F4/SO(9)", "E6/F4"};
  std::vector<SpaceSpec> rows;
  for (const auto& f : params) {
    const auto& e = cat.at(f);
    const long lo = f == "SU(m)/SO(m)" ? 3 : e.params.front().min;
    const long m = cfg.sel.m.value_or(lo);
    if (m < lo) continue;
    rows.push_back(ehhk::instantiate_family(e, {{"m", m}}));
  }
  for (const auto& id : sporadic) rows.push_back(cat.resolve(id));

  Output out(cfg.out);
  out.os() << (first ? "space,g1,g2,g5\n" : "space,g3,g5\n");
  for (const auto& s : rows) {
    const auto sols = ehhk::classify_symmetric(s, true);
    auto v = [&](SolutionLabel l) { return fixed4(ehhk::find_label(sols, l)->scal_n); };
    out.os() << csv_field(s.id) << ",";
    if (first) out.os() << v(SolutionLabel::g1_plus) << "," << v(SolutionLabel::g2_minus) << "," << v(SolutionLabel::g5) << "\n";
    else out.os() << v(SolutionLabel::g3) << "," << v(SolutionLabel::g5) << "\n";
  }
  return kExitOk;
}

int cmd_verify(const Catalog& cat, const RunConfig& cfg, const std::string& level) {
  ehhk::VerifyOptions opt;
  if (level == "full") opt.level = ehhk::VerifyLevel::full;
  else if (level != "fast") throw UsageError("verify: --level must be fast or full");
  opt.seed = cfg.seed;
  if (cfg.tol) opt.ricci_tol = opt.residual_tol = *cfg.tol;
  const auto results = ehhk::verify_oracle(cat, opt);
  Output out(cfg.out);
  bool ok = true;
  for (const auto& r : results) {
    out.os() << (r.ok ? "PASS " : "FAIL ") << r.name << "  value=" << num(r.value) << " tol=" << num(r.tol);
    if (!r.detail.empty()) out.os() << "  [" << r.detail << "]";
    out.os() << "\n";
    if (!r.ok && ok) std::cerr << "first failure: " << r.name << ": value " << r.value << " exceeds " << r.tol << "\n";
    ok = ok && r.ok;
  }
  return ok ? kExitOk : kExitVerify;
}

struct Grid {
  double lo, hi;
  int steps;
};

// "lo:hi:steps", or just "steps".
Grid parse_grid(const std::string& text, Grid dflt) {
  if (text.empty()) return dflt;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  try {
    if (parts.size() == 1) return {dflt.lo, dflt.hi, std::stoi(parts[0])};
    if (parts.size() == 3) return {std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2])};
  } catch (const std::exception&) {
  }
  throw UsageError("--grid expects STEPS or LO:HI:STEPS, got '" + text + "'");
}

int cmd_surface(const Catalog& cat, const RunConfig& cfg, bool slice) {
  const SpaceSpec s = resolve_one(cat, cfg.sel);
  Output out(cfg.out);
  if (slice) {
    // scal_N along x1 = x2 = x, x3 = 1, and the sign of its derivative.
    const Grid g = parse_grid(cfg.grid, {0.05, 20.0, 400});
    if (g.steps < 2 || !(g.lo > 0) || !(g.hi > g.lo)) throw UsageError("--grid needs 0 < lo < hi and steps >= 2");
    out.os() << "x,scal_n,ds_sign\n";
    for (int i = 0; i < g.steps; ++i) {
      const double x = std::exp(std::log(g.lo) + i * (std::log(g.hi) - std::log(g.lo)) / (g.steps - 1));
      out.os() << num(x) << "," << num(ehhk::s_curve(s, x)) << "," << ehhk::sign(ehhk::s_prime_numerator(s, x)) << "\n";
    }
    return kExitOk;
  }
  const Grid g = parse_grid(cfg.grid, {0.2, 5.0, 41});
  const auto pts = ehhk::scal_surface(s, g.lo, g.hi, g.steps);
  out.os() << "x1,x2,x3,scal_n\n";
  for (const auto& p : pts)
    out.os() << num(p.x1) << "," << num(p.x2) << "," << num(ehhk::unit_volume(s, p.x1, p.x2).x3) << "," << num(p.scal_n)
             << "\n";
  return kExitOk;
}

int cmd_flow(const Catalog& cat, const RunConfig& cfg, std::array<double, 3> x0, double t_end, bool normalized) {
  const SpaceSpec s = resolve_one(cat, cfg.sel);
  ehhk::FlowOptions opt;
  if (cfg.tol) opt.rtol = *cfg.tol;
  const auto res = ehhk::integrate(s, {x0, 0}, t_end, normalized, opt, true);
  Output out(cfg.out);
  out.os() << "t,x1,x2,x3,scal\n";
  for (const auto& p : res.trajectory)
    out.os() << num(p.t) << "," << num(p.x1) << "," << num(p.x2) << "," << num(p.x3) << "," << num(p.scal) << "\n";
  if (res.status != ehhk::FlowStatus::ok)
    std::cerr << "flow halted: " << ehhk::to_string(res.status) << " at t = " << res.halt_time << "\n";
  return kExitOk;
}

int cmd_basin(const Catalog& cat, const RunConfig& cfg, double t_max) {
  const SpaceSpec s = resolve_one(cat, cfg.sel);
  ehhk::BasinGrid bg;
  const Grid g = parse_grid(cfg.grid, {bg.lo, bg.hi, bg.steps});
  bg.lo = g.lo;
  bg.hi = g.hi;
  bg.steps = g.steps;
  bg.t_max = t_max;
  const auto cells = ehhk::basin_sweep(s, bg);
  Output out(cfg.out);
  out.os() << "x1,x2,label,final_x1,final_x2,final_x3\n";
  for (const auto& c : cells)
    out.os() << num(c.x1) << "," << num(c.x2) << "," << ehhk::to_string(c.label) << "," << num(c.final[0]) << ","
             << num(c.final[1]) << "," << num(c.final[2]) << "\n";
  return kExitOk;
}

void add_selector(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--space,--id", cfg.sel.space, "catalog id, or family[m=..,k=..]");
  sub->add_option("--family", cfg.sel.family, "family id, with --m/--k");
  sub->add_option("--m", cfg.sel.m, "family parameter m");
  sub->add_option("--k", cfg.sel.k, "family parameter k");
}

void add_output(CLI::App* sub, RunConfig& cfg, bool with_format) {
  sub->add_option("--out", cfg.out, "output file (default stdout)");
  if (with_format) sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Einstein metrics on H x H / Delta K"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string catalog_path;
  app.add_option("--catalog", catalog_path, "catalog file (default: $EHHK_CATALOG or the bundled one)");

  auto* catalog = app.add_subcommand("catalog", "list spaces with n, d, a, kappa, rho and the existence condition");
  bool symmetric = false;
  std::optional<int> group;
  add_selector(catalog, cfg);
  catalog->add_flag("--symmetric", symmetric, "irreducible symmetric rows only");
  catalog->add_option("--group", group, "catalog group (1-8)");
  add_output(catalog, cfg, true);

  auto* einstein = app.add_subcommand("einstein", "invariant Einstein metrics of a space");
  bool diagonal_only = false;
  add_selector(einstein, cfg);
  einstein->add_flag("--diagonal-only", diagonal_only, "only metrics diagonal in p1, p2, p3");
  add_output(einstein, cfg, true);

  auto* stability = app.add_subcommand("stability", "L matrix, eigenvalues and G-stability type");
  add_selector(stability, cfg);
  add_output(stability, cfg, true);

  auto* tables = app.add_subcommand("tables", "normalized scalar curvature tables (sc1: a < 1/2, sc2: a > 1/2)");
  std::string which;
  tables->add_option("which", which, "sc1 or sc2")->required()->check(CLI::IsMember({"sc1", "sc2"}));
  tables->add_option("--m", cfg.sel.m, "parameter for the family rows");
  add_output(tables, cfg, false);

  auto* verify = app.add_subcommand("verify", "closed forms against the brute-force Lie algebra oracle");
  std::string level = "fast";
  verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--seed", cfg.seed, "random metric seed");
  verify->add_option("--tol", cfg.tol, "Ricci and residual tolerance");
  add_output(verify, cfg, false);

  auto* surface = app.add_subcommand("surface", "scal_N over unit-volume diagonal metrics");
  bool slice = false;
  add_selector(surface, cfg);
  surface->add_option("--grid", cfg.grid, "STEPS or LO:HI:STEPS (log-spaced)");
  surface->add_flag("--diagonal-slice", slice, "the curve x1 = x2 only, with the sign of the derivative");
  add_output(surface, cfg, false);

  auto* flow = app.add_subcommand("flow", "Ricci flow trajectory on diagonal metrics");
  std::array<double, 3> x0{1, 1, 1};
  double t_end = 10;
  bool normalized = false;
  add_selector(flow, cfg);
  flow->add_option("--x1", x0[0], "initial x1")->check(CLI::PositiveNumber);
  flow->add_option("--x2", x0[1], "initial x2")->check(CLI::PositiveNumber);
  flow->add_option("--x3", x0[2], "initial x3")->check(CLI::PositiveNumber);
  flow->add_option("--t-end", t_end, "final time")->check(CLI::NonNegativeNumber);
  flow->add_flag("--normalized", normalized, "volume-normalized flow");
  flow->add_option("--tol", cfg.tol, "relative tolerance of the integrator");
  add_output(flow, cfg, false);

  auto* basin = app.add_subcommand("basin", "terminal behavior of the normalized flow over a grid");
  double t_max = 50;
  add_selector(basin, cfg);
  basin->add_option("--grid", cfg.grid, "STEPS or LO:HI:STEPS (log-spaced)");
  basin->add_option("--t-max", t_max, "integration time per cell")->check(CLI::PositiveNumber);
  add_output(basin, cfg, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Catalog cat = ehhk::load_catalog(catalog_path.empty() ? ehhk::default_catalog_path() : catalog_path);
    if (*catalog) return cmd_catalog(cat, cfg, symmetric, group);
    if (*einstein) return cmd_einstein(cat, cfg, diagonal_only);
    if (*stability) return cmd_stability(cat, cfg);
    if (*tables) return cmd_tables(cat, cfg, which);
    if (*verify) return cmd_verify(cat, cfg, level);
    if (*surface) return cmd_surface(cat, cfg, slice);
    if (*flow) return cmd_flow(cat, cfg, x0, t_end, normalized);
    if (*basin) return cmd_basin(cat, cfg, t_max);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {  // RangeError, UnsupportedSpace
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerify;
  }
  return kExitUsage;
}
