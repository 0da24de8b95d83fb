#pragma once

#include "ehhk/expr.hpp"
#include "ehhk/rational.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ehhk {

enum class Cond2 { yes, no, equality, untabulated };

inline const char* to_string(Cond2 c) {
  switch (c) {
    case Cond2::yes: return "yes";
    case Cond2::no: return "no";
    case Cond2::equality: return "equality";
    case Cond2::untabulated: return "-";
  }
  return "?";
}

struct KillingBlock {
  Rational a;
  long dim = 0;
};

struct SpaceFlags {
  bool symmetric = false;
  bool abelian_k = false;
  bool uniform_a = false;
  bool provisional = false;
};

struct SpaceSpec {
  std::string id;
  std::string family;                 // catalog row id; equals id for sporadic rows
  std::vector<std::pair<std::string, long>> params;
  int group = 0;                      // 0: ungrouped
  long dim_h = 0, d = 0, n = 0;
  std::vector<KillingBlock> blocks;   // center (a = 0) first when present
  Rational kappa, rho;
  SpaceFlags flags;
  Cond2 cond2_expected = Cond2::untabulated;

  long dim() const { return 2 * n + d; }

  // Common Killing ratio; throws unless flags.uniform_a.
  Rational a() const {
    if (!flags.uniform_a) throw UnsupportedSpace(id + ": Killing ratios are not uniform");
    return blocks.front().a;
  }

  // Uniform ratio, or the stored mean ratio of a provisional row.
  Rational effective_a() const {
    if (flags.uniform_a || flags.provisional) return blocks.front().a;
    throw UnsupportedSpace(id + ": Killing ratios are not uniform");
  }

  Rational S() const {
    Rational s = 0;
    for (const auto& b : blocks) s += b.a * b.dim;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Catalog rows

struct ParamRange {
  std::string name;
  long min = 0;
  bool simple_dim = false;  // value must be the dimension of a compact simple Lie algebra
};

inline bool is_simple_lie_dim(long v) {
  for (long k : {14L, 52L, 78L, 133L, 248L})
    if (v == k) return true;
  for (long m = 2; m * m - 1 <= v; ++m)
    if (m * m - 1 == v) return true;                         // su(m)
  for (long m = 5; m * (m - 1) / 2 <= v; ++m)
    if (m * (m - 1) / 2 == v) return true;                   // so(m)
  for (long m = 1; m * (2 * m + 1) <= v; ++m)
    if (m * (2 * m + 1) == v) return true;                   // sp(m)
  return false;
}

struct Cond2Rule {
  struct Cmp {
    std::string var;
    std::string op;
    long value = 0;
    bool holds(const Bindings& b) const {
      auto it = b.find(var);
      if (it == b.end()) return false;
      long x = it->second;
      if (op == "=") return x == value;
      if (op == ">=") return x >= value;
      if (op == "<=") return x <= value;
      if (op == ">") return x > value;
      return x < value;
    }
  };
  struct Clause {
    Cond2 value = Cond2::untabulated;
    std::vector<Cmp> when;
  };
  std::vector<Clause> clauses;

  Cond2 eval(const Bindings& b) const {
    for (const auto& c : clauses)
      if (std::all_of(c.when.begin(), c.when.end(), [&](const Cmp& p) { return p.holds(b); }))
        return c.value;
    return Cond2::untabulated;
  }
};

struct CatalogEntry {
  std::string id;
  std::vector<ParamRange> params;
  std::string dim_h_expr, d_expr, n_expr;
  std::vector<std::pair<std::string, std::string>> block_exprs;  // (a-expr, dim-expr)
  bool explicit_blocks = false;
  int group = 0;
  bool symmetric = false, abelian = false, provisional = false;
  Cond2Rule cond2;
  int line = 0;

  bool is_family() const { return !params.empty(); }

  bool in_range(const Bindings& b) const {
    for (const auto& p : params) {
      auto it = b.find(p.name);
      if (it == b.end() || it->second < p.min) return false;
      if (p.simple_dim && !is_simple_lie_dim(it->second)) return false;
    }
    return b.size() == params.size();
  }

  // Valid values of one parameter, ascending from its lower bound.
  std::vector<long> smallest_values(const ParamRange& p, std::size_t count) const {
    std::vector<long> out;
    for (long v = p.min; out.size() < count; ++v)
      if (!p.simple_dim || is_simple_lie_dim(v)) out.push_back(v);
    return out;
  }

  // `count` smallest instances per parameter (a grid for two parameters).
  std::vector<Bindings> smallest_instances(std::size_t count = 3) const {
    std::vector<Bindings> out{Bindings{}};
    for (const auto& p : params) {
      std::vector<Bindings> next;
      for (const auto& b : out)
        for (long v : smallest_values(p, count)) {
          Bindings nb = b;
          nb[p.name] = v;
          next.push_back(std::move(nb));
        }
      out = std::move(next);
    }
    return out;
  }
};

struct CatalogError : std::runtime_error {
  int line;
  CatalogError(int l, const std::string& msg)
      : std::runtime_error("catalog line " + std::to_string(l) + ": " + msg), line(l) {}
};

struct RangeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

inline long parse_long(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CatalogError(line, "expected integer, got '" + s + "'");
  }
}

inline Cond2 parse_cond2_value(const std::string& s, int line) {
  if (s == "yes") return Cond2::yes;
  if (s == "no") return Cond2::no;
  if (s == "eq") return Cond2::equality;
  if (s == "-") return Cond2::untabulated;
  throw CatalogError(line, "unknown cond2 value '" + s + "'");
}

inline Cond2Rule parse_cond2(const std::string& text, int line) {
  Cond2Rule rule;
  for (const auto& part : split(text, ';')) {
    Cond2Rule::Clause clause;
    auto at = part.find('@');
    clause.value = parse_cond2_value(trim(part.substr(0, at)), line);
    if (at != std::string::npos) {
      for (const auto& c : split(part.substr(at + 1), '&')) {
        Cond2Rule::Cmp cmp;
        std::size_t i = 0;
        while (i < c.size() && std::isalpha(static_cast<unsigned char>(c[i]))) ++i;
        cmp.var = c.substr(0, i);
        std::size_t j = i;
        while (j < c.size() && std::string("<>=").find(c[j]) != std::string::npos) ++j;
        cmp.op = c.substr(i, j - i);
        if (cmp.var.empty() || (cmp.op != "=" && cmp.op != ">=" && cmp.op != "<=" &&
                                cmp.op != ">" && cmp.op != "<"))
          throw CatalogError(line, "bad cond2 condition '" + c + "'");
        cmp.value = parse_long(c.substr(j), line);
        clause.when.push_back(cmp);
      }
    }
    rule.clauses.push_back(std::move(clause));
  }
  return rule;
}

inline std::vector<ParamRange> parse_params(const std::string& text, int line) {
  std::vector<ParamRange> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ';')) {
    ParamRange p;
    std::string body = part;
    auto colon = body.find(':');
    if (colon != std::string::npos) {
      if (trim(body.substr(colon + 1)) != "simple")
        throw CatalogError(line, "unknown parameter qualifier in '" + part + "'");
      p.simple_dim = true;
      body = trim(body.substr(0, colon));
    }
    auto ge = body.find(">=");
    if (ge == std::string::npos) throw CatalogError(line, "expected name>=min in '" + part + "'");
    p.name = trim(body.substr(0, ge));
    p.min = parse_long(trim(body.substr(ge + 2)), line);
    out.push_back(p);
  }
  return out;
}

inline Rational eval_field(const CatalogEntry& e, const std::string& field, const std::string& src,
                           const Bindings& b) {
  try {
    return eval_expr(src, b);
  } catch (const ExprError& err) {
    throw CatalogError(e.line, field + ": " + err.what());
  }
}

inline long eval_integer(const CatalogEntry& e, const std::string& field, const std::string& src,
                         const Bindings& b) {
  Rational v = eval_field(e, field, src, b);
  if (boost::multiprecision::denominator(v) != 1)
    throw InvariantError(field, e.id + ": " + field + " = " + to_string(v) + " is not an integer");
  return boost::multiprecision::numerator(v).convert_to<long>();
}

}  // namespace detail

// Checks every SpaceSpec invariant; throws InvariantError naming the field.
inline void validate(const SpaceSpec& s) {
  auto bad = [&](const std::string& field, const std::string& msg) {
    throw InvariantError(field, s.id + ": " + msg);
  };
  if (s.n <= 0) bad("n", "n must be positive");
  if (s.d <= 0) bad("d", "d must be positive");
  if (s.n + s.d != s.dim_h)
    bad("dim_h", "n + d = " + std::to_string(s.n + s.d) + " but dim_h = " + std::to_string(s.dim_h));
  long total = 0;
  for (const auto& b : s.blocks) {
    if (b.dim <= 0) bad("a", "block dimension must be positive");
    if (b.a < 0 || b.a >= 1) bad("a", "Killing ratio " + to_string(b.a) + " outside [0, 1)");
    total += b.dim;
  }
  if (total != s.d) bad("a", "block dimensions sum to " + std::to_string(total) + ", not d");
  if (s.kappa <= 0 || s.kappa > Rational(1) / 2)
    bad("kappa", "kappa = " + to_string(s.kappa) + " outside (0, 1/2]");
  if ((s.kappa == Rational(1) / 2) != s.flags.symmetric)
    bad("kappa", "kappa = " + to_string(s.kappa) + " inconsistent with symmetric flag");
  if (s.rho != (s.kappa + Rational(1) / 2) / 2) bad("rho", "rho != (kappa + 1/2)/2");
  if (s.flags.uniform_a && s.kappa * s.n != (1 - s.blocks.front().a) * s.d)
    bad("kappa", "kappa*n != (1-a)*d");
}

inline SpaceSpec instantiate_family(const CatalogEntry& e, const Bindings& b) {
  if (!e.in_range(b)) {
    std::string want;
    for (const auto& p : e.params)
      want += (want.empty() ? "" : ", ") + p.name + ">=" + std::to_string(p.min) +
              (p.simple_dim ? " (simple Lie algebra dimension)" : "");
    throw RangeError(e.id + ": parameters out of range (need " + (want.empty() ? "none" : want) + ")");
  }
  SpaceSpec s;
  s.family = e.id;
  s.group = e.group;
  s.id = e.id;
  if (e.is_family()) {
    s.id += "[";
    for (std::size_t i = 0; i < e.params.size(); ++i) {
      long v = b.at(e.params[i].name);
      s.params.emplace_back(e.params[i].name, v);
      s.id += (i ? "," : "") + e.params[i].name + "=" + std::to_string(v);
    }
    s.id += "]";
  }
  s.dim_h = detail::eval_integer(e, "dim_h", e.dim_h_expr, b);
  s.d = detail::eval_integer(e, "d", e.d_expr, b);
  s.n = detail::eval_integer(e, "n", e.n_expr, b);
  if (e.explicit_blocks) {
    for (const auto& [a, dim] : e.block_exprs)
      s.blocks.push_back({detail::eval_field(e, "a", a, b), detail::eval_integer(e, "a", dim, b)});
  } else {
    s.blocks.push_back({detail::eval_field(e, "a", e.block_exprs.front().first, b), s.d});
  }
  s.flags.symmetric = e.symmetric;
  s.flags.provisional = e.provisional;
  s.flags.abelian_k = std::all_of(s.blocks.begin(), s.blocks.end(),
                                  [](const KillingBlock& k) { return k.a == 0; });
  if (e.abelian && !s.flags.abelian_k) throw InvariantError("a", s.id + ": abelian row with a != 0");
  s.flags.uniform_a = !e.provisional && std::all_of(s.blocks.begin(), s.blocks.end(),
                                                    [&](const KillingBlock& k) { return k.a == s.blocks.front().a; });
  for (std::size_t i = 1; i < s.blocks.size(); ++i)
    if (s.blocks[i].a == 0) throw InvariantError("a", s.id + ": center block must come first");
  Rational tr = 0;
  for (const auto& k : s.blocks) tr += (1 - k.a) * k.dim;
  s.kappa = tr / s.n;
  s.rho = (s.kappa + Rational(1) / 2) / 2;
  s.cond2_expected = e.cond2.eval(b);
  validate(s);
  return s;
}

class Catalog {
 public:
  std::vector<CatalogEntry> entries;

  const CatalogEntry* find(const std::string& id) const {
    for (const auto& e : entries)
      if (e.id == id) return &e;
    return nullptr;
  }

  const CatalogEntry& at(const std::string& id) const {
    if (auto* e = find(id)) return *e;
    throw std::out_of_range("unknown space '" + id + "'");
  }

  SpaceSpec spec(const std::string& id, const Bindings& b = {}) const {
    return instantiate_family(at(id), b);
  }

  // Accepts a sporadic id or `family[m=3,k=8]`.
  SpaceSpec resolve(const std::string& text) const {
    if (find(text)) return spec(text);
    auto lb = text.rfind('[');
    if (lb == std::string::npos || text.back() != ']') throw std::out_of_range("unknown space '" + text + "'");
    Bindings b;
    for (const auto& kv : detail::split(text.substr(lb + 1, text.size() - lb - 2), ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::out_of_range("bad parameter '" + kv + "' in '" + text + "'");
      try {
        b[detail::trim(kv.substr(0, eq))] = std::stol(kv.substr(eq + 1));
      } catch (const std::exception&) {
        throw std::out_of_range("bad parameter '" + kv + "' in '" + text + "'");
      }
    }
    return spec(text.substr(0, lb), b);
  }

  // One SpaceSpec per sporadic row plus the smallest instances of each family.
  std::vector<SpaceSpec> sample(std::size_t per_family = 3) const {
    std::vector<SpaceSpec> out;
    for (const auto& e : entries)
      for (const auto& b : e.smallest_instances(per_family)) out.push_back(instantiate_family(e, b));
    return out;
  }
};

inline Catalog parse_catalog(std::istream& in) {
  Catalog cat;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string text = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    auto cols = detail::split(text, '|');
    if (cols.size() != 8)
      throw CatalogError(line, "expected 8 '|'-separated columns, got " + std::to_string(cols.size()));
    CatalogEntry e;
    e.line = line;
    e.id = cols[0];
    if (e.id.empty()) throw CatalogError(line, "empty id");
    if (cat.find(e.id)) throw CatalogError(line, "duplicate id '" + e.id + "'");
    e.params = detail::parse_params(cols[1], line);
    e.dim_h_expr = cols[2];
    e.d_expr = cols[3];
    e.n_expr = cols[4];
    if (cols[5].find(':') != std::string::npos) {
      e.explicit_blocks = true;
      for (const auto& blk : detail::split(cols[5], ';')) {
        auto colon = blk.find(':');
        if (colon == std::string::npos) throw CatalogError(line, "expected a_l:d_l in '" + blk + "'");
        e.block_exprs.emplace_back(detail::trim(blk.substr(0, colon)), detail::trim(blk.substr(colon + 1)));
      }
    } else {
      e.block_exprs.emplace_back(cols[5], cols[3]);
    }
    for (const auto& f : detail::split(cols[6], ',')) {
      if (f == "symmetric") e.symmetric = true;
      else if (f == "abelian") e.abelian = true;
      else if (f == "provisional") e.provisional = true;
      else if (f.rfind("group=", 0) == 0) {
        std::string g = f.substr(6);
        e.group = g == "x" ? 0 : static_cast<int>(detail::parse_long(g, line));
        if (e.group < 0 || e.group > 8) throw CatalogError(line, "group out of range");
      } else if (!f.empty()) {
        throw CatalogError(line, "unknown flag '" + f + "'");
      }
    }
    e.cond2 = detail::parse_cond2(cols[7], line);
    // Validate eagerly at the smallest admissible parameters.
    try {
      for (const auto& b : e.smallest_instances(1)) instantiate_family(e, b);
    } catch (const InvariantError& err) {
      throw InvariantError(err.field, "catalog line " + std::to_string(line) + ": " + err.what());
    }
    cat.entries.push_back(std::move(e));
  }
  std::stable_sort(cat.entries.begin(), cat.entries.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
    auto key = [](int g) { return g == 0 ? 99 : g; };
    return key(a.group) < key(b.group);
  });
  return cat;
}

inline Catalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalog '" + path + "'");
  return parse_catalog(in);
}

// EHHK_CATALOG overrides the compiled-in default.
inline std::string default_catalog_path() {
  if (const char* env = std::getenv("EHHK_CATALOG"); env && *env) return env;
#ifdef EHHK_DEFAULT_CATALOG
  return EHHK_DEFAULT_CATALOG;
#else
  return "data/catalog.psv";
#endif
}

// ---------------------------------------------------------------------------
// Existence of diagonal Einstein metrics

struct Existence {
  bool strict = false;
  bool equality = false;
  Rational discriminant;  // (2k+1)^2 - 8a(1-a+k); zero for abelian K
};

inline Rational discriminant(const Rational& a, const Rational& kappa) {
  return (2 * kappa + 1) * (2 * kappa + 1) - 8 * a * (1 - a + kappa);
}

inline Existence existence_condition(const SpaceSpec& s) {
  Existence e;
  if (s.flags.abelian_k) {
    e.strict = true;
    return e;
  }
  e.discriminant = discriminant(s.a(), s.kappa);
  e.strict = e.discriminant > 0;
  e.equality = e.discriminant == 0;
  return e;
}

inline Cond2 existence_class(const SpaceSpec& s) {
  auto e = existence_condition(s);
  return e.equality ? Cond2::equality : (e.strict ? Cond2::yes : Cond2::no);
}

struct Quadratic {
  Rational A, B, C;
  Rational operator()(const Rational& x) const { return (A * x + B) * x + C; }
};

// q(a) > 0 iff the existence condition holds strictly.
inline Quadratic quadratic_form_q(long n, long d) {
  Rational N(n), D(d);
  return {4 * (2 * N * N + 2 * N * D + D * D), -4 * (2 * N * N + 3 * N * D + 2 * D * D),
          (N + 2 * D) * (N + 2 * D)};
}

}  // namespace ehhk
