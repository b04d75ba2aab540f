#include "btl/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "btl/almost_invariant.hpp"
#include "toml.hpp"

namespace btl {

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Nonsingularity:
      return "nonsingularity";
    case Stage::Conservativeness:
      return "conservativeness";
    case Stage::Classification:
      return "classification";
    case Stage::MonteCarlo:
      return "mc";
  }
  return "?";
}

std::vector<Stage> all_stages() {
  return {Stage::Nonsingularity, Stage::Conservativeness, Stage::Classification, Stage::MonteCarlo};
}

namespace {

std::string join_fields(const std::vector<std::string>& fields) {
  std::string out = "invalid scenario:";
  for (const auto& f : fields) out += "\n  " + f;
  return out;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> fields)
    : ValidationError(join_fields(fields)), fields_(std::move(fields)) {}

bool Scenario::wants(Stage s) const { return std::find(stages.begin(), stages.end(), s) != stages.end(); }

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

namespace {

// Typed access to one TOML table; records bad and unknown fields under their dotted path.
class Reader {
 public:
  Reader(const toml::table* table, std::string path, std::vector<std::string>& errors)
      : table_(table), path_(std::move(path)), errors_(errors) {}

  bool present() const { return table_ != nullptr; }
  bool has(std::string_view key) {
    used_.insert(std::string(key));
    return table_ && table_->contains(key);
  }
  std::string field(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }
  void error(std::string_view key, const std::string& what) { errors_.push_back(field(key) + ": " + what); }

  std::optional<std::int64_t> integer(std::string_view key) {
    if (!has(key)) return std::nullopt;
    if (auto v = (*table_)[key].value_exact<std::int64_t>()) return *v;
    error(key, "expected an integer");
    return std::nullopt;
  }
  std::optional<double> real(std::string_view key) {
    if (!has(key)) return std::nullopt;
    const auto node = (*table_)[key];
    if (node.is_floating_point() || node.is_integer()) return node.value<double>();
    error(key, "expected a number");
    return std::nullopt;
  }
  std::optional<bool> boolean(std::string_view key) {
    if (!has(key)) return std::nullopt;
    if (auto v = (*table_)[key].value_exact<bool>()) return *v;
    error(key, "expected a boolean");
    return std::nullopt;
  }
  std::optional<std::string> string(std::string_view key) {
    if (!has(key)) return std::nullopt;
    if (auto v = (*table_)[key].value_exact<std::string>()) return *v;
    error(key, "expected a string");
    return std::nullopt;
  }
  template <class T>
  std::optional<std::vector<T>> array(std::string_view key) {
    if (!has(key)) return std::nullopt;
    const auto* arr = (*table_)[key].as_array();
    if (!arr) {
      error(key, "expected an array");
      return std::nullopt;
    }
    std::vector<T> out;
    for (const auto& item : *arr) {
      std::optional<T> v;
      if constexpr (std::is_same_v<T, double>) {
        if (item.is_floating_point() || item.is_integer()) v = item.template value<double>();
      } else {
        v = item.template value_exact<T>();
      }
      if (!v) {
        error(key, "array entries have the wrong type");
        return std::nullopt;
      }
      out.push_back(*v);
    }
    return out;
  }
  const toml::array* raw_array(std::string_view key) {
    if (!has(key)) return nullptr;
    const auto* arr = (*table_)[key].as_array();
    if (!arr) error(key, "expected an array");
    return arr;
  }
  Reader sub(std::string_view key) {
    if (!has(key)) return Reader(nullptr, field(key), errors_);
    const auto* t = (*table_)[key].as_table();
    if (!t) error(key, "expected a table");
    return Reader(t, field(key), errors_);
  }
  // Reports keys that no accessor asked for.
  void finish() {
    if (!table_) return;
    for (const auto& [k, v] : *table_)
      if (!used_.count(std::string(k.str()))) errors_.push_back(field(k.str()) + ": unknown field");
  }

 private:
  const toml::table* table_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

std::optional<FiniteGroup> finite_group(Reader r, std::vector<std::string>& errors) {
  if (!r.present()) return std::nullopt;
  std::optional<FiniteGroup> g;
  const auto n = r.integer("cyclic");
  const auto* table = r.raw_array("table");
  try {
    if (n && table) {
      r.error("cyclic", "give either cyclic or table");
    } else if (n) {
      if (*n < 1 || *n > 4096)
        r.error("cyclic", "order must lie in [1, 4096]");
      else
        g = FiniteGroup::cyclic(static_cast<int>(*n));
    } else if (table) {
      std::vector<std::vector<int>> rows;
      for (const auto& row : *table) {
        const auto* a = row.as_array();
        if (!a) throw ValidationError("rows must be arrays");
        std::vector<int> out;
        for (const auto& x : *a) {
          auto v = x.value_exact<std::int64_t>();
          if (!v) throw ValidationError("entries must be integers");
          out.push_back(static_cast<int>(*v));
        }
        rows.push_back(std::move(out));
      }
      g = FiniteGroup::from_table(std::move(rows));
    } else {
      errors.push_back(r.field("cyclic") + ": a finite group needs cyclic or table");
    }
  } catch (const std::exception& e) {
    r.error("table", e.what());
  }
  r.finish();
  return g;
}

std::vector<int> to_ints(const std::vector<std::int64_t>& v) { return {v.begin(), v.end()}; }

GroupPtr build_group(Reader r, std::vector<std::string>& errors, std::optional<std::vector<double>>& chain_cycle,
                     std::optional<double>& chain_lambda, std::optional<ShellRecipeKind>& chain_recipe,
                     int& chain_count) {
  if (!r.present()) {
    errors.push_back("group: missing table");
    return nullptr;
  }
  const auto family = r.string("family");
  GroupPtr group;
  try {
    if (!family) {
      r.error("family", "missing");
    } else if (*family == "lattice") {
      const auto dim = r.integer("dim").value_or(1);
      if (dim < 1 || dim > 8)
        r.error("dim", "must lie in [1, 8]");
      else
        group = make_lattice(static_cast<int>(dim));
    } else if (*family == "chain") {
      const auto moduli = to_ints(r.array<std::int64_t>("moduli").value_or(std::vector<std::int64_t>{2}));
      const auto rule = r.string("rule").value_or("dyadic");
      const auto count = r.integer("count");
      std::vector<std::int64_t> levels;
      if (rule == "explicit") {
        levels = r.array<std::int64_t>("levels").value_or(std::vector<std::int64_t>{});
        if (levels.empty()) r.error("levels", "explicit rule needs levels");
      } else if (rule == "kappa-growth") {
        const auto kappa = r.real("kappa");
        if (!kappa || !(*kappa > 0)) r.error("kappa", "kappa-growth rule needs kappa > 0");
        else levels = chain_levels_for_kappa(*kappa, static_cast<int>(count.value_or(8)), moduli.back());
      } else if (rule == "shell-recipe") {
        chain_cycle = r.array<double>("cycle");
        if (!chain_cycle || chain_cycle->empty()) r.error("cycle", "shell-recipe rule needs a value cycle");
        else levels = conservative_shell_levels(*chain_cycle, static_cast<int>(count.value_or(9)), moduli.back());
        chain_recipe = ShellRecipeKind::ShellEstimate;
      } else if (rule == "two-sided-recipe") {
        chain_lambda = r.real("lambda");
        if (!chain_lambda) r.error("lambda", "two-sided-recipe rule needs lambda");
        else levels = ii_infinity_chain_levels(*chain_lambda, static_cast<int>(count.value_or(6)));
        chain_recipe = ShellRecipeKind::IIInfinity;
      } else if (rule != "dyadic") {
        r.error("rule", "unknown chain rule '" + rule + "'");
      }
      chain_count = static_cast<int>(levels.size());
      group = make_group(LocallyFiniteChain{moduli, levels});
    } else if (*family == "afp") {
      auto a = finite_group(r.sub("a"), errors), b = finite_group(r.sub("b"), errors);
      auto c = r.has("c") ? finite_group(r.sub("c"), errors) : std::optional<FiniteGroup>(FiniteGroup::cyclic(1));
      const auto ca = to_ints(r.array<std::int64_t>("c_to_a").value_or(std::vector<std::int64_t>{0}));
      const auto cb = to_ints(r.array<std::int64_t>("c_to_b").value_or(std::vector<std::int64_t>{0}));
      for (const char* f : {"a", "b"})
        if (!r.has(f)) r.error(f, "required table");
      if (a && b && c) group = make_group(AmalgamatedProduct{*a, *b, *c, ca, cb});
    } else if (*family == "hnn") {
      auto a = finite_group(r.sub("a"), errors);
      auto c = r.has("c") ? finite_group(r.sub("c"), errors) : std::optional<FiniteGroup>(FiniteGroup::cyclic(1));
      const auto ca = to_ints(r.array<std::int64_t>("c_to_a").value_or(std::vector<std::int64_t>{0}));
      const auto alpha_raw = r.array<std::int64_t>("alpha");
      const auto alpha = alpha_raw ? to_ints(*alpha_raw) : ca;
      if (!r.has("a")) r.error("a", "required table");
      if (a && c) group = make_group(HnnExtension{*a, *c, ca, alpha});
    } else {
      r.error("family", "unknown family '" + *family + "'");
    }
  } catch (const BudgetError&) {
    throw;
  } catch (const std::exception& e) {
    errors.push_back("group: " + std::string(e.what()));
    group = nullptr;
  }
  r.finish();
  return group;
}

std::optional<AlmostInvariantSet> build_set(Reader r, const GroupPtr& group) {
  const auto kind = r.string("kind").value_or("default");
  const bool complement = r.boolean("complement").value_or(false);
  std::optional<AlmostInvariantSet> w;
  if (kind == "default") {
    w = construct_ai_set(group);
  } else if (kind == "half-line") {
    w = AlmostInvariantSet::half_line(group);
  } else if (kind == "afp-ends-at-identity") {
    w = AlmostInvariantSet::afp_ends_at_identity(group);
  } else if (kind == "hnn-ends-at-identity") {
    w = AlmostInvariantSet::hnn_ends_at_identity(group);
  } else if (kind == "lf-union") {
    const auto parity = r.string("parity").value_or("odd");
    const auto kappa = r.real("kappa").value_or(1.0);
    if (parity != "odd" && parity != "even") {
      r.error("parity", "must be odd or even");
    } else {
      const int want = parity == "odd" ? 1 : 0;
      w = construct_lf_ai_set(group, kappa, [want](int n) { return n % 2 == want; }, parity + " levels");
    }
  } else {
    r.error("kind", "unknown set '" + kind + "'");
  }
  r.finish();
  if (w && complement) w = w->complement();
  return w;
}

std::optional<MarginalProfile> build_profile(Reader r, const GroupPtr& group, std::vector<std::string>& errors,
                                             const std::optional<std::vector<double>>& chain_cycle,
                                             const std::optional<double>& chain_lambda,
                                             std::optional<ShellRecipeKind> chain_recipe, int chain_count,
                                             std::string& builtin) {
  if (!r.present()) {
    errors.push_back("profile: missing table");
    return std::nullopt;
  }
  builtin = r.string("builtin").value_or("");
  std::optional<MarginalProfile> p;
  auto need_real = [&](std::string_view key) -> std::optional<double> {
    auto v = r.real(key);
    if (!v) r.error(key, "required by builtin '" + builtin + "'");
    return v;
  };
  try {
    if (builtin.empty()) {
      r.error("builtin", "missing");
    } else if (builtin == "constant") {
      if (auto l = need_real("lambda")) p = constant_profile(group, *l);
    } else if (builtin == "candidate" || builtin == "two-value") {
      auto w = build_set(r.sub("set"), group);
      if (builtin == "candidate") {
        auto l = need_real("lambda");
        if (w && l) p = type_iii_lambda_candidate(*w, *l);
      } else {
        auto on = need_real("on"), off = need_real("off");
        if (w && on && off) p = two_value_profile(*w, *on, *off);
      }
    } else if (builtin == "shell") {
      auto cycle = r.array<double>("cycle");
      if (!cycle) cycle = chain_cycle;
      if (!cycle) {
        r.error("cycle", "required unless the chain rule is shell-recipe");
      } else {
        std::optional<ShellRecipe> recipe;
        if (chain_recipe == ShellRecipeKind::ShellEstimate && cycle == chain_cycle)
          recipe = ShellRecipe{ShellRecipeKind::ShellEstimate, chain_count, 0.5};
        p = shell_profile(group, *cycle, recipe);
      }
    } else if (builtin == "two-sided") {
      auto l = r.real("lambda");
      if (!l) l = chain_lambda;
      if (!l) r.error("lambda", "required unless the chain rule is two-sided-recipe");
      else p = ii_infinity_profile(group, *l, chain_count);
    } else if (builtin == "oscillating") {
      if (auto a = need_real("amplitude")) p = abelian_oscillating(group, *a);
    } else if (builtin == "power-decay") {
      auto a = need_real("amplitude"), e = need_real("exponent");
      if (a && e) p = power_decay(group, *a, *e);
    } else if (builtin == "geometric") {
      p = geometric_atomic(group);
    } else if (builtin == "table") {
      auto l = need_real("lambda");
      std::vector<std::pair<Element, double>> entries;
      if (const auto* arr = r.raw_array("entries")) {
        for (const auto& node : *arr) {
          const auto* t = node.as_table();
          auto e = t ? (*t)["element"].value<std::string>() : std::nullopt;
          auto v = t ? (*t)["value"].value<double>() : std::nullopt;
          if (!e || !v) {
            r.error("entries", "each entry needs element and value");
            continue;
          }
          entries.emplace_back(group->parse(*e), *v);
        }
      }
      if (l) p = table_profile(group, entries, *l);
    } else {
      r.error("builtin", "unknown builtin '" + builtin + "'");
    }
  } catch (const BudgetError&) {
    throw;
  } catch (const std::exception& e) {
    errors.push_back("profile: " + std::string(e.what()));
    p.reset();
  }
  r.finish();
  return p;
}

void check_radius(Reader& r, std::string_view key, std::optional<std::int64_t> v, const GroupPtr& group, int& out) {
  if (!v) return;
  if (*v < 0)
    r.error(key, "must be non-negative");
  else if (group && *v > group->attainable_radius())
    r.error(key, "exceeds the enumeration budget (attainable radius " + std::to_string(group->attainable_radius()) + ")");
  else
    out = static_cast<int>(*v);
}

void apply_overrides(toml::table& root, const ScenarioOverrides& o) {
  if (o.seed) {
    if (*o.seed <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      root.insert_or_assign("seed", static_cast<std::int64_t>(*o.seed));
    else
      root.insert_or_assign("seed", std::to_string(*o.seed));
  }
  auto table_at = [&root](std::string_view key) -> toml::table& {
    if (!root[key].is_table()) root.insert_or_assign(key, toml::table{});
    return *root[key].as_table();
  };
  if (o.radius) {
    for (auto key : {"cocycle", "conservativeness", "classification"})
      table_at(key).insert_or_assign("radius", static_cast<std::int64_t>(*o.radius));
  }
  if (o.mc_samples) table_at("mc").insert_or_assign("samples", static_cast<std::int64_t>(*o.mc_samples));
  if (o.stages) {
    toml::array names;
    for (Stage s : *o.stages) names.push_back(to_string(s));
    root.insert_or_assign("stages", std::move(names));
  }
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string origin, const ScenarioOverrides& overrides) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "toml: " << e.description() << " at line " << e.source().begin.line;
    throw ScenarioError({os.str()});
  }
  apply_overrides(root, overrides);

  Scenario s;
  s.origin = std::move(origin);
  std::ostringstream canon;
  canon << root;
  s.canonical = canon.str();
  s.hash = fnv1a_hex(s.canonical);

  std::vector<std::string> errors;
  Reader top(&root, "", errors);
  s.name = top.string("name").value_or("unnamed");
  if (top.has("seed")) {
    const auto node = root["seed"];
    if (auto i = node.value_exact<std::int64_t>(); i && *i >= 0) {
      s.seed = static_cast<std::uint64_t>(*i);
    } else if (auto str = node.value_exact<std::string>()) {
      try {
        std::size_t used = 0;
        s.seed = std::stoull(*str, &used);
        if (used != str->size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        top.error("seed", "expected an unsigned 64-bit integer");
      }
    } else {
      top.error("seed", "expected an unsigned 64-bit integer");
    }
  }
  if (auto names = top.array<std::string>("stages")) {
    for (const auto& n : *names) {
      bool found = false;
      for (Stage st : all_stages())
        if (to_string(st) == n) {
          if (!s.wants(st)) s.stages.push_back(st);
          found = true;
        }
      if (!found) top.error("stages", "unknown stage '" + n + "'");
    }
    std::sort(s.stages.begin(), s.stages.end());
  } else {
    s.stages = all_stages();
  }

  std::optional<std::vector<double>> chain_cycle;
  std::optional<double> chain_lambda;
  std::optional<ShellRecipeKind> chain_recipe;
  int chain_count = 0;
  s.group = build_group(top.sub("group"), errors, chain_cycle, chain_lambda, chain_recipe, chain_count);
  const bool group_only = overrides.stages && overrides.stages->empty();
  if (s.group && !(group_only && !root.contains("profile")))
    s.profile = build_profile(top.sub("profile"), s.group, errors, chain_cycle, chain_lambda, chain_recipe,
                              chain_count, s.profile_builtin);
  else
    top.has("profile");

  Reader cocycle = top.sub("cocycle");
  check_radius(cocycle, "radius", cocycle.integer("radius"), s.group, s.cocycle_radius);
  if (auto els = cocycle.array<std::string>("elements"); els && s.group) {
    for (const auto& e : *els) {
      try {
        s.cocycle_elements.push_back(s.group->parse(e));
      } catch (const std::exception& ex) {
        cocycle.error("elements", "'" + e + "': " + ex.what());
      }
    }
  } else if (s.group) {
    s.cocycle_elements = s.group->generators(1);
  }
  cocycle.finish();

  Reader cons = top.sub("conservativeness");
  s.conservativeness.kappa = cons.real("kappa");
  if (s.conservativeness.kappa && !(*s.conservativeness.kappa > 0)) cons.error("kappa", "must be positive");
  check_radius(cons, "radius", cons.integer("radius"), s.group, s.conservativeness.radius);
  s.conservativeness.declared_minorant = cons.string("declared_minorant");
  s.conservativeness.declared_conservative = cons.boolean("declared_conservative").value_or(false);
  cons.finish();

  Reader cls = top.sub("classification");
  check_radius(cls, "radius", cls.integer("radius"), s.group, s.classification.radius);
  cls.finish();

  Reader mc = top.sub("mc");
  if (auto n = mc.integer("samples")) {
    if (*n < 1 || *n > 100000000) mc.error("samples", "must lie in [1, 1e8]");
    else s.mc.samples = static_cast<std::size_t>(*n);
  }
  s.mc.generator_radius = 1;
  check_radius(mc, "generator_radius", mc.integer("generator_radius"), s.group, s.mc.generator_radius);
  check_radius(mc, "truncation_radius", mc.integer("truncation_radius"), s.group, s.mc.truncation_radius);
  if (auto c = mc.integer("chains")) {
    if (*c < 1 || *c > 256) mc.error("chains", "must lie in [1, 256]");
    else s.mc.chains = static_cast<int>(*c);
  }
  s.mc_allow_truncated = mc.boolean("allow_truncated").value_or(false);
  mc.finish();

  if (s.wants(Stage::MonteCarlo) && !s.seed) errors.push_back("seed: required when the mc stage is requested");
  if (s.seed) s.mc.seed = *s.seed;
  top.finish();
  if (!errors.empty()) throw ScenarioError(std::move(errors));
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError({"scenario: cannot read '" + path.string() + "'"});
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario(os.str(), path.string(), overrides);
}

}  // namespace btl
