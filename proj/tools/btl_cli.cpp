#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "btl/acceptance.hpp"
#include "btl/almost_invariant.hpp"
#include "btl/classifier.hpp"
#include "btl/report.hpp"
#include "btl/scenario.hpp"
#include "json.hpp"

#ifndef BTL_SCENARIO_DIR
#define BTL_SCENARIO_DIR "scenarios"
#endif

using namespace btl;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;
constexpr int kExitUnknown = 4;

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<int> radius;
  std::optional<std::size_t> mc_samples;
  std::string out;
  bool json = false;
  bool strict = false;
};

void add_common(CLI::App* cmd, Common& c, bool need_scenario) {
  auto* opt = cmd->add_option("--scenario", c.scenario, "scenario TOML file");
  if (need_scenario) opt->required();
  cmd->add_option("--seed", c.seed, "master seed, replaces the scenario seed");
  cmd->add_option("--radius", c.radius, "ball radius for every truncated series")->check(CLI::NonNegativeNumber);
  cmd->add_option("--mc-samples", c.mc_samples, "number of Monte Carlo samples")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_flag("--json", c.json, "print JSON instead of text");
  cmd->add_flag("--strict", c.strict, "exit 4 when the final verdict is Unknown");
}

ScenarioOverrides overrides(const Common& c, std::optional<std::vector<Stage>> stages) {
  return {c.seed, c.radius, c.mc_samples, std::move(stages)};
}

int finish(const RunReport& r, const Scenario& s, const Common& c) {
  if (!c.out.empty()) {
    for (const auto& path : write_report(r, c.out, *s.group)) std::cerr << "wrote " << path.string() << "\n";
  }
  std::cout << (c.json ? to_json(r) + "\n" : summary(r));
  if (r.incomplete) return kExitBudget;
  if (c.strict && r.unknown()) return kExitUnknown;
  return kExitOk;
}

int cmd_run(const Common& c, std::optional<std::vector<Stage>> stages) {
  const auto s = load_scenario(c.scenario, overrides(c, std::move(stages)));
  if (!s.has_profile()) throw ScenarioError({"profile: missing table"});
  return finish(run(s), s, c);
}

int cmd_construct(const Common& c, std::optional<double> kappa, std::optional<double> lambda) {
  const auto s = load_scenario(c.scenario, overrides(c, std::vector<Stage>{}));
  const GroupPtr& G = s.group;
  const double k = kappa.value_or(s.conservativeness.kappa.value_or(0.5));
  const auto w = G->family() == Family::LocallyFiniteChain
                     ? construct_lf_ai_set(G, k, [](int n) { return n % 2 == 1; }, "odd levels")
                     : construct_ai_set(G);
  const int radius = std::min(c.radius.value_or(3), G->attainable_radius());
  json j{{"group", group_label(*G)}, {"set", w.describe()}, {"stallings", G->stallings_class()}, {"spheres", json::array()}};
  if (G->family() == Family::AmalgamatedProduct || G->family() == Family::HnnExtension) j["kappa_bound"] = kappa_bound(*G);
  if (lambda && j.contains("kappa_bound")) j["lambda_feasible"] = lambda_feasible(*lambda, j["kappa_bound"].get<double>());
  for (int n = 1; n <= radius; ++n) {
    std::size_t lo = SIZE_MAX, hi = 0, count = 0;
    long long omega_lo = 0, omega_hi = 0;
    for (const auto& g : G->enumerate_sphere(n)) {
      const auto parts = boundary_parts(w, g);
      const long long om = static_cast<long long>(parts.w_minus_gw) - static_cast<long long>(parts.gw_minus_w);
      if (count == 0) omega_lo = omega_hi = om;
      lo = std::min(lo, parts.total());
      hi = std::max(hi, parts.total());
      omega_lo = std::min(omega_lo, om);
      omega_hi = std::max(omega_hi, om);
      ++count;
    }
    if (count == 0) continue;
    j["spheres"].push_back({{"n", n}, {"elements", count}, {"boundary_min", lo}, {"boundary_max", hi},
                            {"omega_min", omega_lo}, {"omega_max", omega_hi}});
  }
  if (c.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "group      " << group_label(*G) << "\nset        " << w.describe() << "\nstallings  "
              << G->stallings_class() << "\n";
    if (j.contains("kappa_bound")) std::cout << "kappa bound " << j["kappa_bound"].get<double>() << "\n";
    if (j.contains("lambda_feasible"))
      std::cout << "lambda " << *lambda << " feasible: " << (j["lambda_feasible"].get<bool>() ? "yes" : "no") << "\n";
    std::printf("%4s %10s %16s %16s\n", "n", "elements", "|W xor gW|", "Omega_W");
    for (const auto& row : j["spheres"])
      std::printf("%4d %10zu %7zu..%-7zu %7lld..%-7lld\n", row["n"].get<int>(), row["elements"].get<std::size_t>(),
                  row["boundary_min"].get<std::size_t>(), row["boundary_max"].get<std::size_t>(),
                  row["omega_min"].get<long long>(), row["omega_max"].get<long long>());
  }
  return kExitOk;
}

int cmd_counts(const Common& c) {
  std::vector<GroupPtr> groups;
  if (!c.scenario.empty()) {
    groups.push_back(load_scenario(c.scenario, overrides(c, std::vector<Stage>{})).group);
  } else {
    groups = {make_free_product(3, 3), make_free_product(2, 4),
              make_group(HnnExtension{FiniteGroup::cyclic(4), FiniteGroup::cyclic(2), {0, 2}, {0, 2}})};
  }
  const auto formulas = reference_formulas();
  json rows = json::array();
  bool ok = true;
  for (const auto& G : groups) {
    if (G->family() != Family::AmalgamatedProduct && G->family() != Family::HnnExtension)
      throw ScenarioError({"group.family: sphere formulas cover afp and hnn groups"});
    const int radius = std::min(c.radius.value_or(5), G->attainable_radius());
    for (int n = 1; n <= radius; ++n) {
      const std::uint64_t formula = formulas.sphere_count(*G, n);
      const auto enumerated = static_cast<std::uint64_t>(G->enumerate_sphere(n).size());
      ok = ok && formula == enumerated;
      rows.push_back({{"group", group_label(*G)}, {"n", n}, {"formula", formula}, {"enumerated", enumerated},
                      {"match", formula == enumerated}});
    }
  }
  if (c.json) {
    std::cout << rows.dump(2) << "\n";
  } else {
    for (const auto& r : rows)
      std::cout << (r["match"].get<bool>() ? "ok   " : "FAIL ") << r["group"].get<std::string>() << "  n=" << r["n"]
                << "  formula " << r["formula"] << "  enumerated " << r["enumerated"] << "\n";
  }
  return ok ? kExitOk : kExitFailure;
}

int cmd_verify_paper(const Common& c, const std::string& scenario_dir, bool require_all) {
  AcceptanceOptions o;
  o.scenario_dir = scenario_dir;
  if (c.mc_samples) o.mc_samples = *c.mc_samples;
  const auto rows = run_acceptance(o);
  const auto known = known_deviations();
  auto is_known = [&known](int id) {
    for (const auto& d : known)
      if (d.row == id) return true;
    return false;
  };
  bool all_pass = true, as_recorded = true;
  json out = json::array();
  for (const auto& r : rows) {
    all_pass = all_pass && r.pass;
    as_recorded = as_recorded && r.pass != is_known(r.id);
    out.push_back({{"row", r.id}, {"name", r.name}, {"pass", r.pass}, {"measured", r.measured}, {"expected", r.expected},
                   {"note", r.note}, {"seconds", r.seconds}, {"known_deviation", is_known(r.id)}});
    if (!c.json)
      std::printf("%-4s %2d %-26s %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.measured.c_str());
  }
  if (c.json) std::cout << out.dump(2) << "\n";
  if (!c.json)
    for (const auto& d : known) std::printf("known deviation, row %d: %s\n", d.row, d.reason.c_str());
  if (require_all) return all_pass ? kExitOk : kExitFailure;
  return as_recorded ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bernoulli shift type classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Common classify_c, simulate_c, construct_c, counts_c, acceptance_c, report_c;
  auto* classify = app.add_subcommand("classify", "nonsingularity, conservativeness and type of a scenario");
  add_common(classify, classify_c, true);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo log RN samples and lattice fit");
  add_common(simulate, simulate_c, true);
  auto* construct = app.add_subcommand("construct-ai-set", "default almost invariant set and its boundary sizes");
  add_common(construct, construct_c, true);
  std::optional<double> ai_kappa, ai_lambda;
  construct->add_option("--kappa", ai_kappa, "growth parameter for chain sets");
  construct->add_option("--lambda", ai_lambda, "check the feasibility inequality for this lambda");
  auto* counts = app.add_subcommand("verify-counts", "closed sphere counts against enumeration");
  add_common(counts, counts_c, false);
  auto* acceptance = app.add_subcommand("verify-paper", "run the acceptance suite");
  add_common(acceptance, acceptance_c, false);
  std::string scenario_dir = BTL_SCENARIO_DIR;
  bool require_all = false;
  acceptance->add_option("--scenario-dir", scenario_dir, "directory holding the fixture scenarios");
  acceptance->add_flag("--require-all", require_all, "fail unless every row passes, including recorded deviations");
  auto* report = app.add_subcommand("report", "run every requested stage and write report.json with CSV sidecars");
  add_common(report, report_c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*classify)
      return cmd_run(classify_c, std::vector<Stage>{Stage::Nonsingularity, Stage::Conservativeness, Stage::Classification});
    if (*simulate) return cmd_run(simulate_c, std::vector<Stage>{Stage::MonteCarlo});
    if (*construct) return cmd_construct(construct_c, ai_kappa, ai_lambda);
    if (*counts) return cmd_counts(counts_c);
    if (*acceptance) return cmd_verify_paper(acceptance_c, scenario_dir, require_all);
    if (*report) {
      if (report_c.out.empty()) report_c.out = "report";
      return cmd_run(report_c, std::nullopt);
    }
  } catch (const ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const BudgetError& e) {
    std::cerr << "budget overrun: " << e.what() << " (attainable radius " << e.attainable_radius() << ")\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
