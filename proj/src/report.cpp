#include "btl/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace btl {

using nlohmann::json;

bool RunReport::unknown() const {
  if (type) return type->tag == TypeTag::Unknown;
  if (conservativeness) return conservativeness->tag == ConservativenessTag::Unknown;
  if (nonsingularity) return nonsingularity->verdict == NonsingularityVerdict::Unknown;
  if (mc) return mc->fit.inconclusive;
  return true;
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

NonsingularityStage nonsingularity_stage(const Scenario& s) {
  const MarginalProfile& p = s.marginals();
  NonsingularityStage st;
  const int radius = std::min(s.cocycle_radius, p.group().attainable_radius());
  bool all_nonsingular = !s.cocycle_elements.empty(), any_singular = false;
  for (const auto& g : s.cocycle_elements) {
    st.cocycles.push_back(cocycle_report(p, g, radius));
    all_nonsingular = all_nonsingular && st.cocycles.back().verdict == NonsingularityVerdict::Nonsingular;
    any_singular = any_singular || st.cocycles.back().verdict == NonsingularityVerdict::Singular;
  }
  st.verdict = p.nonsingularity();
  st.evidence.push_back({"certificate-nonsingularity", certificate_name(p.certificate()), to_string(st.verdict)});
  if (st.verdict == NonsingularityVerdict::Unknown) {
    // g with mu equivalent to g mu form a subgroup, so the generators decide.
    const bool generators = s.cocycle_elements == p.group().generators(1);
    if (any_singular) {
      st.verdict = NonsingularityVerdict::Singular;
    } else if (all_nonsingular && generators) {
      st.verdict = NonsingularityVerdict::Nonsingular;
    }
    st.evidence.push_back({"kakutani-generators",
                           std::to_string(st.cocycles.size()) + (generators ? " generators" : " listed elements") +
                               ", radius " + std::to_string(radius),
                           to_string(st.verdict)});
  }
  st.nonatomicity = p.nonatomicity();
  st.evidence.push_back({"nonatomicity", certificate_name(p.certificate()), to_string(st.nonatomicity)});
  return st;
}

MonteCarloStage mc_stage(const Scenario& s, const std::optional<TypeVerdict>& type) {
  const MarginalProfile& p = s.marginals();
  MonteCarloStage st;
  auto r = empirical_ratio_lattice(p, s.mc, s.mc_allow_truncated);
  st.fit = std::move(r.fit);
  st.samples = std::move(r.samples);
  if (std::holds_alternative<cert::ConstantEventually>(p.certificate()) &&
      std::get<cert::ConstantEventually>(p.certificate()).radius < 0) {
    st.agrees = st.fit.all_zero;
    st.comparison = "constant profile: every log RN derivative vanishes";
  } else if (auto part = p.ai_partition(); part && !st.fit.inconclusive) {
    st.classifier_lattice = lambda_lattice(part->values);
    st.agrees = lattice_agrees(st.fit, *st.classifier_lattice);
    st.comparison = st.classifier_lattice->dense ? "log-odds lattice is dense"
                                                 : "log-odds lattice spacing " + fmt(st.classifier_lattice->a);
  } else {
    st.comparison = "no piecewise constant structure to compare against";
  }
  if (type && type->tag == TypeTag::TypeIIIlambda && type->lambda && st.fit.spacing) {
    st.comparison += "; classifier spacing -log lambda = " + fmt(-std::log(*type->lambda));
  }
  return st;
}

}  // namespace

std::string group_label(const GroupModel& g) {
  std::ostringstream os;
  switch (g.family()) {
    case Family::IntegerLattice: {
      const int d = std::get<IntegerLattice>(g.data()).dim;
      os << "Z" << (d > 1 ? "^" + std::to_string(d) : "");
      break;
    }
    case Family::LocallyFiniteChain: {
      const auto& c = std::get<LocallyFiniteChain>(g.data());
      os << "chain of sums of Z/m, m =";
      for (int m : c.moduli) os << ' ' << m;
      os << ", levels";
      for (std::size_t i = 0; i < c.levels.size() && i < 8; ++i) os << (i ? "," : " ") << c.levels[i];
      if (c.levels.size() > 8) os << ",...";
      break;
    }
    case Family::AmalgamatedProduct:
      os << "A *_C B with |A| = " << g.factor_order() << ", [A:C] = " << g.afp_index_a() << ", [B:C] = "
         << g.afp_index_b() << ", |C| = " << g.amalgam_order();
      break;
    case Family::HnnExtension:
      os << "HNN(A, C, alpha) with |A| = " << g.factor_order() << ", [A:C] = " << g.hnn_index()
         << ", |C| = " << g.amalgam_order();
      break;
  }
  return os.str();
}

namespace {

json evidence_json(const EvidenceTrail& trail) {
  json out = json::array();
  for (const auto& e : trail) out.push_back({{"criterion", e.criterion}, {"inputs", e.inputs}, {"outcome", e.outcome}});
  return out;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json series_json(const SeriesEstimate& s) {
  return {{"partial", s.partial}, {"radius", s.radius}, {"verdict", to_string(s.verdict)}, {"reason", s.reason}};
}

}  // namespace

RunReport run(const Scenario& s) {
  RunReport rep;
  rep.scenario_name = s.name;
  rep.scenario_origin = s.origin;
  rep.scenario_hash = s.hash;
  rep.seed = s.seed;
  rep.group = group_label(*s.group);
  rep.group_model = s.group->describe();
  rep.profile = s.marginals().name();

  const bool want_cls = s.wants(Stage::Classification);
  const bool want_cons = want_cls || s.wants(Stage::Conservativeness);
  const bool want_ns = want_cons || s.wants(Stage::Nonsingularity);

  auto stage = [&rep](Stage which, auto&& body) {
    if (rep.incomplete) {
      rep.issues.push_back(to_string(which) + ": skipped after budget overrun");
      return;
    }
    Stopwatch clock;
    try {
      body();
      rep.stages.push_back(to_string(which));
    } catch (const BudgetError& e) {
      rep.incomplete = true;
      rep.issues.push_back(to_string(which) + ": budget overrun: " + e.what() + " (attainable radius " +
                           std::to_string(e.attainable_radius()) + ")");
    }
    rep.timing.push_back({to_string(which), clock.seconds()});
  };

  if (want_ns) stage(Stage::Nonsingularity, [&] { rep.nonsingularity = nonsingularity_stage(s); });
  if (want_cons) {
    stage(Stage::Conservativeness, [&] {
      if (rep.nonsingularity && rep.nonsingularity->verdict == NonsingularityVerdict::Singular) {
        ConservativenessVerdict v;
        v.evidence.push_back({"upstream", "nonsingularity Singular", "conservativeness is undefined for a singular action"});
        rep.conservativeness = std::move(v);
        rep.issues.push_back("conservativeness: Unknown because the action is singular");
        return;
      }
      rep.conservativeness = assess_conservativeness(s.marginals(), s.conservativeness);
    });
  }
  if (want_cls && rep.conservativeness) {
    stage(Stage::Classification, [&] {
      rep.type = classify(s.marginals(), *rep.conservativeness, s.classification);
      if (rep.type->tag == TypeTag::Unknown) {
        const auto& last = rep.type->evidence.empty() ? Evidence{"classifier", "", "no criterion applied"}
                                                      : rep.type->evidence.back();
        rep.issues.push_back("classification: Unknown after " + last.criterion + ": " + last.outcome);
      }
    });
  }
  if (s.wants(Stage::MonteCarlo)) stage(Stage::MonteCarlo, [&] { rep.mc = mc_stage(s, rep.type); });
  return rep;
}

std::string to_json(const RunReport& r, bool include_timing, int indent) {
  json j;
  j["tool_version"] = r.tool_version;
  j["scenario"] = {{"name", r.scenario_name}, {"hash", r.scenario_hash}};
  j["seed"] = r.seed ? json(std::to_string(*r.seed)) : json(nullptr);
  j["group"] = r.group;
  j["group_model"] = r.group_model;
  j["profile"] = r.profile;
  j["stages"] = r.stages;
  j["incomplete"] = r.incomplete;
  j["issues"] = r.issues;

  if (r.nonsingularity) {
    json cs = json::array();
    for (const auto& c : r.nonsingularity->cocycles)
      cs.push_back({{"g", c.g},
                    {"norm_sq_partial", c.norm_sq_partial},
                    {"norm_sq_exact", opt(c.norm_sq_exact)},
                    {"kakutani_partial", c.kakutani_partial},
                    {"kakutani_exact", opt(c.kakutani_exact)},
                    {"verdict", to_string(c.verdict)},
                    {"radius", c.radius}});
    j["nonsingularity"] = {{"verdict", to_string(r.nonsingularity->verdict)},
                           {"nonatomicity", to_string(r.nonsingularity->nonatomicity)},
                           {"cocycles", cs},
                           {"evidence", evidence_json(r.nonsingularity->evidence)}};
  }
  if (r.conservativeness) {
    const auto& c = *r.conservativeness;
    json cj{{"verdict", to_string(c.tag)},
            {"kappa", opt(c.kappa)},
            {"kappa0", opt(c.kappa0)},
            {"assumed", c.assumed},
            {"evidence", evidence_json(c.evidence)}};
    if (c.growth)
      cj["growth"] = {{"partial", c.growth->partial}, {"radius", c.growth->radius}, {"kappa", c.growth->kappa},
                      {"verdict", to_string(c.growth->verdict)}, {"pattern", c.growth->pattern},
                      {"reason", c.growth->reason}};
    if (c.dissipative) cj["dissipative_series"] = series_json(*c.dissipative);
    j["conservativeness"] = cj;
  }
  if (r.type) {
    const auto& t = *r.type;
    j["type"] = {{"tag", to_string(t.tag)},
                 {"label", t.label()},
                 {"lambda", opt(t.lambda)},
                 {"stable", to_string(t.stable)},
                 {"stable_lambda", opt(t.stable_lambda)},
                 {"stable_note", t.stable_note},
                 {"evidence", evidence_json(t.evidence)}};
  }
  if (r.mc) {
    const auto& f = r.mc->fit;
    json mj{{"samples", r.mc->samples.size()},
            {"certified", f.certified},
            {"truncated", f.truncated},
            {"inconclusive", f.inconclusive},
            {"dense", f.dense},
            {"spacing", opt(f.spacing)},
            {"fit_fraction", f.fit_fraction},
            {"all_zero", f.all_zero},
            {"note", f.note},
            {"histogram", {{"points", f.histogram.points}, {"edges", f.histogram.edges}, {"counts", f.histogram.counts}}},
            {"comparison", r.mc->comparison},
            {"agrees_with_classifier", r.mc->agrees ? json(*r.mc->agrees) : json(nullptr)}};
    if (r.mc->classifier_lattice)
      mj["classifier_lattice"] = {{"dense", r.mc->classifier_lattice->dense}, {"a", r.mc->classifier_lattice->a}};
    j["mc"] = mj;
  }
  if (include_timing) {
    json t = json::object();
    for (const auto& s : r.timing) t[s.stage] = s.seconds;
    j["timing_seconds"] = t;
  }
  return j.dump(indent);
}

std::vector<std::filesystem::path> write_report(const RunReport& r, const std::filesystem::path& dir,
                                                 const GroupModel& group) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> out;
  auto open = [&out, &dir](const char* name) {
    out.push_back(dir / name);
    std::ofstream f(out.back(), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out.back().string());
    return f;
  };
  {
    auto f = open("report.json");
    f << to_json(r) << '\n';
  }
  if (r.mc) {
    auto f = open("samples.csv");
    f << "g,log_rn,truncated,seed\n" << std::setprecision(17);
    for (const auto& s : r.mc->samples)
      f << '"' << group.to_string(s.g) << "\"," << s.log_rn << ',' << (s.truncated ? 1 : 0) << ',' << s.seed << '\n';
    auto h = open("histogram.csv");
    const auto& hist = r.mc->fit.histogram;
    h << std::setprecision(17);
    if (hist.points) {
      h << "log_rn,count\n";
      for (std::size_t i = 0; i < hist.counts.size(); ++i) h << hist.edges[i] << ',' << hist.counts[i] << '\n';
    } else {
      h << "left,right,count\n";
      for (std::size_t i = 0; i < hist.counts.size(); ++i)
        h << hist.edges[i] << ',' << hist.edges[i + 1] << ',' << hist.counts[i] << '\n';
    }
  }
  return out;
}

std::string summary(const RunReport& r) {
  std::ostringstream os;
  os << "scenario          " << r.scenario_name << " [" << r.scenario_hash << "]\n";
  os << "group             " << r.group << "\n";
  os << "profile           " << r.profile << "\n";
  if (r.nonsingularity)
    os << "nonsingularity    " << to_string(r.nonsingularity->verdict) << ", "
       << to_string(r.nonsingularity->nonatomicity) << "\n";
  if (r.conservativeness) {
    const auto& c = *r.conservativeness;
    os << "conservativeness  " << to_string(c.tag);
    if (!c.evidence.empty()) os << " (" << c.evidence.back().criterion << (c.assumed ? ", assumed" : "") << ")";
    os << "\n";
  }
  if (r.type) {
    os << "type              " << r.type->label();
    if (r.type->stable != TypeTag::NotComputed) {
      os << ", stable type "
         << (r.type->stable == TypeTag::TypeIIIlambda && r.type->stable_lambda ? "III_" + fmt(*r.type->stable_lambda)
                                                                             : to_string(r.type->stable));
    }
    if (!r.type->evidence.empty()) os << " (" << r.type->evidence.back().criterion << ")";
    os << "\n";
  }
  if (r.mc) {
    const auto& f = r.mc->fit;
    os << "mc                " << f.certified << " certified, " << f.truncated << " truncated: ";
    if (f.inconclusive)
      os << "inconclusive";
    else if (f.all_zero)
      os << "all zero";
    else if (f.dense)
      os << "dense";
    else if (f.spacing)
      os << "lattice spacing " << fmt(*f.spacing);
    if (r.mc->agrees) os << (*r.mc->agrees ? ", agrees with classifier" : ", disagrees with classifier");
    os << "\n";
  }
  for (const auto& i : r.issues) os << "issue             " << i << "\n";
  if (r.incomplete) os << "report            incomplete\n";
  return os.str();
}

}  // namespace btl
