#include "btl/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "btl/cocycle.hpp"
#include "btl/error.hpp"

namespace btl {

namespace {

constexpr long long kDenominatorCap = 1000000;
constexpr double kRatioTol = 1e-9;
// A convergent p/q is accepted only when it beats the generic 1/q^2 approximation by this factor.
constexpr double kQuality = 1e-3;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

double logit(double v) { return std::log(v / (1.0 - v)); }

bool part_is_infinite(const AlmostInvariantSet& w) { return !(w.tag() == AiTag::Explicit && !w.complemented()); }

TypeVerdict finish(TypeVerdict v, TypeTag tag, TypeTag stable, std::optional<double> lambda = std::nullopt) {
  v.tag = tag;
  v.stable = stable;
  v.lambda = lambda;
  if (stable == TypeTag::TypeIIIlambda) v.stable_lambda = lambda;
  return v;
}

bool is_coboundary_certificate(const TailCertificate& c) {
  if (std::holds_alternative<cert::ConstantEventually>(c)) return true;
  if (const auto* s = std::get_if<cert::ConvergentSeries>(&c))
    return s->l2 == SeriesVerdict::Converges && s->lambda > 0.0 && s->lambda < 1.0;
  if (const auto* p = std::get_if<cert::PiecewiseConstantOnAIPartition>(&c)) {
    int infinite = 0;
    for (const auto& w : p->partition.parts) infinite += part_is_infinite(w);
    return infinite == 1;
  }
  return false;
}

// Type table for a partition into at least two infinite almost invariant parts.
TypeVerdict stable_type_table(TypeVerdict v, const GroupModel& G, const AiPartition& part, int gen_radius) {
  const LatticeOrDense lam = lambda_lattice(part.values);
  v.evidence.push_back({"log-odds-lattice", std::to_string(part.values.size()) + " part values",
                        lam.dense ? std::string("dense") + (lam.undecided ? " (undecided within caps)" : "")
                                  : "a = " + fmt(lam.a)});
  if (lam.dense) return finish(std::move(v), TypeTag::TypeIII1, TypeTag::TypeIII1);
  std::vector<double> gens{lam.a};
  std::string omegas;
  for (const auto& s : G.generators(gen_radius)) {
    const double o = omega(part, s);
    gens.push_back(o);
    if (!omegas.empty()) omegas += ", ";
    omegas += G.to_string(s) + " -> " + fmt(o);
  }
  const LatticeOrDense with_omega = lattice_from_generators(gens);
  v.evidence.push_back({"omega-homomorphism", "generators: " + omegas,
                        with_omega.dense ? "Omega(G) + aZ dense" : "Omega(G) + aZ = " + fmt(with_omega.a) + " Z"});
  if (with_omega.dense) {
    v = finish(std::move(v), TypeTag::TypeIII1, TypeTag::NotComputed);
    v.stable_note = "III_1 and III_exp(-a/k) for k >= 1, a = " + fmt(lam.a);
    v.evidence.push_back({"stable-type-table", "a = " + fmt(lam.a), "type III_1, not stable"});
    return v;
  }
  const double k0 = std::round(lam.a / with_omega.a);
  const double type_lambda = std::exp(-lam.a / k0);
  if (k0 <= 1.0) {
    v.evidence.push_back({"stable-type-table", "a = " + fmt(lam.a) + ", Omega(G) in aZ",
                          "stable III_lambda, lambda = exp(-a) = " + fmt(type_lambda)});
    return finish(std::move(v), TypeTag::TypeIIIlambda, TypeTag::TypeIIIlambda, type_lambda);
  }
  v = finish(std::move(v), TypeTag::TypeIIIlambda, TypeTag::NotComputed, type_lambda);
  v.stable_note = "III_exp(-a/k) for k dividing " + fmt(k0) + ", a = " + fmt(lam.a);
  v.evidence.push_back({"stable-type-table", "a = " + fmt(lam.a) + ", k0 = " + fmt(k0),
                        "III_lambda with lambda = exp(-a/k0) = " + fmt(type_lambda) + ", not stable"});
  return v;
}

}  // namespace

std::string to_string(TypeTag t) {
  switch (t) {
    case TypeTag::Dissipative:
      return "Dissipative";
    case TypeTag::TypeI:
      return "I";
    case TypeTag::TypeII1:
      return "II_1";
    case TypeTag::TypeIIinf:
      return "II_inf";
    case TypeTag::TypeIIIlambda:
      return "III_lambda";
    case TypeTag::TypeIII1:
      return "III_1";
    case TypeTag::TypeIII0:
      return "III_0";
    case TypeTag::TypeIIIunresolved:
      return "III";
    case TypeTag::Unknown:
      return "Unknown";
    default:
      return "NotComputed";
  }
}

std::string TypeVerdict::label() const {
  if (tag == TypeTag::TypeIIIlambda && lambda) return "III_" + fmt(*lambda);
  return to_string(tag);
}

namespace {

// near_miss: some convergent met the tolerance without the quality margin.
std::optional<std::pair<long long, long long>> ratio_search(double x, double y, bool& near_miss) {
  near_miss = false;
  if (y == 0.0 || !std::isfinite(x) || !std::isfinite(y)) return std::nullopt;
  const double r = x / y;
  const double scale = std::max(1.0, std::fabs(r));
  long long h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  double t = r;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(t);
    if (std::fabs(a) > 1e15) return std::nullopt;
    const long long ai = static_cast<long long>(a);
    const long long h = ai * h1 + h2, k = ai * k1 + k2;
    if (k > kDenominatorCap) return std::nullopt;
    const double err = std::fabs(r - static_cast<double>(h) / static_cast<double>(k));
    if (err <= kRatioTol * scale) {
      if (err * static_cast<double>(k) * static_cast<double>(k) <= kQuality * scale) return std::make_pair(h, k);
      near_miss = true;
    }
    const double frac = t - a;
    if (frac <= 0.0) return std::make_pair(h, k);
    t = 1.0 / frac;
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::pair<long long, long long>> rational_ratio(double x, double y) {
  bool near_miss = false;
  return ratio_search(x, y, near_miss);
}

LatticeOrDense lattice_from_generators(const std::vector<double>& generators) {
  LatticeOrDense out;
  for (double g : generators) {
    if (!std::isfinite(g)) throw ValidationError("lattice generator is not finite");
    if (std::fabs(g) < 1e-12) continue;
    if (out.a == 0.0) {
      out.a = std::fabs(g);
      continue;
    }
    bool near_miss = false;
    const auto pq = ratio_search(g, out.a, near_miss);
    if (!pq) {
      out.dense = true;
      out.undecided = near_miss;
      out.a = 0.0;
      return out;
    }
    out.a /= static_cast<double>(pq->second);
  }
  return out;
}

LatticeOrDense lambda_lattice(const std::vector<double>& values) {
  if (values.size() < 2) throw StructuralError("the log-odds lattice needs at least two values");
  std::vector<double> gens;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0 && values[i] < 1.0)) throw ValidationError("part values must lie in (0, 1)");
    for (std::size_t j = 0; j < i; ++j)
      if (values[i] == values[j]) throw ValidationError("part values must be distinct");
    if (i > 0) gens.push_back(logit(values[i]) - logit(values[0]));
  }
  return lattice_from_generators(gens);
}

long long omega_W(const AlmostInvariantSet& w, const Element& g) {
  const auto parts = boundary_parts(w, g);
  return static_cast<long long>(parts.w_minus_gw) - static_cast<long long>(parts.gw_minus_w);
}

double omega(const AiPartition& partition, const Element& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < partition.parts.size(); ++i) {
    const long long o = omega_W(partition.parts[i], g);
    if (o != 0) s += static_cast<double>(o) * std::log(partition.values[i]);
  }
  return s;
}

TypeVerdict classify(const MarginalProfile& p, const ConservativenessVerdict& cons, const ClassifyOptions& o) {
  const GroupModel& G = p.group();
  TypeVerdict v;
  const int radius = o.radius >= 0 ? std::min(o.radius, G.attainable_radius()) : default_truncation_radius(G);
  const int gen_radius = std::max(1, std::min(3, G.attainable_radius()));

  // Preconditions.
  const auto ns = p.nonsingularity();
  std::string gen_sums;
  bool singular = ns == NonsingularityVerdict::Singular;
  for (const auto& s : G.generators(gen_radius)) {
    const auto k = kakutani_sum(p, s, radius);
    singular = singular || k.verdict == NonsingularityVerdict::Singular;
    if (!gen_sums.empty()) gen_sums += ", ";
    gen_sums += G.to_string(s) + ": " + fmt(k.exact ? *k.exact : k.partial);
  }
  v.evidence.push_back({"nonsingularity-kakutani", gen_sums, singular ? "Singular" : to_string(ns)});
  if (singular) return finish(std::move(v), TypeTag::Unknown, TypeTag::NotComputed);

  const auto na = p.nonatomicity();
  v.evidence.push_back({"nonatomicity", certificate_name(p.certificate()), to_string(na)});
  if (na == NonatomicityVerdict::Atomic) return finish(std::move(v), TypeTag::TypeI, TypeTag::TypeI);

  v.evidence.push_back({"conservativeness", cons.evidence.empty() ? "" : cons.evidence.back().criterion,
                        to_string(cons.tag) + (cons.assumed ? " (assumed)" : "")});
  if (cons.tag == ConservativenessTag::Dissipative) return finish(std::move(v), TypeTag::Dissipative, TypeTag::Dissipative);
  if (!cons.conservative()) return finish(std::move(v), TypeTag::Unknown, TypeTag::NotComputed);
  if (na != NonatomicityVerdict::Nonatomic) return finish(std::move(v), TypeTag::Unknown, TypeTag::NotComputed);

  const LimitSet L = p.limit_set();
  std::string lpts;
  for (double x : L.points) lpts += (lpts.empty() ? "" : ", ") + fmt(x);
  for (const auto& i : L.intervals) lpts += (lpts.empty() ? "[" : ", [") + fmt(i.lo) + ", " + fmt(i.hi) + "]";

  // Abelian, not locally finite.
  if (G.is_abelian() && !G.is_locally_finite()) {
    v.evidence.push_back({"abelian-limit-set", "{" + lpts + "}" + (L.certified ? "" : " (empirical)"),
                          L.is_singleton() ? "singleton" : L.at_least_two_points() ? "at least two points" : "empty"});
    if (L.at_least_two_points() && L.certified) return finish(std::move(v), TypeTag::TypeIII1, TypeTag::TypeIII1);
    if (L.is_singleton() && L.certified) {
      const double lam = L.points.front();
      if (lam <= 0.0 || lam >= 1.0) return finish(std::move(v), TypeTag::TypeIIIunresolved, TypeTag::TypeIIIunresolved);
      const auto s = l2_distance_sq_to(p, lam, radius);
      v.evidence.push_back({"abelian-l2-distance", "lambda " + fmt(lam) + ", partial " + fmt(s.partial),
                            to_string(s.verdict) + ": " + s.reason});
      if (s.verdict == SeriesVerdict::Converges) return finish(std::move(v), TypeTag::TypeII1, TypeTag::TypeII1);
      if (s.verdict == SeriesVerdict::Diverges) return finish(std::move(v), TypeTag::TypeIII1, TypeTag::TypeIII1);
    }
    return finish(std::move(v), TypeTag::Unknown, TypeTag::NotComputed);
  }

  // Locally finite.
  if (G.is_locally_finite()) {
    if (L.is_singleton() && L.certified && L.points.front() > 0.0 && L.points.front() < 1.0) {
      const auto s = l2_distance_sq_to(p, L.points.front(), radius);
      v.evidence.push_back({"locally-finite-l2", "lambda " + fmt(L.points.front()), to_string(s.verdict)});
      if (s.verdict == SeriesVerdict::Converges) return finish(std::move(v), TypeTag::TypeII1, TypeTag::TypeII1);
    } else {
      v.evidence.push_back({"locally-finite-l2", "limit set {" + lpts + "}", "no single limit value"});
    }
    if (const auto* sp = std::get_if<cert::ShellProfile>(&p.certificate()); sp && sp->pair) {
      const auto& pr = *sp->pair;
      double w_sum = 0.0, v_sum = 0.0;
      for (const auto& g : G.enumerate_ball(radius)) {
        const int n = chain_level(G, g);
        const double x = p.value(g);
        if (pr.w_levels(n)) w_sum += (x - pr.lambda) * (x - pr.lambda);
        if (pr.v_levels(n)) v_sum += std::min(x, 1.0 - x);
      }
      v.evidence.push_back({"locally-finite-two-sided-pair",
                            pr.label + "; partial W-sum " + fmt(w_sum) + ", V-sum " + fmt(v_sum),
                            to_string(pr.series)});
      if (pr.series == SeriesVerdict::Converges) return finish(std::move(v), TypeTag::TypeIIinf, TypeTag::NotComputed);
    }
    if (p.delta()) {
      if (const auto part = p.ai_partition(); part && part->parts.size() >= 2)
        return stable_type_table(std::move(v), G, *part, gen_radius);
    }
    v.evidence.push_back({"locally-finite-residual", "no II certificate", "type III"});
    return finish(std::move(v), TypeTag::TypeIIIunresolved, TypeTag::NotComputed);
  }

  // General delta-bounded groups.
  if (!p.delta()) {
    v.evidence.push_back({"delta-bound", "none", "no applicable decision tree"});
    return finish(std::move(v), TypeTag::Unknown, TypeTag::NotComputed);
  }
  if (is_coboundary_certificate(p.certificate())) {
    v.evidence.push_back({"coboundary-certificate", certificate_name(p.certificate()), "c is a coboundary"});
    return finish(std::move(v), TypeTag::TypeII1, TypeTag::TypeII1);
  }
  if (const auto part = p.ai_partition(); part && part->parts.size() >= 2) {
    bool all_infinite = true;
    for (const auto& w : part->parts) all_infinite = all_infinite && part_is_infinite(w);
    if (all_infinite) {
      v.evidence.push_back({"almost-invariant-partition", std::to_string(part->parts.size()) + " infinite parts",
                            "c cohomologous to an almost invariant cocycle"});
      return stable_type_table(std::move(v), G, *part, gen_radius);
    }
  }
  if (L.is_singleton() && L.certified) {
    const auto s = l2_distance_sq_to(p, L.points.front(), radius);
    if (s.verdict == SeriesVerdict::Diverges) {
      v.evidence.push_back({"unique-limit-divergent", "lambda " + fmt(L.points.front()),
                            "not cohomologous to an almost invariant cocycle"});
      return finish(std::move(v), TypeTag::TypeIII1, TypeTag::TypeIII1);
    }
  }
  if (G.ends() == Ends::One && L.at_least_two_points() && L.certified) {
    v.evidence.push_back({"one-ended", "no infinite almost invariant set with infinite complement",
                          "not cohomologous to an almost invariant cocycle"});
    return finish(std::move(v), TypeTag::TypeIII1, TypeTag::TypeIII1);
  }
  v.evidence.push_back({"cohomology-class", certificate_name(p.certificate()), "not decided by any certificate"});
  return finish(std::move(v), TypeTag::Unknown, TypeTag::NotComputed);
}

}  // namespace btl
