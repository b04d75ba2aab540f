#include "btl/profile.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <unordered_map>

#include "btl/error.hpp"

namespace btl {

namespace {

constexpr double kValueTol = 1e-12;

bool part_is_infinite(const AlmostInvariantSet& w) { return !(w.tag() == AiTag::Explicit && !w.complemented()); }

std::vector<double> distinct_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::fabs(a - b) <= kValueTol; }), v.end());
  return v;
}

double margin_of(double v) { return std::min(v, 1.0 - v); }

}  // namespace

bool LimitSet::has_interior_point() const {
  for (double p : points)
    if (p > 0.0 && p < 1.0) return true;
  for (const auto& i : intervals)
    if (i.hi > 0.0 && i.lo < 1.0) return true;
  return false;
}

bool LimitSet::within_endpoints() const {
  if (!intervals.empty()) return false;
  for (double p : points)
    if (p != 0.0 && p != 1.0) return false;
  return true;
}

std::string certificate_name(const TailCertificate& c) {
  switch (c.index()) {
    case 0:
      return "ConstantEventually";
    case 1:
      return "PiecewiseConstantOnAIPartition";
    case 2:
      return "ConvergentSeries";
    case 3:
      return "ShellProfile";
    case 4:
      return "Oscillating";
    default:
      return "None";
  }
}

std::string to_string(NonsingularityVerdict v) {
  switch (v) {
    case NonsingularityVerdict::Nonsingular:
      return "Nonsingular";
    case NonsingularityVerdict::Singular:
      return "Singular";
    default:
      return "Unknown";
  }
}

std::string to_string(NonatomicityVerdict v) {
  switch (v) {
    case NonatomicityVerdict::Nonatomic:
      return "Nonatomic";
    case NonatomicityVerdict::Atomic:
      return "Atomic";
    default:
      return "Unknown";
  }
}

int default_truncation_radius(const GroupModel& group) {
  int r = 4;
  switch (group.family()) {
    case Family::IntegerLattice:
      r = 64;
      break;
    case Family::LocallyFiniteChain:
      r = 6;
      break;
    default:
      r = 4;
  }
  return std::max(0, std::min(r, group.attainable_radius()));
}

MarginalProfile::MarginalProfile(GroupPtr group, std::function<double(const Element&)> value, std::optional<double> delta,
                                 TailCertificate certificate, std::string name)
    : group_(std::move(group)),
      value_(std::move(value)),
      delta_(delta),
      certificate_(std::move(certificate)),
      name_(std::move(name)) {
  if (delta_ && !(*delta_ > 0.0 && *delta_ <= 0.5)) throw ValidationError("delta must lie in (0, 1/2]");
  validate();
}

void MarginalProfile::validate() const {
  const GroupModel& G = *group_;
  const int radius = default_truncation_radius(G);
  auto partition = ai_partition();
  for (const auto& g : G.enumerate_ball(radius)) {
    const double v = value_(g);
    if (!(v > 0.0 && v < 1.0) || !std::isfinite(v))
      throw ValidationError(name_ + ": marginal at " + G.to_string(g) + " is outside (0, 1)");
    if (delta_ && (v < *delta_ - kValueTol || v > 1.0 - *delta_ + kValueTol))
      throw ValidationError(name_ + ": marginal at " + G.to_string(g) + " violates the delta bound");
    const int wl = G.word_length(g);
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, cert::ConstantEventually>) {
            if (wl > c.radius && std::fabs(v - c.lambda) > kValueTol)
              throw ValidationError(name_ + ": certificate constant disagrees at " + G.to_string(g));
          } else if constexpr (std::is_same_v<T, cert::PiecewiseConstantOnAIPartition>) {
            int owner = -1;
            for (std::size_t i = 0; i < c.partition.parts.size(); ++i) {
              if (c.partition.parts[i].contains(g)) {
                if (owner >= 0) throw ValidationError(name_ + ": partition parts overlap at " + G.to_string(g));
                owner = static_cast<int>(i);
              }
            }
            if (owner < 0) throw ValidationError(name_ + ": partition does not cover " + G.to_string(g));
            const bool exact = c.perturbation_radius >= 0 ? wl > c.perturbation_radius : c.perturbation_l2 == 0.0;
            if (exact && std::fabs(v - c.partition.values[owner]) > kValueTol)
              throw ValidationError(name_ + ": partition value disagrees at " + G.to_string(g));
          } else if constexpr (std::is_same_v<T, cert::ConvergentSeries>) {
            if (std::fabs(v - c.lambda) > c.envelope(g) + kValueTol)
              throw ValidationError(name_ + ": envelope violated at " + G.to_string(g));
          } else if constexpr (std::is_same_v<T, cert::ShellProfile>) {
            if (std::fabs(v - c.level_value(chain_level(G, g))) > kValueTol)
              throw ValidationError(name_ + ": level value disagrees at " + G.to_string(g));
          } else if constexpr (std::is_same_v<T, cert::Oscillating>) {
            if (v < c.lo - kValueTol || v > c.hi + kValueTol)
              throw ValidationError(name_ + ": value leaves the certified interval at " + G.to_string(g));
          }
        },
        certificate_);
  }
}

double MarginalProfile::log_marginal(const Element& h, int bit) const {
  const double v = value_(h);
  return bit == 0 ? std::log(v) : std::log1p(-v);
}

std::optional<int> MarginalProfile::support_radius(const Element& g) const {
  const GroupModel& G = *group_;
  const int n = G.word_length(g);
  const bool chain = G.family() == Family::LocallyFiniteChain;
  return std::visit(
      [&](const auto& c) -> std::optional<int> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, cert::ConstantEventually>) {
          if (c.radius < 0) return -1;
          return chain ? std::max(c.radius, n) : c.radius + n;
        } else if constexpr (std::is_same_v<T, cert::PiecewiseConstantOnAIPartition>) {
          if (c.perturbation_radius < 0 && c.perturbation_l2 != 0.0) return std::nullopt;
          int r = -1;
          for (const auto& w : c.partition.parts) r = std::max(r, w.boundary_radius(g));
          if (c.perturbation_radius >= 0) r = std::max(r, chain ? std::max(c.perturbation_radius, n) : c.perturbation_radius + n);
          return r;
        } else if constexpr (std::is_same_v<T, cert::ShellProfile>) {
          return std::max(1, n);
        } else {
          return std::nullopt;
        }
      },
      certificate_);
}

std::optional<std::vector<Element>> MarginalProfile::difference_support(const Element& g) const {
  const auto r = support_radius(g);
  if (!r) return std::nullopt;
  std::vector<Element> out;
  if (*r < 0) return out;
  for (const auto& h : group_->enumerate_ball(*r))
    if (value_(group_->multiply(g, h)) != value_(h)) out.push_back(h);
  return out;
}

std::optional<AiPartition> MarginalProfile::ai_partition() const {
  if (auto* p = std::get_if<cert::PiecewiseConstantOnAIPartition>(&certificate_)) return p->partition;
  if (auto* s = std::get_if<cert::ShellProfile>(&certificate_)) return s->partition;
  return std::nullopt;
}

LimitSet MarginalProfile::limit_set() const {
  LimitSet out;
  out.source = certificate_name(certificate_);
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, cert::ConstantEventually>) {
          out.points = {c.lambda};
        } else if constexpr (std::is_same_v<T, cert::PiecewiseConstantOnAIPartition>) {
          std::vector<double> v;
          for (std::size_t i = 0; i < c.partition.parts.size(); ++i)
            if (part_is_infinite(c.partition.parts[i])) v.push_back(c.partition.values[i]);
          out.points = distinct_sorted(v);
        } else if constexpr (std::is_same_v<T, cert::ConvergentSeries>) {
          out.points = {c.lambda};
        } else if constexpr (std::is_same_v<T, cert::ShellProfile>) {
          out.points = distinct_sorted(c.limit_values);
        } else if constexpr (std::is_same_v<T, cert::Oscillating>) {
          out.intervals = {Interval{c.lo, c.hi}};
          out.perfect = true;
        } else {
          // Empirical clusters of the values on the outer half of the truncation ball.
          const GroupModel& G = *group_;
          const int radius = default_truncation_radius(G);
          std::vector<double> v;
          for (const auto& g : G.enumerate_ball(radius))
            if (2 * G.word_length(g) >= radius && radius > 0) v.push_back(value_(g));
          if (v.size() < 16) throw BudgetError(name_ + ": ball too small for an empirical limit set", radius);
          std::sort(v.begin(), v.end());
          std::vector<double> clusters;
          for (double x : v)
            if (clusters.empty() || x - clusters.back() > 1e-3) clusters.push_back(x);
          out.points = clusters;
          out.certified = false;
        }
      },
      certificate_);
  return out;
}

NonsingularityVerdict MarginalProfile::nonsingularity() const {
  return std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, cert::ConstantEventually> || std::is_same_v<T, cert::ShellProfile>) {
          return NonsingularityVerdict::Nonsingular;
        } else if constexpr (std::is_same_v<T, cert::PiecewiseConstantOnAIPartition>) {
          if (c.perturbation_radius >= 0 || c.perturbation_l2 == 0.0 || delta_) return NonsingularityVerdict::Nonsingular;
          return NonsingularityVerdict::Unknown;
        } else if constexpr (std::is_same_v<T, cert::ConvergentSeries>) {
          return c.increments_l2 == SeriesVerdict::Converges ? NonsingularityVerdict::Nonsingular
                                                             : NonsingularityVerdict::Unknown;
        } else if constexpr (std::is_same_v<T, cert::Oscillating>) {
          return delta_ ? NonsingularityVerdict::Nonsingular : NonsingularityVerdict::Unknown;
        } else {
          return NonsingularityVerdict::Unknown;
        }
      },
      certificate_);
}

NonatomicityVerdict MarginalProfile::nonatomicity() const {
  if (std::holds_alternative<cert::None>(certificate_)) return NonatomicityVerdict::Unknown;
  if (auto* s = std::get_if<cert::ConvergentSeries>(&certificate_)) {
    if (s->lambda == 0.0 || s->lambda == 1.0) {
      if (s->l1 == SeriesVerdict::Converges) return NonatomicityVerdict::Atomic;
      if (s->l1 == SeriesVerdict::Diverges) return NonatomicityVerdict::Nonatomic;
      return NonatomicityVerdict::Unknown;
    }
  }
  return limit_set().has_interior_point() ? NonatomicityVerdict::Nonatomic : NonatomicityVerdict::Unknown;
}

// ---- builtin profiles ----------------------------------------------------

MarginalProfile constant_profile(GroupPtr group, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("constant marginal must lie in (0, 1)");
  return MarginalProfile(std::move(group), [lambda](const Element&) { return lambda; }, margin_of(lambda),
                         cert::ConstantEventually{lambda, -1}, "Constant");
}

MarginalProfile two_value_profile(const AlmostInvariantSet& w, double on, double off) {
  if (!(on > 0.0 && on < 1.0 && off > 0.0 && off < 1.0)) throw ValidationError("marginals must lie in (0, 1)");
  AiPartition partition{{w, w.complement()}, {on, off}};
  auto rule = [w, on, off](const Element& g) { return w.contains(g) ? on : off; };
  return MarginalProfile(w.group_ptr(), rule, std::min(margin_of(on), margin_of(off)),
                         cert::PiecewiseConstantOnAIPartition{std::move(partition), 0.0, -1}, "TwoValue");
}

MarginalProfile type_iii_lambda_candidate(const AlmostInvariantSet& w, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda must lie in (0, 1)");
  MarginalProfile p = two_value_profile(w, lambda / (1.0 + lambda), 1.0 / (1.0 + lambda));
  return MarginalProfile(p.group_ptr(), [p](const Element& g) { return p.value(g); }, p.delta(), p.certificate(),
                         "TypeIIIlambdaCandidate");
}

MarginalProfile shell_profile(GroupPtr chain, std::vector<double> cycle, std::optional<ShellRecipe> recipe) {
  if (chain->family() != Family::LocallyFiniteChain) throw UnsupportedError("shell profiles require a chain");
  if (cycle.empty()) throw ValidationError("shell profile needs at least one value");
  double delta = 0.5;
  for (double v : cycle) {
    if (!(v > 0.0 && v < 1.0)) throw ValidationError("shell values must lie in (0, 1)");
    delta = std::min(delta, margin_of(v));
  }
  if (distinct_sorted(cycle).size() == 1) {
    const double v = cycle.front();
    return MarginalProfile(std::move(chain), [v](const Element&) { return v; }, delta, cert::ConstantEventually{v, -1},
                           "ShellProfile");
  }
  const std::size_t p = cycle.size();
  auto level_value = [cycle](int n) { return cycle[static_cast<std::size_t>(n - 1) % cycle.size()]; };
  cert::ShellProfile c;
  c.level_value = level_value;
  c.limit_values = distinct_sorted(cycle);
  c.recipe = recipe;
  AiPartition partition;
  for (double v : c.limit_values) {
    std::vector<std::size_t> residues;
    for (std::size_t i = 0; i < p; ++i)
      if (std::fabs(cycle[i] - v) <= kValueTol) residues.push_back(i);
    std::string label = "n-1 mod " + std::to_string(p) + " in {";
    for (std::size_t i = 0; i < residues.size(); ++i) label += (i ? "," : "") + std::to_string(residues[i]);
    label += "}";
    partition.parts.push_back(AlmostInvariantSet::lf_union(
        chain,
        [residues, p](int n) {
          return std::find(residues.begin(), residues.end(), static_cast<std::size_t>(n - 1) % p) != residues.end();
        },
        label));
    partition.values.push_back(v);
  }
  if (partition.parts.size() >= 2) c.partition = std::move(partition);
  const GroupModel* g = chain.get();
  return MarginalProfile(chain, [g, level_value](const Element& x) { return level_value(chain_level(*g, x)); }, delta,
                         std::move(c), "ShellProfile");
}

std::vector<std::int64_t> ii_infinity_chain_levels(double lambda, int count) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda must lie in (0, 1)");
  if (count < 1) throw ValidationError("need at least one level");
  std::vector<std::int64_t> k{1};
  const double ln2 = std::log(2.0);
  while (static_cast<int>(k.size()) < count) {
    const int m = static_cast<int>(k.size()) + 1;  // level being chosen
    if (m % 2 == 0 || m == 3) {
      k.push_back(k.back() + 1);
      continue;
    }
    const int n = (m - 1) / 2;
    // sizes are powers of two: |G_2n| = 2^{k_{2n}}
    const double log_tail = std::exp(static_cast<double>(k.back()) * ln2) * std::log(lambda);
    if (log_tail < -700.0) throw BudgetError("level sizes too large for the two-sided recipe", m - 1);
    const double x = std::exp(log_tail);
    const double rate = -std::log1p(-x);
    // (2^d - 1) rate > 2 log n
    const double need = 2.0 * std::log(static_cast<double>(n)) / rate;
    auto d = static_cast<std::int64_t>(std::ceil(std::log2(need + 1.0)));
    while (d < 1 || (std::exp2(static_cast<double>(d)) - 1.0) * rate <= 2.0 * std::log(static_cast<double>(n))) ++d;
    k.push_back(k.back() + d);
  }
  return k;
}

MarginalProfile ii_infinity_profile(GroupPtr chain, double lambda, int recipe_levels) {
  if (chain->family() != Family::LocallyFiniteChain) throw UnsupportedError("two-sided profile requires a chain");
  if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda must lie in (0, 1)");
  const GroupModel* G = chain.get();
  auto level_value = [G, lambda](int level) {
    if (level % 2 == 1) return 1.0 - lambda;
    const int n = level / 2;
    const double cur = G->chain_log_level_size(level), prev = G->chain_log_level_size(level - 1);
    const double log_shell = cur + std::log1p(-std::exp(prev - cur));
    return std::exp(-std::log(2.0 * n * n) - log_shell);
  };
  cert::ShellProfile c;
  c.level_value = level_value;
  c.limit_values = {0.0, 1.0 - lambda};
  c.pair = ShellPair{[](int n) { return n % 2 == 1; }, [](int n) { return n % 2 == 0; }, 1.0 - lambda,
                     SeriesVerdict::Converges,
                     "odd levels carry 1-lambda exactly; even levels contribute sum 1/(2n^2)"};
  c.recipe = ShellRecipe{ShellRecipeKind::IIInfinity, recipe_levels, lambda};
  return MarginalProfile(chain, [G, level_value](const Element& x) { return level_value(chain_level(*G, x)); },
                         std::nullopt, std::move(c), "IIInfinityProfile");
}

MarginalProfile abelian_oscillating(GroupPtr z, double amplitude) {
  if (z->family() != Family::IntegerLattice || std::get<IntegerLattice>(z->data()).dim != 1)
    throw UnsupportedError("oscillating profile is defined on Z");
  if (!(amplitude > 0.0 && amplitude < 0.5)) throw ValidationError("amplitude must lie in (0, 1/2)");
  auto rule = [amplitude](const Element& g) {
    return 0.5 + amplitude * std::sin(std::log1p(std::fabs(static_cast<double>(g.code[0]))));
  };
  return MarginalProfile(std::move(z), rule, 0.5 - amplitude,
                         cert::Oscillating{0.5 - amplitude, 0.5 + amplitude, amplitude}, "AbelianOscillating");
}

MarginalProfile power_decay(GroupPtr lattice, double amplitude, double exponent) {
  if (lattice->family() != Family::IntegerLattice) throw UnsupportedError("power decay profile is defined on Z^d");
  if (!(exponent > 0.0)) throw ValidationError("exponent must be positive");
  if (!(amplitude > -0.5 && amplitude < 0.5))
    throw ValidationError("power decay profile leaves (0, 1) at the identity: amplitude must lie in (-1/2, 1/2)");
  const GroupModel* G = lattice.get();
  const int d = std::get<IntegerLattice>(lattice->data()).dim;
  auto envelope = [G, amplitude, exponent](const Element& g) {
    return std::fabs(amplitude) * std::pow(1.0 + G->word_length(g), -exponent);
  };
  auto rule = [G, amplitude, exponent](const Element& g) {
    return 0.5 + amplitude * std::pow(1.0 + G->word_length(g), -exponent);
  };
  // sum over Z^d of (1+|g|)^{-q} converges iff q > d; increments decay one order faster.
  cert::ConvergentSeries c{0.5,
                           envelope,
                           2.0 * exponent > d ? SeriesVerdict::Converges : SeriesVerdict::Diverges,
                           SeriesVerdict::Unknown,
                           2.0 * exponent + 2.0 > d ? SeriesVerdict::Converges : SeriesVerdict::Unknown,
                           "power envelope"};
  return MarginalProfile(std::move(lattice), rule, 0.5 - std::fabs(amplitude), std::move(c), "PowerDecay");
}

MarginalProfile geometric_atomic(GroupPtr z) {
  if (z->family() != Family::IntegerLattice || std::get<IntegerLattice>(z->data()).dim != 1)
    throw UnsupportedError("geometric profile is defined on Z");
  const GroupModel* G = z.get();
  auto rule = [G](const Element& g) { return std::ldexp(1.0, -G->word_length(g) - 2); };
  cert::ConvergentSeries c{0.0, rule, SeriesVerdict::Converges, SeriesVerdict::Converges, SeriesVerdict::Converges,
                           "geometric envelope"};
  return MarginalProfile(std::move(z), rule, std::nullopt, std::move(c), "GeometricAtomic");
}

MarginalProfile table_profile(GroupPtr group, const std::vector<std::pair<Element, double>>& entries, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("background marginal must lie in (0, 1)");
  auto table = std::make_shared<std::unordered_map<Element, double, ElementHash>>();
  int radius = -1;
  double delta = margin_of(lambda);
  for (const auto& [g, v] : entries) {
    group->check(g);
    if (!(v > 0.0 && v < 1.0)) throw ValidationError("table entry " + group->to_string(g) + " is outside (0, 1)");
    (*table)[g] = v;
    radius = std::max(radius, group->word_length(g));
    delta = std::min(delta, margin_of(v));
  }
  auto rule = [table, lambda](const Element& g) {
    auto it = table->find(g);
    return it == table->end() ? lambda : it->second;
  };
  return MarginalProfile(std::move(group), rule, delta, cert::ConstantEventually{lambda, radius}, "Table");
}

MarginalProfile function_profile(GroupPtr group, std::function<double(const Element&)> value, std::optional<double> delta,
                                 std::string name) {
  return MarginalProfile(std::move(group), std::move(value), delta, cert::None{}, std::move(name));
}

// ---- series over the group -----------------------------------------------

SeriesEstimate l2_distance_sq_to(const MarginalProfile& profile, double lambda, int radius) {
  SeriesEstimate est;
  est.radius = radius;
  for (const auto& g : profile.group().enumerate_ball(radius)) {
    const double d = profile.value(g) - lambda;
    est.partial += d * d;
  }
  const auto same = [lambda](double v) { return std::fabs(v - lambda) <= kValueTol; };
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, cert::ConstantEventually>) {
          est.verdict = same(c.lambda) ? SeriesVerdict::Converges : SeriesVerdict::Diverges;
          est.reason = "profile is eventually constant";
        } else if constexpr (std::is_same_v<T, cert::PiecewiseConstantOnAIPartition>) {
          bool all_same = true;
          for (std::size_t i = 0; i < c.partition.parts.size(); ++i)
            if (part_is_infinite(c.partition.parts[i]) && !same(c.partition.values[i])) all_same = false;
          est.verdict = all_same ? SeriesVerdict::Converges : SeriesVerdict::Diverges;
          est.reason = "an infinite part carries a value different from lambda";
          if (all_same) est.reason = "every infinite part carries lambda; perturbation is l2";
        } else if constexpr (std::is_same_v<T, cert::ConvergentSeries>) {
          est.verdict = same(c.lambda) ? c.l2 : SeriesVerdict::Diverges;
          est.reason = same(c.lambda) ? "declared envelope verdict (" + c.label + ")" : "profile converges to another value";
        } else if constexpr (std::is_same_v<T, cert::ShellProfile>) {
          const auto pts = distinct_sorted(c.limit_values);
          if (std::any_of(pts.begin(), pts.end(), [&](double v) { return !same(v); })) {
            est.verdict = SeriesVerdict::Diverges;
            est.reason = "a limit value differs from lambda on infinitely many levels";
          } else {
            est.verdict = SeriesVerdict::Unknown;
            est.reason = "level values converge to lambda; rate not certified";
          }
        } else if constexpr (std::is_same_v<T, cert::Oscillating>) {
          est.verdict = SeriesVerdict::Diverges;
          est.reason = "values accumulate on a whole interval";
        } else {
          est.verdict = SeriesVerdict::Unknown;
          est.reason = "no tail certificate";
        }
      },
      profile.certificate());
  return est;
}

SeriesEstimate nonatomicity_sum(const MarginalProfile& profile, int radius) {
  SeriesEstimate est;
  est.radius = radius;
  for (const auto& g : profile.group().enumerate_ball(radius)) est.partial += margin_of(profile.value(g));
  switch (profile.nonatomicity()) {
    case NonatomicityVerdict::Nonatomic:
      est.verdict = SeriesVerdict::Diverges;
      est.reason = "a limit value lies in (0, 1) or the declared envelope sum diverges";
      break;
    case NonatomicityVerdict::Atomic:
      est.verdict = SeriesVerdict::Converges;
      est.reason = "declared l1 envelope converges";
      break;
    default:
      est.verdict = SeriesVerdict::Unknown;
      est.reason = "no certificate decides the tail";
  }
  return est;
}

}  // namespace btl
