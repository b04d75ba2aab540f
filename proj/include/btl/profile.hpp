#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "btl/almost_invariant.hpp"
#include "btl/group.hpp"
#include "btl/verdict.hpp"

namespace btl {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Set of accumulation points of g -> mu_g(0) at infinity.
struct LimitSet {
  std::vector<double> points;
  std::vector<Interval> intervals;
  bool certified = true;
  bool perfect = false;
  std::string source;

  bool is_singleton() const { return intervals.empty() && points.size() == 1; }
  bool has_interior_point() const;
  bool within_endpoints() const;
  bool at_least_two_points() const { return !intervals.empty() || points.size() >= 2; }
};

// Disjoint cover of G by almost invariant sets with constant marginal on each part.
struct AiPartition {
  std::vector<AlmostInvariantSet> parts;
  std::vector<double> values;
};

// Chain levels split into an almost invariant pair: mu -> lambda on W-levels, mu -> {0,1} on V-levels.
struct ShellPair {
  std::function<bool(int)> w_levels;
  std::function<bool(int)> v_levels;
  double lambda = 0.5;
  SeriesVerdict series = SeriesVerdict::Unknown;
  std::string label;
};

enum class ShellRecipeKind { ShellEstimate, IIInfinity };

// The chain levels were chosen by a construction whose inequality can be rechecked level by level.
struct ShellRecipe {
  ShellRecipeKind kind = ShellRecipeKind::ShellEstimate;
  int levels = 0;
  double lambda = 0.5;
};

namespace cert {

// Profile equals lambda outside ball(radius); radius < 0 means everywhere.
struct ConstantEventually {
  double lambda = 0.5;
  int radius = -1;
};

// Piecewise constant on an almost invariant partition plus an l2 perturbation.
// perturbation_radius >= 0 bounds the support of the perturbation.
struct PiecewiseConstantOnAIPartition {
  AiPartition partition;
  double perturbation_l2 = 0.0;
  int perturbation_radius = -1;
};

// |mu_g(0) - lambda| <= envelope(g) with declared series verdicts.
struct ConvergentSeries {
  double lambda = 0.5;
  std::function<double(const Element&)> envelope;
  SeriesVerdict l2 = SeriesVerdict::Unknown;
  SeriesVerdict l1 = SeriesVerdict::Unknown;
  SeriesVerdict increments_l2 = SeriesVerdict::Unknown;
  std::string label;
};

// Chain profile constant on each level.
struct ShellProfile {
  std::function<double(int)> level_value;
  std::vector<double> limit_values;
  std::optional<AiPartition> partition;
  std::optional<ShellPair> pair;
  std::optional<ShellRecipe> recipe;
};

// Values fill the interval [lo, hi] densely; |mu_{n+1} - mu_n| <= increment / (1 + min(|n|, |n+1|)).
struct Oscillating {
  double lo = 0.0;
  double hi = 1.0;
  double increment = 0.0;
};

struct None {};

}  // namespace cert

using TailCertificate = std::variant<cert::ConstantEventually, cert::PiecewiseConstantOnAIPartition,
                                     cert::ConvergentSeries, cert::ShellProfile, cert::Oscillating, cert::None>;

std::string certificate_name(const TailCertificate& c);

enum class NonsingularityVerdict { Nonsingular, Singular, Unknown };
enum class NonatomicityVerdict { Nonatomic, Atomic, Unknown };

std::string to_string(NonsingularityVerdict v);
std::string to_string(NonatomicityVerdict v);

// Default truncation radius: 64 on lattices, 4 on free products, 6 on chains, clipped to the budget.
int default_truncation_radius(const GroupModel& group);

// Family of Bernoulli marginals g -> mu_g(0) in (0, 1).
class MarginalProfile {
 public:
  MarginalProfile(GroupPtr group, std::function<double(const Element&)> value, std::optional<double> delta,
                  TailCertificate certificate, std::string name);

  double value(const Element& g) const { return value_(g); }
  // log mu_h(x) for x in {0, 1}.
  double log_marginal(const Element& h, int bit) const;
  const std::optional<double>& delta() const noexcept { return delta_; }
  const TailCertificate& certificate() const noexcept { return certificate_; }
  const GroupModel& group() const noexcept { return *group_; }
  const GroupPtr& group_ptr() const noexcept { return group_; }
  const std::string& name() const noexcept { return name_; }

  // {h : mu_{gh} != mu_h} lies in ball(R); nullopt when not finitely certified, -1 when empty.
  std::optional<int> support_radius(const Element& g) const;
  // Exact sorted list {h : mu_{gh} != mu_h} when certified.
  std::optional<std::vector<Element>> difference_support(const Element& g) const;
  std::optional<AiPartition> ai_partition() const;
  LimitSet limit_set() const;
  NonsingularityVerdict nonsingularity() const;
  NonatomicityVerdict nonatomicity() const;

 private:
  void validate() const;

  GroupPtr group_;
  std::function<double(const Element&)> value_;
  std::optional<double> delta_;
  TailCertificate certificate_;
  std::string name_;
};

// ---- builtin profiles ----------------------------------------------------

MarginalProfile constant_profile(GroupPtr group, double lambda);
// mu = on over W and off over the complement.
MarginalProfile two_value_profile(const AlmostInvariantSet& w, double on, double off);
// mu = lambda/(1+lambda) on W and 1/(1+lambda) off W.
MarginalProfile type_iii_lambda_candidate(const AlmostInvariantSet& w, double lambda);
// Chain profile with level n value cycle[(n - 1) mod cycle.size()]; a single distinct value gives a constant profile.
MarginalProfile shell_profile(GroupPtr chain, std::vector<double> cycle, std::optional<ShellRecipe> recipe = std::nullopt);
// Chain levels for the two-sided construction: odd level steps satisfy
// (1 - lambda^{|G_2n|})^{[G_{2n+1}:G_2n] - 1} < 1/n^2, even steps add one coordinate.
std::vector<std::int64_t> ii_infinity_chain_levels(double lambda, int count);
// mu = 1 - lambda on odd levels, gamma_n = 1/(2 n^2 |G_2n \ G_{2n-1}|) on level 2n.
MarginalProfile ii_infinity_profile(GroupPtr chain, double lambda, int recipe_levels);
// mu_n = 1/2 + amplitude sin(log(1 + |n|)) on Z.
MarginalProfile abelian_oscillating(GroupPtr z, double amplitude);
// mu_g = 1/2 + amplitude (1 + |g|)^{-exponent} on Z^d.
MarginalProfile power_decay(GroupPtr lattice, double amplitude, double exponent);
// mu_n = 2^{-|n| - 2} on Z.
MarginalProfile geometric_atomic(GroupPtr z);
// Listed values, lambda elsewhere.
MarginalProfile table_profile(GroupPtr group, const std::vector<std::pair<Element, double>>& entries, double lambda);
// Arbitrary rule without a tail certificate.
MarginalProfile function_profile(GroupPtr group, std::function<double(const Element&)> value, std::optional<double> delta,
                                 std::string name);

// ---- series over the group -----------------------------------------------

// sum_g (mu_g(0) - lambda)^2.
SeriesEstimate l2_distance_sq_to(const MarginalProfile& profile, double lambda, int radius);
// sum_g min(mu_g(0), mu_g(1)).
SeriesEstimate nonatomicity_sum(const MarginalProfile& profile, int radius);

}  // namespace btl
