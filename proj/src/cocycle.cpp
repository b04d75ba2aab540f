#include "btl/cocycle.hpp"

#include <cmath>

#include "btl/error.hpp"

namespace btl {

double cocycle_value(const MarginalProfile& profile, const Element& g, const Element& h) {
  const GroupModel& G = profile.group();
  return profile.value(h) - profile.value(G.multiply(G.inverse(g), h));
}

CocycleNorm cocycle_norm_sq(const MarginalProfile& profile, const Element& g, int radius) {
  const GroupModel& G = profile.group();
  const Element gi = G.inverse(g);
  CocycleNorm out;
  out.radius = radius;
  for (const auto& h : G.enumerate_ball(radius)) {
    const double c = profile.value(h) - profile.value(G.multiply(gi, h));
    out.partial += c * c;
  }
  if (auto partition = profile.ai_partition(); partition && partition->parts.size() == 2 &&
      std::holds_alternative<cert::PiecewiseConstantOnAIPartition>(profile.certificate()) &&
      std::get<cert::PiecewiseConstantOnAIPartition>(profile.certificate()).perturbation_l2 == 0.0 &&
      std::get<cert::PiecewiseConstantOnAIPartition>(profile.certificate()).perturbation_radius < 0) {
    // Two-set case: ||c_g||^2 = (on - off)^2 |W xor gW|.
    const double delta = partition->values[0] - partition->values[1];
    out.exact = delta * delta * static_cast<double>(boundary_parts(partition->parts[0], g).total());
    out.exact_source = "two-set partition boundary";
    return out;
  }
  // c_g(h) != 0 only on {h : mu_h != mu_{g^{-1}h}}, the difference support of g^{-1}.
  const auto r = profile.support_radius(gi);
  if (!r) return out;
  if (*r < 0) {
    out.exact = 0.0;
    out.exact_source = "constant profile";
    return out;
  }
  if (G.ball_size(*r) > G.budget()) return out;
  double s = 0.0;
  for (const auto& h : G.enumerate_ball(*r)) {
    const double c = profile.value(h) - profile.value(G.multiply(gi, h));
    s += c * c;
  }
  out.exact = s;
  out.exact_source = "certified difference support";
  return out;
}

namespace {

double hellinger_term(double a, double b) {
  const double d0 = std::sqrt(a) - std::sqrt(b);
  const double d1 = std::sqrt(1.0 - a) - std::sqrt(1.0 - b);
  return d0 * d0 + d1 * d1;
}

}  // namespace

KakutaniSum kakutani_sum(const MarginalProfile& profile, const Element& g, int radius) {
  const GroupModel& G = profile.group();
  KakutaniSum out;
  out.radius = radius;
  out.verdict = profile.nonsingularity();
  for (const auto& h : G.enumerate_ball(radius)) out.partial += hellinger_term(profile.value(G.multiply(g, h)), profile.value(h));
  const auto r = profile.support_radius(g);
  if (r && *r < 0) {
    out.exact = 0.0;
  } else if (r && G.ball_size(*r) <= G.budget()) {
    double s = 0.0;
    for (const auto& h : G.enumerate_ball(*r)) s += hellinger_term(profile.value(G.multiply(g, h)), profile.value(h));
    out.exact = s;
  }
  return out;
}

CocycleReport cocycle_report(const MarginalProfile& profile, const Element& g, int radius) {
  CocycleReport rep;
  rep.g = profile.group().to_string(g);
  rep.radius = radius;
  const auto n = cocycle_norm_sq(profile, g, radius);
  rep.norm_sq_partial = n.partial;
  rep.norm_sq_exact = n.exact;
  const auto k = kakutani_sum(profile, g, radius);
  rep.kakutani_partial = k.partial;
  rep.kakutani_exact = k.exact;
  rep.verdict = k.verdict;
  return rep;
}

}  // namespace btl
