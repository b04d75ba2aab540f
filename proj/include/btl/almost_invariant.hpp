#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_set>
#include <vector>

#include "btl/group.hpp"
#include "btl/verdict.hpp"

namespace btl {

enum class AiTag { HalfLine, LocallyFiniteUnion, AfpEndsAtIdentity, HnnEndsAtIdentity, Explicit };

std::string to_string(AiTag tag);

// A subset W of G with |W xor gW| finite for every g, given by a membership rule.
class AlmostInvariantSet {
 public:
  // Z: W = {n >= 0}.
  static AlmostInvariantSet half_line(GroupPtr group);
  // Free product: W = {n >= 1 and a_n in C}.
  static AlmostInvariantSet afp_ends_at_identity(GroupPtr group);
  // HNN: W = {n >= 1 and a_n in C_{-e_n}} with C_{+1} = C and C_{-1} = alpha(C).
  static AlmostInvariantSet hnn_ends_at_identity(GroupPtr group);
  // Chain: W = union of G_n \ G_{n-1} for n in S, with G_0 empty (the identity lies in level 1).
  static AlmostInvariantSet lf_union(GroupPtr group, std::function<bool(int)> levels, std::string levels_label);
  // Finite set, or the complement of one.
  static AlmostInvariantSet explicit_set(GroupPtr group, const std::vector<Element>& members);

  AlmostInvariantSet complement() const;
  bool contains(const Element& g) const;
  // W xor gW is contained in ball(boundary_radius(g)).
  int boundary_radius(const Element& g) const;

  const GroupModel& group() const { return *group_; }
  const GroupPtr& group_ptr() const { return group_; }
  AiTag tag() const noexcept { return tag_; }
  bool complemented() const noexcept { return complement_; }
  std::string describe() const;

 private:
  AlmostInvariantSet(GroupPtr group, AiTag tag, std::function<bool(const Element&)> rule, std::string label, int margin);

  GroupPtr group_;
  AiTag tag_;
  std::function<bool(const Element&)> rule_;
  std::string label_;
  int margin_ = 0;
  bool complement_ = false;
};

// Level index used for chain-shaped data: max(1, word length).
int chain_level(const GroupModel& group, const Element& g);

// Default set for a model: half-line, free product and HNN constructions.
AlmostInvariantSet construct_ai_set(GroupPtr group);

// Chain union set after checking |G_n \ G_{n-1}| exp(-2 kappa |G_{n-1}|) >= 1 on every enumerable level.
AlmostInvariantSet construct_lf_ai_set(GroupPtr chain, double kappa, std::function<bool(int)> levels,
                                       std::string levels_label);
// Levels k_1 < k_2 < ... of a modulus-m chain satisfying the growth inequality for kappa.
std::vector<std::int64_t> chain_levels_for_kappa(double kappa, int count, int modulus = 2);

struct BoundaryParts {
  std::size_t w_minus_gw = 0;
  std::size_t gw_minus_w = 0;
  std::size_t total() const noexcept { return w_minus_gw + gw_minus_w; }
};

// Exact counts of W \ gW and gW \ W over the certified ball.
BoundaryParts boundary_parts(const AlmostInvariantSet& w, const Element& g);
std::vector<Element> symmetric_difference(const AlmostInvariantSet& w, const Element& g);

// c_W(g) = 1_W - 1_{gW} assembled from the cocycle identity over the normal form of g.
std::map<Element, int> ai_cocycle_decomposition(const AlmostInvariantSet& w, const Element& g);

// Free product: (log([A:C]-1) + log([B:C]-1)) / (2|C|). HNN: log(2[A:C]-1) / (2|C|).
double kappa_bound(const GroupModel& group);
// 4(1-lambda)^2 / lambda < kappa.
bool lambda_feasible(double lambda, double kappa);

// Sum over g of exp(-kappa |W xor gW|): partial sum on ball(radius) and a verdict from sphere growth.
SeriesEstimate ai_divergence(const AlmostInvariantSet& w, double kappa, int radius);

}  // namespace btl
