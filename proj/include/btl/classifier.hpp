#pragma once

#include <optional>
#include <string>
#include <vector>

#include "btl/almost_invariant.hpp"
#include "btl/conservativeness.hpp"
#include "btl/profile.hpp"
#include "btl/verdict.hpp"

namespace btl {

enum class TypeTag {
  Dissipative,
  TypeI,
  TypeII1,
  TypeIIinf,
  TypeIIIlambda,
  TypeIII1,
  TypeIII0,
  TypeIIIunresolved,
  Unknown,
  NotComputed
};

std::string to_string(TypeTag t);

struct TypeVerdict {
  TypeTag tag = TypeTag::Unknown;
  std::optional<double> lambda;
  TypeTag stable = TypeTag::NotComputed;
  std::optional<double> stable_lambda;
  // Types of X x Y over ergodic pmp Y when the stable type is not a single type.
  std::string stable_note;
  EvidenceTrail evidence;

  std::string label() const;
};

// Either dense or a Z with a > 0 (log units).
struct LatticeOrDense {
  bool dense = false;
  double a = 0.0;
  // Dense was reported because rational dependence could not be decided within the caps.
  bool undecided = false;
};

// |x - (p/q) y| small with q <= 1e6: rational dependence of two reals by continued fractions.
std::optional<std::pair<long long, long long>> rational_ratio(double x, double y);
// Closed subgroup of R generated by the given reals (zero generators are ignored).
LatticeOrDense lattice_from_generators(const std::vector<double>& generators);
// Subgroup generated by log(l_i / (1 - l_i)) - log(l_j / (1 - l_j)).
LatticeOrDense lambda_lattice(const std::vector<double>& values);

// |W \ gW| - |gW \ W|.
long long omega_W(const AlmostInvariantSet& w, const Element& g);
// sum_i omega_{W_i}(g) log(l_i).
double omega(const AiPartition& partition, const Element& g);

struct ClassifyOptions {
  int radius = -1;
};

TypeVerdict classify(const MarginalProfile& profile, const ConservativenessVerdict& conservativeness,
                     const ClassifyOptions& options = {});

}  // namespace btl
