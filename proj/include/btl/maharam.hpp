#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "btl/classifier.hpp"
#include "btl/cocycle.hpp"
#include "btl/profile.hpp"

namespace btl {

// ---- seeding -------------------------------------------------------------

// One step of the splitmix64 generator.
std::uint64_t splitmix64(std::uint64_t& state);
// Seed of chain c: the (c + 1)-th splitmix64 output of the stream seeded with master.
std::uint64_t chain_seed(std::uint64_t master, std::uint64_t chain);
// (rng() >> 11) * 2^-53, uniform on [0, 1).
double uniform01(std::mt19937_64& rng);

// x_h = 0 iff uniform01 < mu_h(0), one draw per site in order.
ConfigurationWindow sample_window(const MarginalProfile& profile, const std::vector<Element>& sites,
                                  std::mt19937_64& rng, std::uint64_t seed = 0, std::uint64_t draw = 0);

// ---- Maharam extension ---------------------------------------------------

struct MaharamState {
  ConfigurationWindow x;
  double t = 0.0;
  bool truncated = false;
};

// g (x, t) = (g x, t + log d mu(g x) / d mu(x)).
MaharamState maharam_step(const MarginalProfile& profile, const Element& g, const MaharamState& state);

// alpha/2 exp(-alpha |t|).
double nu_alpha_density(double alpha, double t);

// ---- sampling ------------------------------------------------------------

struct RnSample {
  Element g;
  double log_rn = 0.0;
  int window_radius = 0;
  bool truncated = false;
  std::uint64_t seed = 0;
};

struct SamplingOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  int generator_radius = 1;
  int chains = 8;
  // Window radius for elements without a certified difference support.
  int truncation_radius = -1;
};

// Samples g uniformly from ball(generator_radius) and x from mu on the window of g.
std::vector<RnSample> sample_rn(const MarginalProfile& profile, const SamplingOptions& options);

struct Histogram {
  // Exact lattice points when points is true, otherwise bin left edges plus a final right edge.
  bool points = true;
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

struct LatticeFit {
  std::size_t certified = 0;
  std::size_t truncated = 0;
  bool inconclusive = false;
  bool dense = false;
  std::optional<double> spacing;
  double fit_fraction = 0.0;
  bool all_zero = false;
  Histogram histogram;
  std::string note;
};

inline constexpr double kSpacingNoiseFloor = 1e-3;
inline constexpr double kFitFraction = 0.99;
inline constexpr double kLatticeTol = 1e-9;

// Histogram of certified samples and the largest spacing above the noise floor on which 99% of them lie.
LatticeFit fit_lattice(const std::vector<RnSample>& samples, bool allow_truncated = false);

struct RatioLattice {
  LatticeFit fit;
  std::vector<RnSample> samples;
};

RatioLattice empirical_ratio_lattice(const MarginalProfile& profile, const SamplingOptions& options,
                                     bool allow_truncated = false);

// The fitted spacing equals the classifier's lattice generator, or both are dense.
bool lattice_agrees(const LatticeFit& fit, const LatticeOrDense& lattice, double tol = 1e-6);

}  // namespace btl
