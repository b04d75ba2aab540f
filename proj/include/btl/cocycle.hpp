#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "btl/profile.hpp"

namespace btl {

// c_g(h) = mu_h(0) - mu_{g^{-1}h}(0).
double cocycle_value(const MarginalProfile& profile, const Element& g, const Element& h);

struct CocycleNorm {
  double partial = 0.0;
  int radius = 0;
  std::optional<double> exact;
  std::string exact_source;
};

// ||c_g||^2 truncated to ball(radius); exact when the difference support is certified finite.
CocycleNorm cocycle_norm_sq(const MarginalProfile& profile, const Element& g, int radius);

struct KakutaniSum {
  double partial = 0.0;
  int radius = 0;
  std::optional<double> exact;
  NonsingularityVerdict verdict = NonsingularityVerdict::Unknown;
};

// sum_h (sqrt mu_{gh}(0) - sqrt mu_h(0))^2 + (sqrt mu_{gh}(1) - sqrt mu_h(1))^2.
KakutaniSum kakutani_sum(const MarginalProfile& profile, const Element& g, int radius);

struct CocycleReport {
  std::string g;
  double norm_sq_partial = 0.0;
  std::optional<double> norm_sq_exact;
  double kakutani_partial = 0.0;
  std::optional<double> kakutani_exact;
  NonsingularityVerdict verdict = NonsingularityVerdict::Unknown;
  int radius = 0;
};

CocycleReport cocycle_report(const MarginalProfile& profile, const Element& g, int radius);

// Finite piece of a configuration x in {0,1}^G.
struct ConfigurationWindow {
  std::vector<Element> sites;
  std::vector<std::uint8_t> bits;
  std::uint64_t seed = 0;
  std::uint64_t draw = 0;
};

struct RnValue {
  double log_rn = 0.0;
  bool truncated = false;
};

int site_index(const ConfigurationWindow& x, const Element& s);

// log d mu(g x)/d mu(x) = sum_h log(mu_{gh}(x_h) / mu_h(x_h)) over the window sites.
// truncated is set when the difference support of g is not contained in the window.
RnValue log_rn(const MarginalProfile& profile, const Element& g, const ConfigurationWindow& x);

// (g x)_s = x_{g^{-1} s}: the window is carried to g * sites.
ConfigurationWindow shift(const GroupModel& group, const Element& g, const ConfigurationWindow& x);

// log D_{a,b}(x_a, x_b) = log[mu_a(x_b) mu_b(x_a) / (mu_a(x_a) mu_b(x_b))].
double permutation_log_rn(const MarginalProfile& profile, const Element& a, const Element& b,
                          const ConfigurationWindow& x);
ConfigurationWindow transpose(const ConfigurationWindow& x, const Element& a, const Element& b);
// log d mu(sigma x)/d mu(x) for sigma a product of transpositions applied left to right, computed site by site.
double permutation_log_rn_direct(const MarginalProfile& profile,
                                 const std::vector<std::pair<Element, Element>>& transpositions,
                                 const ConfigurationWindow& x);
// Same quantity accumulated through the cocycle identity one transposition at a time.
double permutation_log_rn_composed(const MarginalProfile& profile,
                                   const std::vector<std::pair<Element, Element>>& transpositions,
                                   const ConfigurationWindow& x);

// gamma_rho(x', x) = sum_i [log mu_i(x'_i) - log mu_i(x_i)] - rho sum_i (x'_i - x_i).
double gamma_rho(const MarginalProfile& profile, double rho, const ConfigurationWindow& x_prime,
                 const ConfigurationWindow& x);

// Union of the difference supports of the given elements; throws InapplicableError when one is uncertified.
std::vector<Element> certified_window(const MarginalProfile& profile, const std::vector<Element>& elements);

}  // namespace btl
