#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "btl/cocycle.hpp"
#include "btl/profile.hpp"
#include "btl/verdict.hpp"

namespace btl {

// 1 / (delta (1 - delta)) for 0 < delta <= 1/2.
double kappa0(double delta);
// 1.01 kappa0(delta): the strong conservativeness criterion needs kappa > kappa0 strictly.
double default_kappa(double delta);

// ---- growth series -------------------------------------------------------

struct GrowthSeries {
  double partial = 0.0;
  int radius = 0;
  double kappa = 0.0;
  SeriesVerdict verdict = SeriesVerdict::Unknown;
  std::string pattern;
  std::string reason;
};

// sum_{g in ball(radius)} exp(-4 kappa ||c_g||^2) with a certificate-backed verdict on the full series.
// declared_minorant names a divergent minorant supplied by the caller.
GrowthSeries growth_series(const MarginalProfile& profile, double kappa, int radius,
                           std::optional<std::string> declared_minorant = std::nullopt);

// ---- dissipativity -------------------------------------------------------

struct DissipativeBound {
  double product = 1.0;
  double hellinger_bound = 1.0;
  bool exact = false;
};

// prod_{h in ball(radius)} (sqrt(mu_gh(0) mu_h(0)) + sqrt(mu_gh(1) mu_h(1))), an upper bound for
// int sqrt(d mu(g x) / d mu(x)) d mu; exact when the difference support lies in the ball.
DissipativeBound dissipative_upper_bound(const MarginalProfile& profile, const Element& g, int radius);

// Hellinger affinity sqrt(ab) + sqrt((1-a)(1-b)).
double affinity(double a, double b);

// sum_g dissipative_upper_bound(g) on ball(radius); Converges certifies dissipativity.
SeriesEstimate dissipative_series(const MarginalProfile& profile, int radius);

// ---- probability measures on G and exact windows --------------------------

struct EtaMeasure {
  std::vector<std::pair<Element, double>> weights;

  double at(const Element& g) const;
  void validate() const;
};

EtaMeasure dirac(const Element& g);
EtaMeasure uniform_on(std::vector<Element> support);
// Uniform on the box [0, n)^d of Z^d.
EtaMeasure uniform_on_folner_box(const GroupModel& lattice, int n);
// Uniform on {g in ball(radius) : ||c_g||^2 <= s}.
EtaMeasure uniform_on_sublevel(const MarginalProfile& profile, double s, int radius);

// Real function on {0,1}^sites; bit i of the index is x at sites[i].
struct WindowFunction {
  std::vector<Element> sites;
  std::vector<double> values;
};

inline constexpr int kMaxExactSites = 20;

// Exact expectation over the product measure restricted to the sites.
double window_expectation(const MarginalProfile& profile, const WindowFunction& f);
// sum_x mu(x) exp(sign * log_rn(g, x)) over all configurations of the sites.
double exhaustive_rn_moment(const MarginalProfile& profile, const Element& g, const std::vector<Element>& sites,
                            int sign);
// int d mu(x) / d mu(k x) d mu = prod_h (mu_h(0)^2 / mu_kh(0) + mu_h(1)^2 / mu_kh(1)) over the difference support.
double inverse_rn_integral(const MarginalProfile& profile, const Element& k);
// a^2 / b + (1 - a)^2 / (1 - b).
double integral_factor(double a, double b);

// Site set carrying every quantity of the strong recurrence functional: base, its translates k^{-1} base and the
// difference supports of k for k in supp(eta)^{-1} supp(eta).
std::vector<Element> eta_window(const MarginalProfile& profile, const EtaMeasure& eta, const std::vector<Element>& base);

// sum_g eta(g)^2 int (sum_k eta(g k^{-1}) d mu(k x) / d mu(x))^{-1} d mu, exact on the window.
double strong_recurrence_lhs(const EtaMeasure& eta, const MarginalProfile& profile,
                             const std::vector<Element>& base = {});
// sum_k (sum_g eta(g)^2 eta(g k^{-1})) int d mu(x) / d mu(k x) d mu; bounds the functional above by convexity.
double recurrence_upper_bound(const EtaMeasure& eta, const MarginalProfile& profile);
// sum_{k,g} eta(g)^2 eta(g k^{-1}) exp(kappa1 ||c_k||^2).
double eta_condition(const EtaMeasure& eta, const MarginalProfile& profile, double kappa1);
// theta_eta(F)(x) = sum_g eta(g) [sum_k eta(g k^{-1}) r_k(x) F(k x)] / [sum_k eta(g k^{-1}) r_k(x)].
WindowFunction theta_eta(const EtaMeasure& eta, const WindowFunction& f, const MarginalProfile& profile);

// ---- locally finite shell estimate -----------------------------------------

// log int d mu / d mu(g x) for g in shell n of a chain profile constant on shells:
// sum_{m < n} |shell_m| log(A(l_m, l_n) A(l_n, l_m)).
double shell_log_integral(const GroupModel& chain, const std::function<double(int)>& level_value, int n);
// |shell_n|^{-2} sum_{g in shell_n} int d mu / d mu(g x) d mu.
double shell_estimate(const GroupModel& chain, const std::function<double(int)>& level_value, int n);
// Levels k_1 < k_2 < ... of a modulus-m chain with shell_estimate(n) < 1/n for the periodic cycle of values.
std::vector<std::int64_t> conservative_shell_levels(const std::vector<double>& cycle, int count, int modulus = 2);

// ---- verdict -------------------------------------------------------------

enum class ConservativenessTag { StronglyConservative, ConservativeAmenable, Dissipative, Unknown };

std::string to_string(ConservativenessTag t);

struct ConservativenessVerdict {
  ConservativenessTag tag = ConservativenessTag::Unknown;
  EvidenceTrail evidence;
  std::optional<double> kappa;
  std::optional<double> kappa0;
  std::optional<GrowthSeries> growth;
  std::optional<SeriesEstimate> dissipative;
  bool assumed = false;

  bool conservative() const {
    return tag == ConservativenessTag::StronglyConservative || tag == ConservativenessTag::ConservativeAmenable;
  }
};

struct ConservativenessOptions {
  std::optional<double> kappa;
  int radius = -1;
  std::optional<std::string> declared_minorant;
  // Scenario assertion that the action is conservative; recorded as an assumption.
  bool declared_conservative = false;
};

ConservativenessVerdict assess_conservativeness(const MarginalProfile& profile,
                                                const ConservativenessOptions& options = {});

}  // namespace btl
