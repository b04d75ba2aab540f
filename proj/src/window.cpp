#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "btl/cocycle.hpp"
#include "btl/error.hpp"

namespace btl {

int site_index(const ConfigurationWindow& x, const Element& s) {
  for (std::size_t i = 0; i < x.sites.size(); ++i)
    if (x.sites[i] == s) return static_cast<int>(i);
  return -1;
}

RnValue log_rn(const MarginalProfile& profile, const Element& g, const ConfigurationWindow& x) {
  const GroupModel& G = profile.group();
  if (x.bits.size() != x.sites.size()) throw StructuralError("window bits and sites differ in length");
  RnValue out;
  for (std::size_t i = 0; i < x.sites.size(); ++i) {
    const Element& h = x.sites[i];
    const int b = x.bits[i];
    out.log_rn += profile.log_marginal(G.multiply(g, h), b) - profile.log_marginal(h, b);
  }
  const auto support = profile.difference_support(g);
  if (!support) {
    out.truncated = true;
  } else {
    std::unordered_set<Element, ElementHash> have(x.sites.begin(), x.sites.end());
    out.truncated = std::any_of(support->begin(), support->end(), [&](const Element& h) { return !have.count(h); });
  }
  return out;
}

ConfigurationWindow shift(const GroupModel& group, const Element& g, const ConfigurationWindow& x) {
  ConfigurationWindow out = x;
  for (auto& s : out.sites) s = group.multiply(g, s);
  return out;
}

namespace {

int require_site(const ConfigurationWindow& x, const Element& s) {
  const int i = site_index(x, s);
  if (i < 0) throw StructuralError("site is not in the configuration window");
  return i;
}

}  // namespace

double permutation_log_rn(const MarginalProfile& profile, const Element& a, const Element& b,
                          const ConfigurationWindow& x) {
  const int xa = x.bits[require_site(x, a)], xb = x.bits[require_site(x, b)];
  return profile.log_marginal(a, xb) + profile.log_marginal(b, xa) - profile.log_marginal(a, xa) -
         profile.log_marginal(b, xb);
}

ConfigurationWindow transpose(const ConfigurationWindow& x, const Element& a, const Element& b) {
  ConfigurationWindow out = x;
  std::swap(out.bits[require_site(x, a)], out.bits[require_site(x, b)]);
  return out;
}

double permutation_log_rn_direct(const MarginalProfile& profile,
                                 const std::vector<std::pair<Element, Element>>& transpositions,
                                 const ConfigurationWindow& x) {
  ConfigurationWindow y = x;
  for (const auto& [a, b] : transpositions) y = transpose(y, a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < x.sites.size(); ++i)
    s += profile.log_marginal(x.sites[i], y.bits[i]) - profile.log_marginal(x.sites[i], x.bits[i]);
  return s;
}

double permutation_log_rn_composed(const MarginalProfile& profile,
                                   const std::vector<std::pair<Element, Element>>& transpositions,
                                   const ConfigurationWindow& x) {
  ConfigurationWindow y = x;
  double s = 0.0;
  for (const auto& [a, b] : transpositions) {
    s += permutation_log_rn(profile, a, b, y);
    y = transpose(y, a, b);
  }
  return s;
}

double gamma_rho(const MarginalProfile& profile, double rho, const ConfigurationWindow& x_prime,
                 const ConfigurationWindow& x) {
  if (x.sites != x_prime.sites) throw StructuralError("gamma_rho needs configurations on the same window");
  double s = 0.0;
  for (std::size_t i = 0; i < x.sites.size(); ++i) {
    s += profile.log_marginal(x.sites[i], x_prime.bits[i]) - profile.log_marginal(x.sites[i], x.bits[i]);
    s -= rho * (static_cast<int>(x_prime.bits[i]) - static_cast<int>(x.bits[i]));
  }
  return s;
}

std::vector<Element> certified_window(const MarginalProfile& profile, const std::vector<Element>& elements) {
  const GroupModel& G = profile.group();
  std::set<Element> acc;
  for (const auto& g : elements) {
    auto d = profile.difference_support(g);
    if (!d) throw InapplicableError("difference support of " + G.to_string(g) + " is not certified finite");
    acc.insert(d->begin(), d->end());
  }
  std::vector<Element> out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end(), [&](const Element& a, const Element& b) { return G.less(a, b); });
  return out;
}

}  // namespace btl
