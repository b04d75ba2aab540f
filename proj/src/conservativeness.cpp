#include "btl/conservativeness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "btl/almost_invariant.hpp"
#include "btl/error.hpp"

namespace btl {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

// Two complementary parts of an almost invariant partition with no perturbation.
struct TwoSet {
  const AlmostInvariantSet* w = nullptr;
  double a = 0.0, b = 0.0;
  double perturbation = 0.0;
};

std::optional<TwoSet> two_set(const MarginalProfile& p) {
  const auto* c = std::get_if<cert::PiecewiseConstantOnAIPartition>(&p.certificate());
  if (!c || c->partition.parts.size() != 2) return std::nullopt;
  const auto& parts = c->partition.parts;
  if (parts[0].tag() != parts[1].tag() || parts[0].complemented() == parts[1].complemented()) return std::nullopt;
  return TwoSet{&parts[0], c->partition.values[0], c->partition.values[1], c->perturbation_l2};
}

// Per-site log ratios log mu_{kh}(b) - log mu_h(b) on a fixed site list.
struct Ratios {
  std::vector<int> idx;
  std::vector<double> l0, l1;

  double log_rn(std::uint64_t mask) const {
    double s = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j) s += (mask >> idx[j] & 1u) ? l1[j] : l0[j];
    return s;
  }
};

Ratios ratios(const MarginalProfile& p, const Element& k, const std::vector<Element>& sites) {
  const GroupModel& G = p.group();
  Ratios r;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const Element kh = G.multiply(k, sites[i]);
    const double d0 = p.log_marginal(kh, 0) - p.log_marginal(sites[i], 0);
    const double d1 = p.log_marginal(kh, 1) - p.log_marginal(sites[i], 1);
    if (d0 == 0.0 && d1 == 0.0) continue;
    r.idx.push_back(static_cast<int>(i));
    r.l0.push_back(d0);
    r.l1.push_back(d1);
  }
  return r;
}

struct SiteLaw {
  std::vector<double> l0, l1;

  explicit SiteLaw(const MarginalProfile& p, const std::vector<Element>& sites) {
    for (const auto& s : sites) {
      l0.push_back(p.log_marginal(s, 0));
      l1.push_back(p.log_marginal(s, 1));
    }
  }
  double prob(std::uint64_t mask) const {
    double s = 0.0;
    for (std::size_t i = 0; i < l0.size(); ++i) s += (mask >> i & 1u) ? l1[i] : l0[i];
    return std::exp(s);
  }
};

void require_small(std::size_t n) {
  if (n > static_cast<std::size_t>(kMaxExactSites))
    throw BudgetError("exact window enumeration limited to " + std::to_string(kMaxExactSites) + " sites, got " +
                          std::to_string(n),
                      0);
}

std::vector<Element> certified_support(const MarginalProfile& p, const Element& k) {
  auto s = p.difference_support(k);
  if (!s) throw InapplicableError("difference support of " + p.group().to_string(k) + " is not certified");
  return *s;
}

double log_shell_size(const GroupModel& chain, int m) {
  const double cur = chain.chain_log_level_size(m);
  if (m == 1) return cur;  // G_0 is empty for shell data
  return cur + std::log1p(-std::exp(chain.chain_log_level_size(m - 1) - cur));
}

}  // namespace

double kappa0(double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) throw ValidationError("kappa0 needs 0 < delta <= 1/2");
  return 1.0 / (delta * (1.0 - delta));
}

double default_kappa(double delta) { return 1.01 * kappa0(delta); }

// ---- growth series -------------------------------------------------------

GrowthSeries growth_series(const MarginalProfile& p, double kappa, int radius,
                           std::optional<std::string> declared_minorant) {
  if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
  if (!p.delta()) throw InapplicableError("growth series criterion needs a delta bound on the profile");
  const GroupModel& G = p.group();
  GrowthSeries out;
  out.radius = radius;
  out.kappa = kappa;
  const int norm_radius = default_truncation_radius(G);
  for (const auto& g : G.enumerate_ball(radius)) {
    const auto n = cocycle_norm_sq(p, g, norm_radius);
    out.partial += std::exp(-4.0 * kappa * (n.exact ? *n.exact : n.partial));
  }

  const auto& c = p.certificate();
  if (const auto* ce = std::get_if<cert::ConstantEventually>(&c)) {
    out.verdict = SeriesVerdict::Diverges;
    out.pattern = "uniform-bound";
    out.reason = ce->radius < 0 ? "all norms vanish"
                                : "||c_g||^2 <= 2|ball(" + std::to_string(ce->radius) + ")| on an infinite group";
  } else if (const auto* cs = std::get_if<cert::ConvergentSeries>(&c); cs && cs->l2 == SeriesVerdict::Converges) {
    out.verdict = SeriesVerdict::Diverges;
    out.pattern = "uniform-bound";
    out.reason = "||c_g|| <= 2 ||mu - lambda||_2 < infinity";
  } else if (const auto* pc = std::get_if<cert::PiecewiseConstantOnAIPartition>(&c);
             pc && pc->partition.parts.size() == 1) {
    out.verdict = SeriesVerdict::Diverges;
    out.pattern = "uniform-bound";
    out.reason = "||c_g|| <= 2 x perturbation l2";
  } else if (const auto ts = two_set(p)) {
    const double d2 = (ts->a - ts->b) * (ts->a - ts->b);
    const double k = 4.0 * kappa * d2;
    out.pattern = "linear-vs-exponential";
    if (ts->w->tag() == AiTag::AfpEndsAtIdentity || ts->w->tag() == AiTag::HnnEndsAtIdentity) {
      const double bound = kappa_bound(G);
      const bool ok = ts->perturbation > 0.0 ? k < bound : k <= bound;
      out.verdict = ok ? SeriesVerdict::Diverges : SeriesVerdict::Unknown;
      out.reason = "4 kappa Delta^2 = " + fmt(k) + (ok ? " <= " : " > ") + "sphere growth exponent / (2|C|) = " +
                   fmt(bound);
    } else {
      out.verdict = SeriesVerdict::Unknown;
      out.reason = "no divergent comparison series for " + ts->w->describe();
    }
  } else {
    out.pattern = "none";
    out.reason = "certificate " + certificate_name(c) + " gives no comparison series";
  }
  if (out.verdict != SeriesVerdict::Diverges && declared_minorant) {
    out.verdict = SeriesVerdict::Diverges;
    out.pattern = "declared-minorant";
    out.reason = *declared_minorant;
  }
  return out;
}

// ---- dissipativity -------------------------------------------------------

double affinity(double a, double b) { return std::sqrt(a * b) + std::sqrt((1.0 - a) * (1.0 - b)); }

DissipativeBound dissipative_upper_bound(const MarginalProfile& p, const Element& g, int radius) {
  const GroupModel& G = p.group();
  DissipativeBound out;
  double hell = 0.0;
  auto factor = [&](const Element& h) {
    const double a = p.value(G.multiply(g, h)), b = p.value(h);
    out.product *= affinity(a, b);
    const double s0 = std::sqrt(a) - std::sqrt(b), s1 = std::sqrt(1.0 - a) - std::sqrt(1.0 - b);
    hell += s0 * s0 + s1 * s1;
  };
  const auto sr = p.support_radius(g);
  if (sr) {
    out.exact = *sr <= radius;
    for (const auto& h : certified_support(p, g))
      if (G.word_length(h) <= radius) factor(h);
  } else {
    for (const auto& h : G.enumerate_ball(radius)) factor(h);
  }
  out.hellinger_bound = std::exp(-0.5 * hell);
  if (out.product > out.hellinger_bound + 1e-10)
    throw std::logic_error("affinity product exceeds the Hellinger bound");
  return out;
}

SeriesEstimate dissipative_series(const MarginalProfile& p, int radius) {
  const GroupModel& G = p.group();
  SeriesEstimate out;
  out.radius = radius;
  const int r = default_truncation_radius(G);
  for (const auto& g : G.enumerate_ball(radius)) out.partial += dissipative_upper_bound(p, g, r).product;
  const auto ts = two_set(p);
  if (!ts || ts->perturbation != 0.0 || ts->a == ts->b) {
    out.reason = "no geometric tail certificate";
    return out;
  }
  const double rho = affinity(ts->a, ts->b);
  if (ts->w->tag() == AiTag::HalfLine) {
    out.verdict = SeriesVerdict::Converges;
    out.reason = "bound(g) = rho^|g| with rho = " + fmt(rho) + "; sum = " + fmt(1.0 + 2.0 * rho / (1.0 - rho));
  } else if (ts->w->tag() == AiTag::AfpEndsAtIdentity) {
    const double q = static_cast<double>(G.afp_index_a() - 1) * static_cast<double>(G.afp_index_b() - 1);
    const double ratio = q * std::pow(rho, 2.0 * G.amalgam_order());
    out.verdict = ratio < 1.0 ? SeriesVerdict::Converges : SeriesVerdict::Unknown;
    out.reason = "bound(g) = rho^(2n|C|) against sphere growth q^n: q rho^(2|C|) = " + fmt(ratio);
  } else {
    out.reason = "boundary sizes only bounded above for " + ts->w->describe();
  }
  return out;
}

// ---- probability measures on G and exact windows --------------------------

double EtaMeasure::at(const Element& g) const {
  for (const auto& [h, w] : weights)
    if (h == g) return w;
  return 0.0;
}

void EtaMeasure::validate() const {
  if (weights.empty()) throw ValidationError("eta has empty support");
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i].second > 0.0) || !std::isfinite(weights[i].second))
      throw ValidationError("eta weights must be positive");
    for (std::size_t j = 0; j < i; ++j)
      if (weights[j].first == weights[i].first) throw ValidationError("eta lists an element twice");
    s += weights[i].second;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw ValidationError("eta weights sum to " + fmt(s));
}

EtaMeasure dirac(const Element& g) { return EtaMeasure{{{g, 1.0}}}; }

EtaMeasure uniform_on(std::vector<Element> support) {
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (support.empty()) throw ValidationError("uniform measure on an empty set");
  EtaMeasure out;
  const double w = 1.0 / static_cast<double>(support.size());
  for (auto& g : support) out.weights.push_back({std::move(g), w});
  return out;
}

EtaMeasure uniform_on_folner_box(const GroupModel& lattice, int n) {
  if (lattice.family() != Family::IntegerLattice) throw UnsupportedError("Folner boxes are defined on Z^d");
  if (n < 1) throw ValidationError("box side must be positive");
  const int d = std::get<IntegerLattice>(lattice.data()).dim;
  std::vector<Element> box;
  std::vector<std::int32_t> x(static_cast<std::size_t>(d), 0);
  while (true) {
    box.push_back(lattice.lattice(x));
    int i = 0;
    while (i < d && ++x[static_cast<std::size_t>(i)] == n) x[static_cast<std::size_t>(i++)] = 0;
    if (i == d) break;
  }
  return uniform_on(std::move(box));
}

EtaMeasure uniform_on_sublevel(const MarginalProfile& p, double s, int radius) {
  std::vector<Element> f;
  const int nr = default_truncation_radius(p.group());
  for (const auto& g : p.group().enumerate_ball(radius)) {
    const auto n = cocycle_norm_sq(p, g, nr);
    if ((n.exact ? *n.exact : n.partial) <= s) f.push_back(g);
  }
  return uniform_on(std::move(f));
}

double integral_factor(double a, double b) { return a * a / b + (1.0 - a) * (1.0 - a) / (1.0 - b); }

double window_expectation(const MarginalProfile& p, const WindowFunction& f) {
  require_small(f.sites.size());
  const std::uint64_t n = std::uint64_t{1} << f.sites.size();
  if (f.values.size() != n) throw StructuralError("window function table has the wrong size");
  const SiteLaw law(p, f.sites);
  double s = 0.0;
  for (std::uint64_t m = 0; m < n; ++m) s += law.prob(m) * f.values[m];
  return s;
}

double exhaustive_rn_moment(const MarginalProfile& p, const Element& g, const std::vector<Element>& sites, int sign) {
  require_small(sites.size());
  const SiteLaw law(p, sites);
  const Ratios r = ratios(p, g, sites);
  double s = 0.0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << sites.size()); ++m)
    s += law.prob(m) * std::exp(sign * r.log_rn(m));
  return s;
}

double inverse_rn_integral(const MarginalProfile& p, const Element& k) {
  const GroupModel& G = p.group();
  double prod = 1.0;
  for (const auto& h : certified_support(p, k)) prod *= integral_factor(p.value(h), p.value(G.multiply(k, h)));
  return prod;
}

namespace {

struct EtaShifts {
  std::vector<Element> ks;
  std::unordered_map<Element, std::size_t, ElementHash> index;
  // kidx[g][s] = index of s^{-1} g
  std::vector<std::vector<std::size_t>> kidx;
};

EtaShifts eta_shifts(const GroupModel& G, const EtaMeasure& eta) {
  EtaShifts out;
  for (const auto& [g, wg] : eta.weights) {
    std::vector<std::size_t> row;
    for (const auto& [s, ws] : eta.weights) {
      const Element k = G.multiply(G.inverse(s), g);
      auto [it, fresh] = out.index.emplace(k, out.ks.size());
      if (fresh) out.ks.push_back(k);
      row.push_back(it->second);
    }
    out.kidx.push_back(std::move(row));
  }
  return out;
}

}  // namespace

std::vector<Element> eta_window(const MarginalProfile& p, const EtaMeasure& eta, const std::vector<Element>& base) {
  const GroupModel& G = p.group();
  std::vector<Element> s = base;
  for (const auto& k : eta_shifts(G, eta).ks) {
    const Element ki = G.inverse(k);
    for (const auto& b : base) s.push_back(G.multiply(ki, b));
    const auto d = certified_support(p, k);
    s.insert(s.end(), d.begin(), d.end());
  }
  std::sort(s.begin(), s.end(), [&](const Element& x, const Element& y) { return G.less(x, y); });
  s.erase(std::unique(s.begin(), s.end()), s.end());
  require_small(s.size());
  return s;
}

double strong_recurrence_lhs(const EtaMeasure& eta, const MarginalProfile& p, const std::vector<Element>& base) {
  eta.validate();
  const GroupModel& G = p.group();
  const auto sites = eta_window(p, eta, base);
  const auto sh = eta_shifts(G, eta);
  std::vector<Ratios> rs;
  for (const auto& k : sh.ks) rs.push_back(ratios(p, k, sites));
  const SiteLaw law(p, sites);
  std::vector<double> r(sh.ks.size());
  double total = 0.0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << sites.size()); ++m) {
    for (std::size_t i = 0; i < rs.size(); ++i) r[i] = std::exp(rs[i].log_rn(m));
    const double px = law.prob(m);
    for (std::size_t gi = 0; gi < eta.weights.size(); ++gi) {
      double denom = 0.0;
      for (std::size_t si = 0; si < eta.weights.size(); ++si) denom += eta.weights[si].second * r[sh.kidx[gi][si]];
      const double wg = eta.weights[gi].second;
      total += wg * wg * px / denom;
    }
  }
  return total;
}

double recurrence_upper_bound(const EtaMeasure& eta, const MarginalProfile& p) {
  eta.validate();
  const auto sh = eta_shifts(p.group(), eta);
  std::vector<double> inv;
  for (const auto& k : sh.ks) inv.push_back(inverse_rn_integral(p, k));
  double total = 0.0;
  for (std::size_t gi = 0; gi < eta.weights.size(); ++gi)
    for (std::size_t si = 0; si < eta.weights.size(); ++si)
      total += eta.weights[gi].second * eta.weights[gi].second * eta.weights[si].second * inv[sh.kidx[gi][si]];
  return total;
}

double eta_condition(const EtaMeasure& eta, const MarginalProfile& p, double kappa1) {
  eta.validate();
  const auto sh = eta_shifts(p.group(), eta);
  const int nr = default_truncation_radius(p.group());
  std::vector<double> e;
  for (const auto& k : sh.ks) {
    const auto n = cocycle_norm_sq(p, k, nr);
    e.push_back(std::exp(kappa1 * (n.exact ? *n.exact : n.partial)));
  }
  double total = 0.0;
  for (std::size_t gi = 0; gi < eta.weights.size(); ++gi)
    for (std::size_t si = 0; si < eta.weights.size(); ++si)
      total += eta.weights[gi].second * eta.weights[gi].second * eta.weights[si].second * e[sh.kidx[gi][si]];
  return total;
}

WindowFunction theta_eta(const EtaMeasure& eta, const WindowFunction& f, const MarginalProfile& p) {
  eta.validate();
  if (f.values.size() != (std::uint64_t{1} << f.sites.size()))
    throw StructuralError("window function table has the wrong size");
  const GroupModel& G = p.group();
  const auto sites = eta_window(p, eta, f.sites);
  const auto sh = eta_shifts(G, eta);
  std::unordered_map<Element, int, ElementHash> pos;
  for (std::size_t i = 0; i < sites.size(); ++i) pos[sites[i]] = static_cast<int>(i);
  std::vector<Ratios> rs;
  // at[k][j]: position of k^{-1} f.sites[j], since (k x)_s = x_{k^{-1} s}
  std::vector<std::vector<int>> at;
  for (const auto& k : sh.ks) {
    rs.push_back(ratios(p, k, sites));
    const Element ki = G.inverse(k);
    std::vector<int> row;
    for (const auto& s : f.sites) row.push_back(pos.at(G.multiply(ki, s)));
    at.push_back(std::move(row));
  }
  WindowFunction out;
  out.sites = sites;
  out.values.assign(std::size_t{1} << sites.size(), 0.0);
  std::vector<double> r(sh.ks.size()), fk(sh.ks.size());
  for (std::uint64_t m = 0; m < out.values.size(); ++m) {
    for (std::size_t i = 0; i < rs.size(); ++i) {
      r[i] = std::exp(rs[i].log_rn(m));
      std::uint64_t mk = 0;
      for (std::size_t j = 0; j < at[i].size(); ++j) mk |= (m >> at[i][j] & 1u) << j;
      fk[i] = f.values[mk];
    }
    double v = 0.0;
    for (std::size_t gi = 0; gi < eta.weights.size(); ++gi) {
      double num = 0.0, den = 0.0;
      for (std::size_t si = 0; si < eta.weights.size(); ++si) {
        const std::size_t k = sh.kidx[gi][si];
        const double w = eta.weights[si].second * r[k];
        num += w * fk[k];
        den += w;
      }
      v += eta.weights[gi].second * num / den;
    }
    out.values[m] = v;
  }
  return out;
}

// ---- locally finite shell estimate -----------------------------------------

double shell_log_integral(const GroupModel& chain, const std::function<double(int)>& level_value, int n) {
  if (chain.family() != Family::LocallyFiniteChain) throw UnsupportedError("shell estimate requires a chain");
  if (n < 1) throw ValidationError("shell index starts at 1");
  const double ln = level_value(n);
  double s = 0.0;
  for (int m = 1; m < n; ++m) {
    const double lm = level_value(m);
    s += std::exp(log_shell_size(chain, m)) * std::log(integral_factor(lm, ln) * integral_factor(ln, lm));
  }
  return s;
}

double shell_estimate(const GroupModel& chain, const std::function<double(int)>& level_value, int n) {
  return std::exp(shell_log_integral(chain, level_value, n) - log_shell_size(chain, n));
}

std::vector<std::int64_t> conservative_shell_levels(const std::vector<double>& cycle, int count, int modulus) {
  if (cycle.empty() || count < 1 || modulus < 2) throw ValidationError("bad shell level request");
  for (double v : cycle)
    if (!(v > 0.0 && v < 1.0)) throw ValidationError("shell values must lie in (0, 1)");
  const double lm = std::log(static_cast<double>(modulus));
  auto value = [&](int n) { return cycle[static_cast<std::size_t>(n - 1) % cycle.size()]; };
  std::vector<std::int64_t> k{1};
  std::vector<double> shell{std::exp(lm)};
  while (static_cast<int>(k.size()) < count) {
    const int n = static_cast<int>(k.size()) + 1;
    double log_p = 0.0;
    for (int m = 1; m < n; ++m)
      log_p += shell[static_cast<std::size_t>(m - 1)] *
               std::log(integral_factor(value(m), value(n)) * integral_factor(value(n), value(m)));
    const double need = log_p + std::log(static_cast<double>(n));
    if (!std::isfinite(need) || need / lm > 1e15) throw BudgetError("shell level index overflows", n - 1);
    const std::int64_t prev = k.back();
    std::int64_t kn = std::max<std::int64_t>(prev + 1, static_cast<std::int64_t>(std::floor(need / lm)));
    auto log_shell = [&](std::int64_t x) {
      return static_cast<double>(x) * lm + std::log1p(-std::exp(static_cast<double>(prev - x) * lm));
    };
    while (log_shell(kn) <= need) ++kn;
    const double size = std::exp(log_shell(kn));
    if (!std::isfinite(size)) throw BudgetError("shell sizes overflow", n - 1);
    k.push_back(kn);
    shell.push_back(size);
  }
  return k;
}

// ---- verdict -------------------------------------------------------------

std::string to_string(ConservativenessTag t) {
  switch (t) {
    case ConservativenessTag::StronglyConservative:
      return "StronglyConservative";
    case ConservativenessTag::ConservativeAmenable:
      return "ConservativeAmenable";
    case ConservativenessTag::Dissipative:
      return "Dissipative";
    default:
      return "Unknown";
  }
}

namespace {

// Rechecks a chain recipe level by level; returns the failing level or 0.
int recheck_recipe(const GroupModel& G, const cert::ShellProfile& sp, const ShellRecipe& r) {
  if (r.kind == ShellRecipeKind::ShellEstimate) {
    for (int n = 1; n <= r.levels; ++n)
      if (!(shell_estimate(G, sp.level_value, n) < 1.0 / n)) return n;
    return 0;
  }
  for (int n = 1; 2 * n + 1 <= r.levels; ++n) {
    const double lg = G.chain_log_level_size(2 * n);
    const double index = std::exp(G.chain_log_level_size(2 * n + 1) - lg);
    const double x = std::exp(std::exp(lg) * std::log(r.lambda));
    if (!((index - 1.0) * std::log1p(-x) < -2.0 * std::log(static_cast<double>(n)))) return 2 * n + 1;
  }
  return 0;
}

}  // namespace

ConservativenessVerdict assess_conservativeness(const MarginalProfile& p, const ConservativenessOptions& o) {
  const GroupModel& G = p.group();
  ConservativenessVerdict v;
  const int radius = o.radius >= 0 ? std::min(o.radius, G.attainable_radius()) : default_truncation_radius(G);

  v.dissipative = dissipative_series(p, radius);
  v.evidence.push_back({"dissipative-tail-series", "radius " + std::to_string(radius),
                        "partial " + fmt(v.dissipative->partial) + ", " + to_string(v.dissipative->verdict) + ": " +
                            v.dissipative->reason});
  if (v.dissipative->verdict == SeriesVerdict::Converges) {
    v.tag = ConservativenessTag::Dissipative;
    return v;
  }

  if (p.delta()) {
    const double d = *p.delta();
    v.kappa0 = kappa0(d);
    v.kappa = o.kappa ? *o.kappa : default_kappa(d);
    v.growth = growth_series(p, *v.kappa, radius, o.declared_minorant);
    const bool above = *v.kappa > *v.kappa0;
    v.evidence.push_back({"growth-series-divergence",
                          "delta " + fmt(d) + ", kappa " + fmt(*v.kappa) + ", kappa0 " + fmt(*v.kappa0) + ", radius " +
                              std::to_string(radius),
                          "partial " + fmt(v.growth->partial) + ", " + to_string(v.growth->verdict) + " via " +
                              v.growth->pattern + ": " + v.growth->reason +
                              (above ? "" : "; kappa does not exceed kappa0")});
    if (above && v.growth->verdict == SeriesVerdict::Diverges) {
      v.tag = ConservativenessTag::StronglyConservative;
      return v;
    }
  } else {
    v.evidence.push_back({"growth-series-divergence", "no delta bound", "inapplicable"});
  }

  if (const auto* sp = std::get_if<cert::ShellProfile>(&p.certificate()); sp && sp->recipe) {
    const auto& r = *sp->recipe;
    const char* id = r.kind == ShellRecipeKind::ShellEstimate ? "shell-integral-estimate" : "two-sided-chain-recipe";
    const int bad = recheck_recipe(G, *sp, r);
    v.evidence.push_back({id, std::to_string(r.levels) + " recipe levels",
                          bad ? "inequality fails at level " + std::to_string(bad) : "rechecked on every level"});
    if (!bad) {
      v.tag = ConservativenessTag::ConservativeAmenable;
      return v;
    }
  }

  if (o.declared_conservative) {
    if (G.is_amenable()) {
      v.tag = ConservativenessTag::ConservativeAmenable;
      v.assumed = true;
      v.evidence.push_back({"declared-conservative", "scenario assertion on an amenable group",
                            "accepted as an assumption"});
      return v;
    }
    v.evidence.push_back({"declared-conservative", "scenario assertion on a nonamenable group",
                          "not sufficient for strong recurrence"});
  }
  return v;
}

}  // namespace btl
