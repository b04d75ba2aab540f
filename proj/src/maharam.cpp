#include "btl/maharam.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "btl/error.hpp"

namespace btl {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t chain_seed(std::uint64_t master, std::uint64_t chain) {
  std::uint64_t s = master + 0x9E3779B97F4A7C15ULL * chain;
  return splitmix64(s);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ConfigurationWindow sample_window(const MarginalProfile& p, const std::vector<Element>& sites, std::mt19937_64& rng,
                                  std::uint64_t seed, std::uint64_t draw) {
  ConfigurationWindow x;
  x.sites = sites;
  x.seed = seed;
  x.draw = draw;
  x.bits.reserve(sites.size());
  for (const auto& s : sites) x.bits.push_back(uniform01(rng) < p.value(s) ? 0 : 1);
  return x;
}

MaharamState maharam_step(const MarginalProfile& p, const Element& g, const MaharamState& s) {
  const RnValue r = log_rn(p, g, s.x);
  return MaharamState{shift(p.group(), g, s.x), s.t + r.log_rn, s.truncated || r.truncated};
}

double nu_alpha_density(double alpha, double t) {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  return 0.5 * alpha * std::exp(-alpha * std::fabs(t));
}

namespace {

struct Plan {
  Element g;
  std::vector<double> mu0, l0, l1;
  int radius = 0;
  bool truncated = false;
};

Plan plan_for(const MarginalProfile& p, const Element& g, int truncation_radius) {
  const GroupModel& G = p.group();
  Plan out{g, {}, {}, {}, 0, false};
  std::vector<Element> sites;
  if (auto d = p.difference_support(g)) {
    sites = std::move(*d);
  } else {
    out.truncated = true;
    for (const auto& h : G.enumerate_ball(truncation_radius))
      if (p.value(G.multiply(g, h)) != p.value(h)) sites.push_back(h);
  }
  for (const auto& h : sites) {
    const Element gh = G.multiply(g, h);
    out.mu0.push_back(p.value(h));
    out.l0.push_back(p.log_marginal(gh, 0) - p.log_marginal(h, 0));
    out.l1.push_back(p.log_marginal(gh, 1) - p.log_marginal(h, 1));
    out.radius = std::max(out.radius, G.word_length(h));
  }
  return out;
}

}  // namespace

std::vector<RnSample> sample_rn(const MarginalProfile& p, const SamplingOptions& o) {
  if (o.chains < 1) throw ValidationError("need at least one chain");
  const GroupModel& G = p.group();
  const int tr = o.truncation_radius >= 0 ? std::min(o.truncation_radius, G.attainable_radius())
                                          : default_truncation_radius(G);
  std::vector<Plan> plans;
  for (const auto& g : G.enumerate_ball(o.generator_radius)) plans.push_back(plan_for(p, g, tr));

  const auto chains = static_cast<std::size_t>(o.chains);
  std::vector<std::vector<RnSample>> per(chains);
  auto run = [&](std::size_t c) {
    const std::size_t n = o.samples / chains + (c < o.samples % chains ? 1 : 0);
    const std::uint64_t seed = chain_seed(o.seed, c);
    std::mt19937_64 rng(seed);
    auto& out = per[c];
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(plans.size()));
      const Plan& pl = plans[std::min(pick, plans.size() - 1)];
      double s = 0.0;
      for (std::size_t j = 0; j < pl.mu0.size(); ++j) s += uniform01(rng) < pl.mu0[j] ? pl.l0[j] : pl.l1[j];
      out.push_back(RnSample{pl.g, s, pl.radius, pl.truncated, seed});
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t c = 1; c < chains; ++c) pool.emplace_back(run, c);
  run(0);
  for (auto& t : pool) t.join();
  std::vector<RnSample> all;
  all.reserve(o.samples);
  for (auto& v : per) all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  return all;
}

namespace {

double fraction_on(const std::vector<double>& v, double s) {
  std::size_t hit = 0;
  for (double x : v)
    if (std::fabs(x - s * std::round(x / s)) <= kLatticeTol * (1.0 + std::fabs(x))) ++hit;
  return v.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(v.size());
}

}  // namespace

LatticeFit fit_lattice(const std::vector<RnSample>& samples, bool allow_truncated) {
  LatticeFit fit;
  std::vector<double> v;
  for (const auto& s : samples) {
    if (s.truncated) ++fit.truncated;
    else ++fit.certified;
    if (!s.truncated || allow_truncated) v.push_back(s.log_rn);
  }
  if (v.empty()) {
    fit.inconclusive = true;
    fit.note = "every sample was truncated";
    return fit;
  }
  std::sort(v.begin(), v.end());
  std::vector<double> centers;
  std::vector<std::size_t> counts;
  for (double x : v) {
    if (!centers.empty() && std::fabs(x - centers.back()) <= kLatticeTol * (1.0 + std::fabs(x))) {
      ++counts.back();
    } else {
      centers.push_back(x);
      counts.push_back(1);
    }
  }
  if (centers.size() <= 64) {
    fit.histogram = Histogram{true, centers, counts};
  } else {
    const double lo = v.front(), hi = v.back(), w = (hi - lo) / 50.0;
    Histogram h{false, {}, std::vector<std::size_t>(50, 0)};
    for (int i = 0; i <= 50; ++i) h.edges.push_back(lo + w * i);
    for (double x : v) h.counts[std::min<std::size_t>(49, static_cast<std::size_t>((x - lo) / w))]++;
    fit.histogram = std::move(h);
  }
  fit.all_zero = std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
  if (fit.all_zero) {
    fit.note = "all samples are exactly zero";
    fit.fit_fraction = 1.0;
    return fit;
  }

  std::vector<double> candidates;
  std::vector<double> nonzero;
  for (double c : centers)
    if (std::fabs(c) > kLatticeTol) nonzero.push_back(c);
  const auto gcd = lattice_from_generators(nonzero);
  if (!gcd.dense && gcd.a >= kSpacingNoiseFloor) candidates.push_back(gcd.a);
  std::map<long long, std::size_t> gaps;
  for (std::size_t i = 1; i < centers.size(); ++i) gaps[std::llround((centers[i] - centers[i - 1]) * 1e9)]++;
  if (!gaps.empty()) {
    const auto mode = std::max_element(gaps.begin(), gaps.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    const double s = static_cast<double>(mode->first) * 1e-9;
    if (s >= kSpacingNoiseFloor) candidates.push_back(s);
  }
  std::sort(candidates.rbegin(), candidates.rend());
  for (double s : candidates) {
    const double f = fraction_on(v, s);
    if (f >= kFitFraction) {
      fit.spacing = s;
      fit.fit_fraction = f;
      fit.note = "lattice fits " + std::to_string(f);
      return fit;
    }
    fit.fit_fraction = std::max(fit.fit_fraction, f);
  }
  fit.dense = true;
  fit.note = "no spacing above the noise floor fits 99% of the samples";
  return fit;
}

RatioLattice empirical_ratio_lattice(const MarginalProfile& p, const SamplingOptions& o, bool allow_truncated) {
  RatioLattice out;
  out.samples = sample_rn(p, o);
  out.fit = fit_lattice(out.samples, allow_truncated);
  return out;
}

bool lattice_agrees(const LatticeFit& fit, const LatticeOrDense& lattice, double tol) {
  if (fit.inconclusive) return false;
  if (lattice.dense) return fit.dense;
  return fit.spacing && std::fabs(*fit.spacing - lattice.a) <= tol;
}

}  // namespace btl
