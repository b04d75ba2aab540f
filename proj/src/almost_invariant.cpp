#include "btl/almost_invariant.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "btl/error.hpp"

namespace btl {

std::string to_string(AiTag tag) {
  switch (tag) {
    case AiTag::HalfLine:
      return "HalfLine";
    case AiTag::LocallyFiniteUnion:
      return "LocallyFiniteUnion";
    case AiTag::AfpEndsAtIdentity:
      return "AfpEndsAtIdentity";
    case AiTag::HnnEndsAtIdentity:
      return "HnnEndsAtIdentity";
    case AiTag::Explicit:
      return "Explicit";
  }
  return "";
}

int chain_level(const GroupModel& group, const Element& g) { return std::max(1, group.word_length(g)); }

AlmostInvariantSet::AlmostInvariantSet(GroupPtr group, AiTag tag, std::function<bool(const Element&)> rule,
                                       std::string label, int margin)
    : group_(std::move(group)), tag_(tag), rule_(std::move(rule)), label_(std::move(label)), margin_(margin) {}

AlmostInvariantSet AlmostInvariantSet::half_line(GroupPtr group) {
  const auto& d = group->data();
  if (group->family() != Family::IntegerLattice || std::get<IntegerLattice>(d).dim != 1)
    throw UnsupportedError("half-line set requires Z");
  return AlmostInvariantSet(std::move(group), AiTag::HalfLine, [](const Element& g) { return g.code[0] >= 0; },
                            "n >= 0", 0);
}

AlmostInvariantSet AlmostInvariantSet::afp_ends_at_identity(GroupPtr group) {
  if (group->family() != Family::AmalgamatedProduct) throw UnsupportedError("construction requires an amalgamated product");
  const GroupModel* g = group.get();
  return AlmostInvariantSet(
      std::move(group), AiTag::AfpEndsAtIdentity,
      [g](const Element& x) { return x.code.size() >= 3 && g->in_c(x.code.back()); }, "n >= 1 and a_n in C", 1);
}

AlmostInvariantSet AlmostInvariantSet::hnn_ends_at_identity(GroupPtr group) {
  if (group->family() != Family::HnnExtension) throw UnsupportedError("construction requires an HNN extension");
  const GroupModel* g = group.get();
  return AlmostInvariantSet(
      std::move(group), AiTag::HnnEndsAtIdentity,
      [g](const Element& x) {
        if (x.code.size() < 3) return false;
        return g->in_c_sign(x.code.back(), -x.code[x.code.size() - 2]);
      },
      "n >= 1 and a_n in C_{-e_n}", 1);
}

AlmostInvariantSet AlmostInvariantSet::lf_union(GroupPtr group, std::function<bool(int)> levels, std::string levels_label) {
  if (group->family() != Family::LocallyFiniteChain) throw UnsupportedError("level union requires a locally finite chain");
  const GroupModel* g = group.get();
  return AlmostInvariantSet(
      std::move(group), AiTag::LocallyFiniteUnion,
      [g, levels = std::move(levels)](const Element& x) { return levels(chain_level(*g, x)); },
      "levels " + levels_label, 0);
}

AlmostInvariantSet AlmostInvariantSet::explicit_set(GroupPtr group, const std::vector<Element>& members) {
  auto set = std::make_shared<std::unordered_set<Element, ElementHash>>();
  int radius = 0;
  for (const auto& m : members) {
    group->check(m);
    set->insert(m);
    radius = std::max(radius, group->word_length(m));
  }
  return AlmostInvariantSet(
      std::move(group), AiTag::Explicit, [set](const Element& x) { return set->count(x) > 0; },
      std::to_string(members.size()) + " listed elements", radius);
}

AlmostInvariantSet AlmostInvariantSet::complement() const {
  AlmostInvariantSet out = *this;
  out.complement_ = !complement_;
  return out;
}

bool AlmostInvariantSet::contains(const Element& g) const { return rule_(g) != complement_; }

int AlmostInvariantSet::boundary_radius(const Element& g) const {
  const int n = group_->word_length(g);
  switch (tag_) {
    case AiTag::HalfLine:
      return n;
    case AiTag::LocallyFiniteUnion:
      return std::max(1, n);
    case AiTag::Explicit:
      return n + margin_;
    default:
      return n + margin_;
  }
}

std::string AlmostInvariantSet::describe() const {
  return (complement_ ? "complement of " : "") + to_string(tag_) + " (" + label_ + ")";
}

AlmostInvariantSet construct_ai_set(GroupPtr group) {
  switch (group->family()) {
    case Family::AmalgamatedProduct:
      return AlmostInvariantSet::afp_ends_at_identity(std::move(group));
    case Family::HnnExtension:
      return AlmostInvariantSet::hnn_ends_at_identity(std::move(group));
    case Family::IntegerLattice:
      return AlmostInvariantSet::half_line(std::move(group));
    case Family::LocallyFiniteChain:
      throw UnsupportedError("chain sets need a kappa; use construct_lf_ai_set");
  }
  throw UnsupportedError("unknown family");
}

AlmostInvariantSet construct_lf_ai_set(GroupPtr chain, double kappa, std::function<bool(int)> levels,
                                       std::string levels_label) {
  if (chain->family() != Family::LocallyFiniteChain) throw UnsupportedError("construct_lf_ai_set requires a chain");
  if (!(kappa > 0.0)) throw ValidationError("kappa must be positive");
  const int top = std::max(2, chain->attainable_radius());
  for (int n = 2; n <= top; ++n) {
    const double log_prev = chain->chain_log_level_size(n - 1);
    const double log_cur = chain->chain_log_level_size(n);
    // log |G_n \ G_{n-1}| = log|G_n| + log(1 - |G_{n-1}|/|G_n|)
    const double log_shell = log_cur + std::log1p(-std::exp(log_prev - log_cur));
    if (log_shell - 2.0 * kappa * std::exp(log_prev) < 0.0)
      throw ValidationError("chain growth inequality fails at level " + std::to_string(n) +
                            "; pass to a subsequence (see chain_levels_for_kappa)");
  }
  return AlmostInvariantSet::lf_union(std::move(chain), std::move(levels), std::move(levels_label));
}

std::vector<std::int64_t> chain_levels_for_kappa(double kappa, int count, int modulus) {
  if (!(kappa > 0.0) || count < 1 || modulus < 2) throw ValidationError("bad subsequence request");
  const double lm = std::log(static_cast<double>(modulus));
  std::vector<std::int64_t> out{1};
  while (static_cast<int>(out.size()) < count) {
    const std::int64_t prev = out.back();
    const double prev_size = std::exp(static_cast<double>(prev) * lm);
    if (!std::isfinite(prev_size)) throw BudgetError("chain level sizes overflow", static_cast<int>(out.size()));
    const double need = 2.0 * kappa * prev_size;
    if (need / lm > 1e15) throw BudgetError("chain level index overflows", static_cast<int>(out.size()));
    std::int64_t k = prev + 1;
    // log(m^k - m^prev) = k log m + log(1 - m^(prev-k))
    while (static_cast<double>(k) * lm + std::log1p(-std::exp(static_cast<double>(prev - k) * lm)) < need) {
      const auto jump = static_cast<std::int64_t>(std::ceil(need / lm));
      k = std::max(k + 1, jump);
    }
    out.push_back(k);
  }
  return out;
}

BoundaryParts boundary_parts(const AlmostInvariantSet& w, const Element& g) {
  const GroupModel& G = w.group();
  const Element gi = G.inverse(g);
  BoundaryParts parts;
  for (const auto& h : G.enumerate_ball(w.boundary_radius(g))) {
    const bool in_w = w.contains(h);
    const bool in_gw = w.contains(G.multiply(gi, h));
    if (in_w && !in_gw) ++parts.w_minus_gw;
    if (!in_w && in_gw) ++parts.gw_minus_w;
  }
  return parts;
}

std::vector<Element> symmetric_difference(const AlmostInvariantSet& w, const Element& g) {
  const GroupModel& G = w.group();
  const Element gi = G.inverse(g);
  std::vector<Element> out;
  for (const auto& h : G.enumerate_ball(w.boundary_radius(g)))
    if (w.contains(h) != w.contains(G.multiply(gi, h))) out.push_back(h);
  return out;
}

namespace {

void add_coset(std::map<Element, int>& acc, const GroupModel& G, const Element& prefix, const std::vector<Element>& c,
               const Element& suffix, int sign) {
  for (const auto& x : c) {
    const Element e = G.multiply(G.multiply(prefix, x), suffix);
    if ((acc[e] += sign) == 0) acc.erase(e);
  }
}

}  // namespace

std::map<Element, int> ai_cocycle_decomposition(const AlmostInvariantSet& w, const Element& g) {
  const GroupModel& G = w.group();
  std::map<Element, int> acc;
  std::vector<Element> c;
  if (w.tag() == AiTag::AfpEndsAtIdentity) {
    const auto& p = std::get<AmalgamatedProduct>(G.data());
    for (int x : p.c_to_a) c.push_back(G.afp_a(x));
    // c(g) = sum over B letters of prefix * (1_{bC} - 1_C)
    Element prefix = G.identity();
    for (std::size_t i = 0; i < g.code.size(); ++i) {
      if (i % 2 == 0) {
        prefix = G.multiply(prefix, G.afp_a(g.code[i]));
      } else {
        const Element b = G.afp_b(g.code[i]);
        add_coset(acc, G, G.multiply(prefix, b), c, G.identity(), +1);
        add_coset(acc, G, prefix, c, G.identity(), -1);
        prefix = G.multiply(prefix, b);
      }
    }
  } else if (w.tag() == AiTag::HnnEndsAtIdentity) {
    const auto& h = std::get<HnnExtension>(G.data());
    for (int x : h.c_to_a) c.push_back(G.hnn_a(x));
    const Element t = G.hnn_t(1), ti = G.hnn_t(-1);
    // c(t) = 1_{Ct} - 1_C and c(t^{-1}) = -t^{-1} c(t)
    Element prefix = G.identity();
    for (std::size_t i = 0; i < g.code.size(); ++i) {
      if (i % 2 == 0) {
        prefix = G.multiply(prefix, G.hnn_a(g.code[i]));
      } else if (g.code[i] > 0) {
        add_coset(acc, G, prefix, c, t, +1);
        add_coset(acc, G, prefix, c, G.identity(), -1);
        prefix = G.multiply(prefix, t);
      } else {
        const Element p = G.multiply(prefix, ti);
        add_coset(acc, G, p, c, t, -1);
        add_coset(acc, G, p, c, G.identity(), +1);
        prefix = p;
      }
    }
  } else {
    throw UnsupportedError("cocycle decomposition is defined for the free product and HNN constructions");
  }
  if (w.complemented())
    for (auto& [k, v] : acc) v = -v;
  return acc;
}

double kappa_bound(const GroupModel& group) {
  if (group.family() == Family::AmalgamatedProduct) {
    return (std::log(group.afp_index_a() - 1.0) + std::log(group.afp_index_b() - 1.0)) / (2.0 * group.amalgam_order());
  }
  if (group.family() == Family::HnnExtension) {
    return std::log(2.0 * group.hnn_index() - 1.0) / (2.0 * group.amalgam_order());
  }
  throw UnsupportedError("kappa bound is defined for amalgamated products and HNN extensions");
}

bool lambda_feasible(double lambda, double kappa) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda must lie in (0, 1)");
  return 4.0 * (1.0 - lambda) * (1.0 - lambda) / lambda < kappa;
}

SeriesEstimate ai_divergence(const AlmostInvariantSet& w, double kappa, int radius) {
  const GroupModel& G = w.group();
  SeriesEstimate est;
  est.radius = radius;
  for (const auto& g : G.enumerate_ball(radius))
    est.partial += std::exp(-kappa * static_cast<double>(boundary_parts(w, g).total()));
  switch (w.tag()) {
    case AiTag::AfpEndsAtIdentity:
      est.verdict = kappa <= kappa_bound(G) ? SeriesVerdict::Diverges : SeriesVerdict::Converges;
      est.reason = "|W xor gW| = 2n|C| against sphere growth ([A:C]-1)([B:C]-1)";
      break;
    case AiTag::HnnEndsAtIdentity:
      est.verdict = kappa <= kappa_bound(G) ? SeriesVerdict::Diverges : SeriesVerdict::Unknown;
      est.reason = "|W xor gW| <= 2n|C| against sphere growth 2[A:C]-1";
      break;
    case AiTag::HalfLine:
      est.verdict = kappa > 0.0 ? SeriesVerdict::Converges : SeriesVerdict::Diverges;
      est.reason = "|W xor gW| = |g| on Z";
      break;
    default:
      est.verdict = SeriesVerdict::Unknown;
      est.reason = "no growth certificate for this set";
  }
  return est;
}

}  // namespace btl
