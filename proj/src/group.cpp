#include "btl/group.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <cstdlib>
#include <deque>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "btl/error.hpp"

namespace btl {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

std::uint64_t sat_pow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r = sat_mul(r, base);
  return r;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t binom(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = sat_mul(r, static_cast<std::uint64_t>(n - k + i)) / static_cast<std::uint64_t>(i);
  return r;
}

int parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw StructuralError("cannot parse integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split_tokens(std::string_view text, std::string_view seps) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && seps.find(text[i]) != std::string_view::npos) ++i;
    std::size_t j = i;
    while (j < text.size() && seps.find(text[j]) == std::string_view::npos) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  std::uint64_t h = e.model ^ 0x9e3779b97f4a7c15ull;
  for (std::int32_t v : e.code) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::size_t default_budget() {
  double multiplier = 1.0;
  if (const char* env = std::getenv("BTL_BUDGET_MULTIPLIER")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) multiplier = v;
  }
  return static_cast<std::size_t>(200000.0 * multiplier);
}

GroupModel::GroupModel(Data data, std::size_t budget) : data_(std::move(data)), budget_(budget) {
  if (auto* l = std::get_if<IntegerLattice>(&data_)) {
    if (l->dim < 1) throw StructuralError("lattice dimension must be positive");
    if (l->finite_cofactor < 1) throw StructuralError("finite cofactor order must be positive");
  } else if (auto* c = std::get_if<LocallyFiniteChain>(&data_)) {
    if (c->moduli.empty()) throw StructuralError("chain needs at least one modulus");
    for (int m : c->moduli)
      if (m < 2) throw StructuralError("chain moduli must be at least 2");
    std::int64_t prev = 0;
    for (std::int64_t k : c->levels) {
      if (k <= prev) throw StructuralError("chain levels must be strictly increasing and positive");
      prev = k;
    }
  } else if (auto* p = std::get_if<AmalgamatedProduct>(&data_)) {
    validate_embedding(p->c, p->a, p->c_to_a, "C -> A");
    validate_embedding(p->c, p->b, p->c_to_b, "C -> B");
    cosets_.a = CosetTable(p->a, p->c_to_a);
    cosets_.b = CosetTable(p->b, p->c_to_b);
    if (cosets_.a.index() < 2 || cosets_.b.index() < 2)
      throw StructuralError("amalgamated subgroup must be proper in both factors");
  } else if (auto* h = std::get_if<HnnExtension>(&data_)) {
    validate_embedding(h->c, h->a, h->c_to_a, "C -> A");
    validate_embedding(h->c, h->a, h->alpha, "alpha");
    cosets_.plus = CosetTable(h->a, h->c_to_a);
    cosets_.minus = CosetTable(h->a, h->alpha);
  }
  fingerprint_ = fnv1a(describe());
}

std::string GroupModel::describe() const {
  std::ostringstream os;
  auto vec = [&](const auto& v) {
    os << '[';
    for (auto x : v) os << x << ',';
    os << ']';
  };
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IntegerLattice>) {
          os << "lattice;dim=" << d.dim << ";cofactor=" << d.finite_cofactor;
        } else if constexpr (std::is_same_v<T, LocallyFiniteChain>) {
          os << "chain;moduli=";
          vec(d.moduli);
          os << ";levels=";
          vec(d.levels);
        } else if constexpr (std::is_same_v<T, AmalgamatedProduct>) {
          os << "afp;A=" << d.a.describe() << ";B=" << d.b.describe() << ";C=" << d.c.describe() << ";iA=";
          vec(d.c_to_a);
          os << ";iB=";
          vec(d.c_to_b);
        } else {
          os << "hnn;A=" << d.a.describe() << ";C=" << d.c.describe() << ";i=";
          vec(d.c_to_a);
          os << ";alpha=";
          vec(d.alpha);
        }
      },
      data_);
  return os.str();
}

void GroupModel::same_model(const Element& g) const {
  if (g.model != fingerprint_) throw StructuralError("element belongs to a different group model");
}

void GroupModel::check(const Element& g) const {
  same_model(g);
  if (!is_valid(g)) throw StructuralError("invalid normal form " + to_string(g));
}

Element GroupModel::identity() const {
  switch (family()) {
    case Family::IntegerLattice:
      return make(std::vector<std::int32_t>(std::get<IntegerLattice>(data_).dim, 0));
    case Family::LocallyFiniteChain:
      return make({});
    default:
      return make({0});
  }
}

// ---- chain helpers -------------------------------------------------------

std::int64_t GroupModel::chain_level_coords(int n) const {
  const auto& c = std::get<LocallyFiniteChain>(data_);
  if (n <= 0) return 0;
  const auto size = static_cast<int>(c.levels.size());
  if (size == 0) return n;
  if (n <= size) return c.levels[n - 1];
  return c.levels.back() + (n - size);
}

int GroupModel::chain_modulus(std::int64_t coordinate) const {
  const auto& c = std::get<LocallyFiniteChain>(data_);
  if (coordinate < static_cast<std::int64_t>(c.moduli.size())) return c.moduli[static_cast<std::size_t>(coordinate)];
  return c.moduli.back();
}

double GroupModel::chain_log_level_size(int n) const {
  const std::int64_t k = chain_level_coords(n);
  const auto& c = std::get<LocallyFiniteChain>(data_);
  double s = 0.0;
  const std::int64_t explicit_count = std::min<std::int64_t>(k, static_cast<std::int64_t>(c.moduli.size()));
  for (std::int64_t i = 0; i < explicit_count; ++i) s += std::log(static_cast<double>(c.moduli[static_cast<std::size_t>(i)]));
  if (k > explicit_count) s += static_cast<double>(k - explicit_count) * std::log(static_cast<double>(c.moduli.back()));
  return s;
}

// ---- free product helpers ------------------------------------------------

int GroupModel::afp_index_a() const { return cosets_.a.index(); }
int GroupModel::afp_index_b() const { return cosets_.b.index(); }
int GroupModel::hnn_index() const { return cosets_.plus.index(); }

int GroupModel::factor_order() const {
  if (auto* p = std::get_if<AmalgamatedProduct>(&data_)) return p->a.order();
  if (auto* h = std::get_if<HnnExtension>(&data_)) return h->a.order();
  throw UnsupportedError("factor order is defined for free products only");
}

int GroupModel::amalgam_order() const {
  if (auto* p = std::get_if<AmalgamatedProduct>(&data_)) return p->c.order();
  if (auto* h = std::get_if<HnnExtension>(&data_)) return h->c.order();
  throw UnsupportedError("amalgam order is defined for free products only");
}

int GroupModel::last_entry(const Element& g) const { return g.code.back(); }

int GroupModel::last_sign(const Element& g) const {
  if (g.code.size() < 3) throw StructuralError("element has no stable letter");
  return g.code[g.code.size() - 2];
}

bool GroupModel::in_c(int a) const {
  if (family() == Family::AmalgamatedProduct) return cosets_.a.in_subgroup(a);
  return cosets_.plus.in_subgroup(a);
}

bool GroupModel::in_c_sign(int a, int epsilon) const {
  return epsilon > 0 ? cosets_.plus.in_subgroup(a) : cosets_.minus.in_subgroup(a);
}

int GroupModel::hnn_phi(int a, int epsilon) const {
  const auto& h = std::get<HnnExtension>(data_);
  if (epsilon > 0) return h.alpha[cosets_.plus.preimage(a)];
  return h.c_to_a[cosets_.minus.preimage(a)];
}

void GroupModel::afp_mul_a(std::vector<std::int32_t>& code, int x) const {
  const auto& p = std::get<AmalgamatedProduct>(data_);
  code.back() = p.a.mul(code.back(), x);
}

void GroupModel::afp_mul_b(std::vector<std::int32_t>& code, int y) const {
  const auto& p = std::get<AmalgamatedProduct>(data_);
  const int tail = code.back();
  int z;
  if (cosets_.a.in_subgroup(tail)) {
    const int c = cosets_.a.preimage(tail);
    if (code.size() >= 3) {
      code.pop_back();
      const int bn = code.back();
      code.pop_back();
      z = p.b.mul(p.b.mul(bn, p.c_to_b[c]), y);
    } else {
      code.back() = 0;
      z = p.b.mul(p.c_to_b[c], y);
    }
  } else {
    code.back() = cosets_.a.rep(tail);
    z = p.b.mul(p.c_to_b[cosets_.a.sub_part(tail)], y);
  }
  const int rz = cosets_.b.rep(z);
  if (rz != 0) {
    code.push_back(rz);
    code.push_back(p.c_to_a[cosets_.b.sub_part(z)]);
  } else {
    code.back() = p.a.mul(code.back(), p.c_to_a[cosets_.b.preimage(z)]);
  }
}

void GroupModel::hnn_mul_t(std::vector<std::int32_t>& code, int epsilon) const {
  const auto& h = std::get<HnnExtension>(data_);
  const int tail = code.back();
  if (code.size() >= 3 && code[code.size() - 2] == -epsilon && in_c_sign(tail, epsilon)) {
    code.pop_back();
    code.pop_back();
    code.back() = h.a.mul(code.back(), hnn_phi(tail, epsilon));
    return;
  }
  const CosetTable& t = epsilon > 0 ? cosets_.plus : cosets_.minus;
  const int c = t.image(t.sub_part(tail));
  code.back() = t.rep(tail);
  code.push_back(epsilon);
  code.push_back(hnn_phi(c, epsilon));
}

// ---- group operations ----------------------------------------------------

Element GroupModel::multiply(const Element& g, const Element& h) const {
  same_model(g);
  same_model(h);
  switch (family()) {
    case Family::IntegerLattice: {
      std::vector<std::int32_t> out(g.code);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += h.code[i];
      return make(std::move(out));
    }
    case Family::LocallyFiniteChain: {
      std::vector<std::int32_t> out(std::max(g.code.size(), h.code.size()), 0);
      for (std::size_t i = 0; i < out.size(); ++i) {
        const int a = i < g.code.size() ? g.code[i] : 0;
        const int b = i < h.code.size() ? h.code[i] : 0;
        out[i] = (a + b) % chain_modulus(static_cast<std::int64_t>(i));
      }
      while (!out.empty() && out.back() == 0) out.pop_back();
      return make(std::move(out));
    }
    case Family::AmalgamatedProduct: {
      std::vector<std::int32_t> out(g.code);
      for (std::size_t i = 0; i < h.code.size(); ++i) {
        if (i % 2 == 0)
          afp_mul_a(out, h.code[i]);
        else
          afp_mul_b(out, h.code[i]);
      }
      return make(std::move(out));
    }
    case Family::HnnExtension: {
      const auto& d = std::get<HnnExtension>(data_);
      std::vector<std::int32_t> out(g.code);
      for (std::size_t i = 0; i < h.code.size(); ++i) {
        if (i % 2 == 0)
          out.back() = d.a.mul(out.back(), h.code[i]);
        else
          hnn_mul_t(out, h.code[i]);
      }
      return make(std::move(out));
    }
  }
  throw StructuralError("unknown family");
}

Element GroupModel::inverse(const Element& g) const {
  same_model(g);
  switch (family()) {
    case Family::IntegerLattice: {
      std::vector<std::int32_t> out(g.code);
      for (auto& v : out) v = -v;
      return make(std::move(out));
    }
    case Family::LocallyFiniteChain: {
      std::vector<std::int32_t> out(g.code);
      for (std::size_t i = 0; i < out.size(); ++i) {
        const int m = chain_modulus(static_cast<std::int64_t>(i));
        out[i] = (m - out[i]) % m;
      }
      return make(std::move(out));
    }
    case Family::AmalgamatedProduct: {
      const auto& p = std::get<AmalgamatedProduct>(data_);
      std::vector<std::int32_t> out{0};
      for (std::size_t j = g.code.size(); j-- > 0;) {
        if (j % 2 == 0)
          afp_mul_a(out, p.a.inv(g.code[j]));
        else
          afp_mul_b(out, p.b.inv(g.code[j]));
      }
      return make(std::move(out));
    }
    case Family::HnnExtension: {
      const auto& d = std::get<HnnExtension>(data_);
      std::vector<std::int32_t> out{0};
      for (std::size_t j = g.code.size(); j-- > 0;) {
        if (j % 2 == 0)
          out.back() = d.a.mul(out.back(), d.a.inv(g.code[j]));
        else
          hnn_mul_t(out, -g.code[j]);
      }
      return make(std::move(out));
    }
  }
  throw StructuralError("unknown family");
}

int GroupModel::word_length(const Element& g) const {
  same_model(g);
  switch (family()) {
    case Family::IntegerLattice: {
      long s = 0;
      for (auto v : g.code) s += std::labs(v);
      return static_cast<int>(s);
    }
    case Family::LocallyFiniteChain: {
      const auto len = static_cast<std::int64_t>(g.code.size());
      int n = 0;
      while (chain_level_coords(n) < len) ++n;
      return n;
    }
    default:
      return static_cast<int>((g.code.size() - 1) / 2);
  }
}

bool GroupModel::is_valid(const Element& g) const {
  if (g.model != fingerprint_) return false;
  const auto& c = g.code;
  switch (family()) {
    case Family::IntegerLattice:
      return static_cast<int>(c.size()) == std::get<IntegerLattice>(data_).dim;
    case Family::LocallyFiniteChain: {
      if (!c.empty() && c.back() == 0) return false;
      for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] < 0 || c[i] >= chain_modulus(static_cast<std::int64_t>(i))) return false;
      return true;
    }
    case Family::AmalgamatedProduct: {
      const auto& p = std::get<AmalgamatedProduct>(data_);
      if (c.size() % 2 == 0) return false;
      const std::size_t last = c.size() - 1;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i % 2 == 0) {
          if (!p.a.contains(c[i])) return false;
          if (i < last && (cosets_.a.rep(c[i]) != c[i] || (i > 0 && c[i] == 0))) return false;
        } else {
          if (!p.b.contains(c[i]) || cosets_.b.rep(c[i]) != c[i] || c[i] == 0) return false;
        }
      }
      return true;
    }
    case Family::HnnExtension: {
      const auto& h = std::get<HnnExtension>(data_);
      if (c.size() % 2 == 0) return false;
      const std::size_t last = c.size() - 1;
      for (std::size_t i = 1; i < c.size(); i += 2)
        if (c[i] != 1 && c[i] != -1) return false;
      for (std::size_t i = 0; i < c.size(); i += 2) {
        if (!h.a.contains(c[i])) return false;
        if (i < last) {
          const int next = c[i + 1];
          const CosetTable& t = next > 0 ? cosets_.plus : cosets_.minus;
          if (t.rep(c[i]) != c[i]) return false;
        }
      }
      return is_britton_reduced(g);
    }
  }
  return false;
}

bool GroupModel::is_britton_reduced(const Element& g) const {
  if (family() != Family::HnnExtension) throw UnsupportedError("Britton reduction applies to HNN extensions");
  const auto& c = g.code;
  // No subword t^{-e} a t^{e} with a in C_e.
  for (std::size_t i = 1; i + 2 < c.size(); i += 2) {
    const int e = c[i + 2];
    if (c[i] == -e && in_c_sign(c[i + 1], e)) return false;
  }
  return true;
}

bool GroupModel::less(const Element& g, const Element& h) const {
  const int lg = word_length(g), lh = word_length(h);
  if (lg != lh) return lg < lh;
  return g.code < h.code;
}

// ---- enumeration ---------------------------------------------------------

std::uint64_t GroupModel::ball_size(int r) const {
  if (r < 0) return 0;
  switch (family()) {
    case Family::IntegerLattice: {
      const int d = std::get<IntegerLattice>(data_).dim;
      std::uint64_t s = 0;
      for (int k = 0; k <= std::min(d, r); ++k)
        s = sat_add(s, sat_mul(sat_mul(sat_pow(2, k), binom(d, k)), binom(r, k)));
      return s;
    }
    case Family::LocallyFiniteChain: {
      const std::int64_t k = chain_level_coords(r);
      std::uint64_t s = 1;
      for (std::int64_t i = 0; i < k && s != kSaturated; ++i) s = sat_mul(s, static_cast<std::uint64_t>(chain_modulus(i)));
      return s;
    }
    case Family::AmalgamatedProduct: {
      std::uint64_t s = static_cast<std::uint64_t>(factor_order());
      for (int n = 1; n <= r; ++n) s = sat_add(s, sphere_count(n, SphereConvention::AfpEndsAnywhere));
      return s;
    }
    case Family::HnnExtension: {
      std::uint64_t s = static_cast<std::uint64_t>(factor_order());
      for (int n = 1; n <= r; ++n) s = sat_add(s, sphere_count(n, SphereConvention::HnnEndsAnywhere));
      return s;
    }
  }
  return 0;
}

int GroupModel::attainable_radius() const {
  int r = -1;
  while (r < 100000 && ball_size(r + 1) <= budget_) ++r;
  return r;
}

std::uint64_t GroupModel::sphere_count(int n, SphereConvention convention) const {
  if (n < 1) throw ValidationError("sphere_count requires n >= 1");
  if (family() == Family::AmalgamatedProduct) {
    if (convention != SphereConvention::AfpEndsAnywhere) throw StructuralError("sphere convention does not match family");
    const auto ia = static_cast<std::uint64_t>(afp_index_a());
    const auto ib = static_cast<std::uint64_t>(afp_index_b());
    return sat_mul(sat_mul(sat_mul(ia, sat_pow(ia - 1, n - 1)), sat_pow(ib - 1, n)),
                   static_cast<std::uint64_t>(factor_order()));
  }
  if (family() == Family::HnnExtension) {
    if (convention != SphereConvention::HnnEndsAnywhere) throw StructuralError("sphere convention does not match family");
    const auto r1 = static_cast<std::uint64_t>(hnn_index());
    const std::uint64_t r2 = r1 - 1;
    return sat_mul(sat_mul(2 * static_cast<std::uint64_t>(factor_order()), r1), sat_pow(r1 + r2, n - 1));
  }
  throw UnsupportedError("sphere_count is defined for amalgamated products and HNN extensions");
}

std::vector<Element> GroupModel::enumerate_sphere(int n) const {
  if (n < 0) return {};
  const std::uint64_t size = ball_size(n);
  if (size > budget_)
    throw BudgetError("sphere of radius " + std::to_string(n) + " exceeds enumeration budget", attainable_radius());
  std::vector<Element> out;
  switch (family()) {
    case Family::IntegerLattice: {
      const int d = std::get<IntegerLattice>(data_).dim;
      std::vector<std::int32_t> cur(d, 0);
      std::function<void(int, int)> rec = [&](int i, int left) {
        if (i == d - 1) {
          if (left == 0) {
            cur[i] = 0;
            out.push_back(make(cur));
          } else {
            cur[i] = -left;
            out.push_back(make(cur));
            cur[i] = left;
            out.push_back(make(cur));
          }
          return;
        }
        for (int v = -left; v <= left; ++v) {
          cur[i] = v;
          rec(i + 1, left - std::abs(v));
        }
      };
      rec(0, n);
      break;
    }
    case Family::LocallyFiniteChain: {
      const std::int64_t lo = chain_level_coords(n - 1), hi = chain_level_coords(n);
      if (n == 0) {
        out.push_back(identity());
        break;
      }
      // Codes of length in (lo, hi] with nonzero last coordinate.
      std::vector<std::int32_t> cur;
      std::function<void(std::int64_t)> rec = [&](std::int64_t i) {
        if (i > lo && !cur.empty() && cur.back() != 0) out.push_back(make(cur));
        if (i == hi) return;
        for (int v = 0; v < chain_modulus(i); ++v) {
          cur.push_back(v);
          rec(i + 1);
          cur.pop_back();
        }
      };
      rec(0);
      break;
    }
    case Family::AmalgamatedProduct: {
      const auto& p = std::get<AmalgamatedProduct>(data_);
      if (n == 0) {
        for (int a = 0; a < p.a.order(); ++a) out.push_back(make({a}));
        break;
      }
      std::vector<std::int32_t> cur;
      std::function<void(int)> rec = [&](int i) {
        // i = number of B entries placed
        if (i == n) {
          for (int a = 0; a < p.a.order(); ++a) {
            cur.push_back(a);
            out.push_back(make(cur));
            cur.pop_back();
          }
          return;
        }
        for (int b : cosets_.b.reps()) {
          if (b == 0) continue;
          cur.push_back(b);
          if (i + 1 == n) {
            rec(i + 1);
          } else {
            for (int a : cosets_.a.reps()) {
              if (a == 0) continue;
              cur.push_back(a);
              rec(i + 1);
              cur.pop_back();
            }
          }
          cur.pop_back();
        }
      };
      for (int a0 : cosets_.a.reps()) {
        cur = {a0};
        rec(0);
      }
      break;
    }
    case Family::HnnExtension: {
      const auto& h = std::get<HnnExtension>(data_);
      if (n == 0) {
        for (int a = 0; a < h.a.order(); ++a) out.push_back(make({a}));
        break;
      }
      // Choose signs first, then the coset representatives they force.
      std::vector<int> signs(n);
      std::vector<std::int32_t> cur;
      std::function<void(int)> fill = [&](int i) {
        // cur holds a0 e1 a1 ... e_i; choose a_i.
        if (i == n) {
          for (int a = 0; a < h.a.order(); ++a) {
            cur.push_back(a);
            out.push_back(make(cur));
            cur.pop_back();
          }
          return;
        }
        const int next = signs[i];
        const CosetTable& t = next > 0 ? cosets_.plus : cosets_.minus;
        for (int a : t.reps()) {
          if (i > 0 && a == 0 && signs[i - 1] != next) continue;
          cur.push_back(a);
          cur.push_back(next);
          fill(i + 1);
          cur.pop_back();
          cur.pop_back();
        }
      };
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        for (int i = 0; i < n; ++i) signs[i] = (mask >> i) & 1u ? -1 : 1;
        cur.clear();
        fill(0);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end(), [this](const Element& a, const Element& b) { return less(a, b); });
  return out;
}

std::vector<Element> GroupModel::enumerate_ball(int r) const {
  if (r < 0) return {};
  if (ball_size(r) > budget_)
    throw BudgetError("ball of radius " + std::to_string(r) + " exceeds enumeration budget", attainable_radius());
  std::vector<Element> out;
  for (int n = 0; n <= r; ++n) {
    auto s = enumerate_sphere(n);
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return out;
}

std::vector<Element> GroupModel::bfs_ball(int r) const {
  if (ball_size(r) > budget_)
    throw BudgetError("ball of radius " + std::to_string(r) + " exceeds enumeration budget", attainable_radius());
  const auto gens = generators(std::max(r, 1));
  std::unordered_set<Element, ElementHash> seen;
  std::deque<Element> queue;
  seen.insert(identity());
  queue.push_back(identity());
  while (!queue.empty()) {
    Element g = std::move(queue.front());
    queue.pop_front();
    for (const auto& s : gens) {
      Element h = multiply(g, s);
      if (word_length(h) > r || seen.count(h)) continue;
      seen.insert(h);
      queue.push_back(std::move(h));
    }
  }
  std::vector<Element> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end(), [this](const Element& a, const Element& b) { return less(a, b); });
  return out;
}

std::vector<Element> GroupModel::generators(int radius) const {
  std::vector<Element> out;
  switch (family()) {
    case Family::IntegerLattice: {
      const int d = std::get<IntegerLattice>(data_).dim;
      for (int i = 0; i < d; ++i)
        for (int s : {-1, 1}) {
          std::vector<std::int32_t> v(d, 0);
          v[i] = s;
          out.push_back(make(std::move(v)));
        }
      break;
    }
    case Family::LocallyFiniteChain: {
      const std::int64_t k = chain_level_coords(std::max(radius, 1));
      for (std::int64_t i = 0; i < k; ++i) {
        const int m = chain_modulus(i);
        for (int v : {1, m - 1}) {
          std::vector<std::int32_t> code(static_cast<std::size_t>(i) + 1, 0);
          code.back() = v;
          Element e = make(std::move(code));
          if (out.empty() || out.back() != e) out.push_back(std::move(e));
        }
      }
      break;
    }
    case Family::AmalgamatedProduct: {
      const auto& p = std::get<AmalgamatedProduct>(data_);
      for (int a = 1; a < p.a.order(); ++a) out.push_back(afp_a(a));
      for (int b = 1; b < p.b.order(); ++b) out.push_back(afp_b(b));
      break;
    }
    case Family::HnnExtension: {
      const auto& h = std::get<HnnExtension>(data_);
      for (int a = 1; a < h.a.order(); ++a) out.push_back(hnn_a(a));
      out.push_back(hnn_t(1));
      out.push_back(hnn_t(-1));
      break;
    }
  }
  return out;
}

// ---- structural properties -----------------------------------------------

bool GroupModel::is_abelian() const {
  switch (family()) {
    case Family::IntegerLattice:
      return std::get<IntegerLattice>(data_).finite_cofactor == 1;
    case Family::LocallyFiniteChain:
      return true;
    default:
      return false;
  }
}

bool GroupModel::is_locally_finite() const { return family() == Family::LocallyFiniteChain; }

bool GroupModel::is_amenable() const { return ends() != Ends::Infinite || family() == Family::LocallyFiniteChain; }

Ends GroupModel::ends() const {
  switch (family()) {
    case Family::IntegerLattice:
      return std::get<IntegerLattice>(data_).dim == 1 ? Ends::Two : Ends::One;
    case Family::LocallyFiniteChain:
      return Ends::Infinite;
    case Family::AmalgamatedProduct:
      return (afp_index_a() == 2 && afp_index_b() == 2) ? Ends::Two : Ends::Infinite;
    case Family::HnnExtension:
      return hnn_index() == 1 ? Ends::Two : Ends::Infinite;
  }
  return Ends::One;
}

std::string GroupModel::stallings_class() const {
  switch (family()) {
    case Family::IntegerLattice:
      return ends() == Ends::Two ? "two ends: virtually cyclic" : "one end";
    case Family::LocallyFiniteChain:
      return "infinitely many ends: countable locally finite, not finitely generated";
    case Family::AmalgamatedProduct:
      return ends() == Ends::Two ? "two ends: virtually cyclic amalgam"
                                 : "infinitely many ends: amalgam over a finite subgroup";
    case Family::HnnExtension:
      return ends() == Ends::Two ? "two ends: finite-by-cyclic" : "infinitely many ends: HNN extension over a finite subgroup";
  }
  return "";
}

// ---- element constructors and text ---------------------------------------

Element GroupModel::lattice(std::vector<std::int32_t> coords) const {
  if (family() != Family::IntegerLattice) throw StructuralError("not a lattice model");
  if (static_cast<int>(coords.size()) != std::get<IntegerLattice>(data_).dim) throw StructuralError("wrong lattice dimension");
  return make(std::move(coords));
}

Element GroupModel::chain(std::vector<std::int32_t> coords) const {
  if (family() != Family::LocallyFiniteChain) throw StructuralError("not a chain model");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const int m = chain_modulus(static_cast<std::int64_t>(i));
    coords[i] = ((coords[i] % m) + m) % m;
  }
  while (!coords.empty() && coords.back() == 0) coords.pop_back();
  return make(std::move(coords));
}

Element GroupModel::afp_a(int a) const {
  const auto& p = std::get<AmalgamatedProduct>(data_);
  if (!p.a.contains(a)) throw StructuralError("A index out of range");
  return make({a});
}

Element GroupModel::afp_b(int b) const {
  const auto& p = std::get<AmalgamatedProduct>(data_);
  if (!p.b.contains(b)) throw StructuralError("B index out of range");
  std::vector<std::int32_t> code{0};
  afp_mul_b(code, b);
  return make(std::move(code));
}

Element GroupModel::hnn_a(int a) const {
  const auto& h = std::get<HnnExtension>(data_);
  if (!h.a.contains(a)) throw StructuralError("A index out of range");
  return make({a});
}

Element GroupModel::hnn_t(int epsilon) const {
  if (family() != Family::HnnExtension) throw StructuralError("not an HNN model");
  if (epsilon != 1 && epsilon != -1) throw StructuralError("stable letter exponent must be +1 or -1");
  std::vector<std::int32_t> code{0};
  hnn_mul_t(code, epsilon);
  return make(std::move(code));
}

std::string GroupModel::to_string(const Element& g) const {
  std::ostringstream os;
  switch (family()) {
    case Family::IntegerLattice:
      if (g.code.size() == 1) {
        os << g.code[0];
      } else {
        os << '(';
        for (std::size_t i = 0; i < g.code.size(); ++i) os << (i ? "," : "") << g.code[i];
        os << ')';
      }
      break;
    case Family::LocallyFiniteChain:
      os << '[';
      for (std::size_t i = 0; i < g.code.size(); ++i) os << (i ? "," : "") << g.code[i];
      os << ']';
      break;
    case Family::AmalgamatedProduct:
      for (std::size_t i = 0; i < g.code.size(); ++i) os << (i ? " " : "") << (i % 2 == 0 ? 'a' : 'b') << g.code[i];
      break;
    case Family::HnnExtension:
      for (std::size_t i = 0; i < g.code.size(); ++i) {
        if (i) os << ' ';
        if (i % 2 == 0)
          os << 'a' << g.code[i];
        else
          os << (g.code[i] > 0 ? "t" : "T");
      }
      break;
  }
  return os.str();
}

Element GroupModel::parse(std::string_view text) const {
  switch (family()) {
    case Family::IntegerLattice: {
      std::vector<std::int32_t> v;
      for (auto tok : split_tokens(text, "(), ")) v.push_back(parse_int(tok));
      return lattice(std::move(v));
    }
    case Family::LocallyFiniteChain: {
      std::vector<std::int32_t> v;
      for (auto tok : split_tokens(text, "[], ")) v.push_back(parse_int(tok));
      return chain(std::move(v));
    }
    case Family::AmalgamatedProduct: {
      Element g = identity();
      for (auto tok : split_tokens(text, " *.")) {
        if (tok == "e") continue;
        if (tok.size() < 2 || (tok[0] != 'a' && tok[0] != 'b')) throw StructuralError("bad letter '" + std::string(tok) + "'");
        const int idx = parse_int(tok.substr(1));
        g = multiply(g, tok[0] == 'a' ? afp_a(idx) : afp_b(idx));
      }
      return g;
    }
    case Family::HnnExtension: {
      Element g = identity();
      for (auto tok : split_tokens(text, " *.")) {
        if (tok == "e") continue;
        if (tok == "t" || tok == "T") {
          g = multiply(g, hnn_t(tok == "t" ? 1 : -1));
          continue;
        }
        if (tok.size() < 2 || tok[0] != 'a') throw StructuralError("bad letter '" + std::string(tok) + "'");
        g = multiply(g, hnn_a(parse_int(tok.substr(1))));
      }
      return g;
    }
  }
  throw StructuralError("unknown family");
}

// ---- factories -----------------------------------------------------------

GroupPtr make_group(GroupModel::Data data, std::size_t budget) {
  return std::make_shared<const GroupModel>(std::move(data), budget);
}

GroupPtr make_free_product(int a_order, int b_order) {
  return make_group(AmalgamatedProduct{FiniteGroup::cyclic(a_order), FiniteGroup::cyclic(b_order), FiniteGroup::cyclic(1),
                                       {0}, {0}});
}

GroupPtr make_lattice(int dim) { return make_group(IntegerLattice{dim, 1}); }

GroupPtr make_dyadic_chain(std::vector<std::int64_t> levels) {
  return make_group(LocallyFiniteChain{{2}, std::move(levels)});
}

}  // namespace btl
