#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "btl/finite_group.hpp"

namespace btl {

// Canonical normal form of a group element, tagged with the fingerprint of its model.
//   IntegerLattice      code = coordinates
//   LocallyFiniteChain  code = coordinates with trailing zeros trimmed
//   AmalgamatedProduct  code = [a0, b1, a1, ..., bn, an]
//   HnnExtension        code = [a0, e1, a1, ..., en, an] with ei in {-1, +1}
struct Element {
  std::uint64_t model = 0;
  std::vector<std::int32_t> code;

  friend bool operator==(const Element&, const Element&) = default;
  friend auto operator<=>(const Element&, const Element&) = default;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

// Z^d, optionally flagged as having a finite cofactor (virtually cyclic when d = 1).
struct IntegerLattice {
  int dim = 1;
  int finite_cofactor = 1;
};

// Direct sum of cyclic groups Z/m_i with the chain G_n = first k_n coordinates.
// moduli: m_i for i < size, the last modulus repeats. levels: k_1 < k_2 < ..., extended by +1.
struct LocallyFiniteChain {
  std::vector<int> moduli{2};
  std::vector<std::int64_t> levels;
};

// A *_C B with C embedded in both finite factors.
struct AmalgamatedProduct {
  FiniteGroup a, b, c;
  std::vector<int> c_to_a, c_to_b;
};

// HNN(A, C, alpha): t^{-1} c t = alpha(c) for c in C; C embedded in A by c_to_a.
struct HnnExtension {
  FiniteGroup a, c;
  std::vector<int> c_to_a, alpha;
};

enum class Family { IntegerLattice, LocallyFiniteChain, AmalgamatedProduct, HnnExtension };
enum class SphereConvention { AfpEndsAnywhere, HnnEndsAnywhere };
enum class Ends { One, Two, Infinite };

std::size_t default_budget();

class GroupModel {
 public:
  using Data = std::variant<IntegerLattice, LocallyFiniteChain, AmalgamatedProduct, HnnExtension>;

  explicit GroupModel(Data data, std::size_t budget = default_budget());

  Family family() const noexcept { return static_cast<Family>(data_.index()); }
  const Data& data() const noexcept { return data_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  std::size_t budget() const noexcept { return budget_; }
  std::string describe() const;

  Element identity() const;
  Element multiply(const Element& g, const Element& h) const;
  Element inverse(const Element& g) const;
  // Lattice: l1 norm. Chain: smallest n with g in G_n. Free products: number of B letters or t letters.
  int word_length(const Element& g) const;
  bool is_valid(const Element& g) const;
  void check(const Element& g) const;

  // Ball of radius r ordered by (word length, code); throws BudgetError over budget.
  std::vector<Element> enumerate_ball(int r) const;
  std::vector<Element> enumerate_sphere(int n) const;
  // Exact cardinality, saturating at UINT64_MAX.
  std::uint64_t ball_size(int r) const;
  int attainable_radius() const;
  // Closed-form sphere cardinality for n >= 1.
  std::uint64_t sphere_count(int n, SphereConvention convention) const;
  // Oracle: breadth-first closure of the identity under the generators inside ball(r).
  std::vector<Element> bfs_ball(int r) const;

  // Symmetric generating set. For chains, the coordinate generators of G_radius.
  std::vector<Element> generators(int radius = 1) const;
  bool less(const Element& g, const Element& h) const;

  bool is_abelian() const;
  bool is_locally_finite() const;
  bool is_amenable() const;
  Ends ends() const;
  std::string stallings_class() const;

  // Element constructors.
  Element lattice(std::vector<std::int32_t> coords) const;
  Element chain(std::vector<std::int32_t> coords) const;
  Element afp_a(int a) const;
  Element afp_b(int b) const;
  Element hnn_a(int a) const;
  Element hnn_t(int epsilon) const;

  std::string to_string(const Element& g) const;
  // Accepts the to_string format; words are normalized by multiplication.
  Element parse(std::string_view text) const;

  // Chain data.
  std::int64_t chain_level_coords(int n) const;
  // log |G_n| for n >= 0 with |G_0| = 1.
  double chain_log_level_size(int n) const;
  int chain_modulus(std::int64_t coordinate) const;

  // Free product data.
  int afp_index_a() const;
  int afp_index_b() const;
  int hnn_index() const;
  int factor_order() const;
  int amalgam_order() const;
  // For a free-product element with n >= 1, the final A entry a_n.
  int last_entry(const Element& g) const;
  // Sign of the last stable letter (HNN, n >= 1).
  int last_sign(const Element& g) const;
  bool in_c(int a) const;
  bool in_c_sign(int a, int epsilon) const;
  bool is_britton_reduced(const Element& g) const;

 private:
  struct Cosets {
    CosetTable a, b;            // AFP: C in A, C in B
    CosetTable plus, minus;     // HNN: C_{+1} = C, C_{-1} = alpha(C)
  };

  Element make(std::vector<std::int32_t> code) const { return Element{fingerprint_, std::move(code)}; }
  void same_model(const Element& g) const;
  void afp_mul_a(std::vector<std::int32_t>& code, int x) const;
  void afp_mul_b(std::vector<std::int32_t>& code, int y) const;
  void hnn_mul_t(std::vector<std::int32_t>& code, int epsilon) const;
  int hnn_phi(int a, int epsilon) const;

  Data data_;
  std::size_t budget_;
  std::uint64_t fingerprint_ = 0;
  Cosets cosets_;
};

using GroupPtr = std::shared_ptr<const GroupModel>;

GroupPtr make_group(GroupModel::Data data, std::size_t budget = default_budget());
GroupPtr make_free_product(int a_order, int b_order);
GroupPtr make_lattice(int dim);
GroupPtr make_dyadic_chain(std::vector<std::int64_t> levels = {});

}  // namespace btl
