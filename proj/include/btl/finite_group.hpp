#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace btl {

// Finite group on {0, ..., n-1} with identity 0, given by a Cayley table.
class FiniteGroup {
 public:
  FiniteGroup() : FiniteGroup(cyclic(1)) {}

  static FiniteGroup cyclic(int n);
  // Validates closure, identity at 0, inverses and associativity.
  static FiniteGroup from_table(std::vector<std::vector<int>> table);

  int order() const noexcept { return n_; }
  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a) * n_ + b]; }
  int inv(int a) const { return inv_[a]; }
  bool contains(int a) const noexcept { return a >= 0 && a < n_; }
  std::string describe() const;

  friend bool operator==(const FiniteGroup&, const FiniteGroup&) = default;

 private:
  FiniteGroup(int n, std::vector<int> table);

  int n_ = 1;
  std::vector<int> table_;
  std::vector<int> inv_;
};

// Injective homomorphism check; throws StructuralError otherwise.
void validate_embedding(const FiniteGroup& source, const FiniteGroup& target,
                        const std::vector<int>& map, const std::string& label);

// Left cosets xH of a subgroup H = image(map) of G.
// Each coset is represented by its smallest element index, so rep(x) = 0 iff x in H.
class CosetTable {
 public:
  CosetTable() = default;
  CosetTable(const FiniteGroup& g, const std::vector<int>& subgroup_image);

  int rep(int x) const { return rep_[x]; }
  // Index c in the source group with x = rep(x) * image(c).
  int sub_part(int x) const { return sub_[x]; }
  bool in_subgroup(int x) const { return pre_[x] >= 0; }
  int preimage(int x) const { return pre_[x]; }
  int image(int c) const { return image_[c]; }
  int index() const noexcept { return static_cast<int>(reps_.size()); }
  // Sorted representatives, 0 first.
  const std::vector<int>& reps() const noexcept { return reps_; }

 private:
  std::vector<int> rep_, sub_, pre_, image_, reps_;
};

}  // namespace btl
