#include "btl/finite_group.hpp"

#include <algorithm>
#include <sstream>

#include "btl/error.hpp"

namespace btl {

FiniteGroup::FiniteGroup(int n, std::vector<int> table) : n_(n), table_(std::move(table)), inv_(n, -1) {
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      if (mul(a, b) == 0) inv_[a] = b;
}

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n < 1) throw StructuralError("cyclic group order must be positive");
  std::vector<int> t(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[static_cast<std::size_t>(a) * n + b] = (a + b) % n;
  return FiniteGroup(n, std::move(t));
}

FiniteGroup FiniteGroup::from_table(std::vector<std::vector<int>> table) {
  const int n = static_cast<int>(table.size());
  if (n < 1) throw StructuralError("empty Cayley table");
  std::vector<int> flat;
  flat.reserve(static_cast<std::size_t>(n) * n);
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n) throw StructuralError("Cayley table is not square");
    for (int v : row) {
      if (v < 0 || v >= n) throw StructuralError("Cayley table entry out of range");
      flat.push_back(v);
    }
  }
  auto at = [&](int a, int b) { return flat[static_cast<std::size_t>(a) * n + b]; };
  for (int a = 0; a < n; ++a) {
    if (at(0, a) != a || at(a, 0) != a) throw StructuralError("element 0 is not the identity");
    std::vector<char> seen_row(n, 0), seen_col(n, 0);
    for (int b = 0; b < n; ++b) {
      seen_row[at(a, b)] = 1;
      seen_col[at(b, a)] = 1;
    }
    if (std::count(seen_row.begin(), seen_row.end(), 1) != n ||
        std::count(seen_col.begin(), seen_col.end(), 1) != n)
      throw StructuralError("Cayley table is not a Latin square");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (at(at(a, b), c) != at(a, at(b, c))) throw StructuralError("Cayley table is not associative");
  return FiniteGroup(n, std::move(flat));
}

std::string FiniteGroup::describe() const {
  std::ostringstream os;
  os << "order=" << n_ << ";table=";
  for (int v : table_) os << v << ',';
  return os.str();
}

void validate_embedding(const FiniteGroup& source, const FiniteGroup& target, const std::vector<int>& map,
                        const std::string& label) {
  if (static_cast<int>(map.size()) != source.order())
    throw StructuralError(label + ": embedding size does not match subgroup order");
  for (int v : map)
    if (!target.contains(v)) throw StructuralError(label + ": embedding image out of range");
  std::vector<int> sorted = map;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw StructuralError(label + ": embedding is not injective");
  for (int a = 0; a < source.order(); ++a)
    for (int b = 0; b < source.order(); ++b)
      if (map[source.mul(a, b)] != target.mul(map[a], map[b]))
        throw StructuralError(label + ": embedding is not a homomorphism");
}

CosetTable::CosetTable(const FiniteGroup& g, const std::vector<int>& subgroup_image)
    : rep_(g.order(), -1), sub_(g.order(), -1), pre_(g.order(), -1), image_(subgroup_image) {
  for (int c = 0; c < static_cast<int>(image_.size()); ++c) pre_[image_[c]] = c;
  for (int x = 0; x < g.order(); ++x) {
    if (rep_[x] >= 0) continue;
    // x is the smallest element of its coset x H.
    reps_.push_back(x);
    for (int c = 0; c < static_cast<int>(image_.size()); ++c) {
      const int y = g.mul(x, image_[c]);
      rep_[y] = x;
      sub_[y] = c;
    }
  }
}

}  // namespace btl
