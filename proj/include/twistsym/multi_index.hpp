#pragma once

#include <compare>
#include <cstddef>
#include <vector>

namespace twistsym {

/// Sorted multiset of independent-variable indices; |J| is the derivative order.
/// u_{xy} and u_{yx} share the representation {0, 1}.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> indices);

  int order() const { return static_cast<int>(idx_.size()); }
  bool empty() const { return idx_.empty(); }
  const std::vector<int>& indices() const { return idx_; }

  /// Count of index i in the multiset.
  int count(int i) const;
  MultiIndex plus(int i) const;
  MultiIndex plus(const MultiIndex& other) const;
  bool contains(const MultiIndex& sub) const;
  /// Multiset difference; requires contains(sub).
  MultiIndex minus(const MultiIndex& sub) const;
  int last() const { return idx_.back(); }
  MultiIndex without_last() const;

  /// All canonical multi-indices of exactly order k over q variables, in
  /// lexicographic order.
  static std::vector<MultiIndex> of_order(int q, int k);
  /// All canonical multi-indices with 0 <= |J| <= k, grouped by order.
  static std::vector<MultiIndex> up_to_order(int q, int k);

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b);

  std::size_t hash() const;

 private:
  std::vector<int> idx_;
};

}  // namespace twistsym
