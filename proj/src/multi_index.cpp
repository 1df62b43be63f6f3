#include "twistsym/multi_index.hpp"

#include <algorithm>
#include <stdexcept>

namespace twistsym {

MultiIndex::MultiIndex(std::vector<int> indices) : idx_(std::move(indices)) {
  for (int i : idx_)
    if (i < 0) throw std::invalid_argument("negative multi-index entry");
  std::sort(idx_.begin(), idx_.end());
}

int MultiIndex::count(int i) const { return static_cast<int>(std::count(idx_.begin(), idx_.end(), i)); }

MultiIndex MultiIndex::plus(int i) const {
  MultiIndex r = *this;
  r.idx_.insert(std::upper_bound(r.idx_.begin(), r.idx_.end(), i), i);
  return r;
}

MultiIndex MultiIndex::plus(const MultiIndex& other) const {
  std::vector<int> v = idx_;
  v.insert(v.end(), other.idx_.begin(), other.idx_.end());
  return MultiIndex(std::move(v));
}

bool MultiIndex::contains(const MultiIndex& sub) const {
  return std::includes(idx_.begin(), idx_.end(), sub.idx_.begin(), sub.idx_.end());
}

MultiIndex MultiIndex::minus(const MultiIndex& sub) const {
  if (!contains(sub)) throw std::invalid_argument("multi-index difference of non-contained index");
  MultiIndex r;
  std::set_difference(idx_.begin(), idx_.end(), sub.idx_.begin(), sub.idx_.end(), std::back_inserter(r.idx_));
  return r;
}

MultiIndex MultiIndex::without_last() const {
  MultiIndex r = *this;
  r.idx_.pop_back();
  return r;
}

std::vector<MultiIndex> MultiIndex::of_order(int q, int k) {
  std::vector<MultiIndex> out;
  if (k == 0) {
    out.emplace_back();
    return out;
  }
  if (q <= 0) return out;
  std::vector<int> cur(static_cast<std::size_t>(k), 0);
  while (true) {
    MultiIndex m;
    m.idx_ = cur;
    out.push_back(std::move(m));
    int pos = k - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == q - 1) --pos;
    if (pos < 0) break;
    int v = cur[static_cast<std::size_t>(pos)] + 1;
    for (int j = pos; j < k; ++j) cur[static_cast<std::size_t>(j)] = v;
  }
  return out;
}

std::vector<MultiIndex> MultiIndex::up_to_order(int q, int k) {
  std::vector<MultiIndex> out;
  for (int n = 0; n <= k; ++n) {
    auto level = of_order(q, n);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
  if (auto c = a.idx_.size() <=> b.idx_.size(); c != 0) return c;
  return a.idx_ <=> b.idx_;
}

std::size_t MultiIndex::hash() const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (int i : idx_) h = (h ^ static_cast<std::size_t>(i + 1)) * 0x100000001b3ULL;
  return h;
}

}  // namespace twistsym
