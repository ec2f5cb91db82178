#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "treerules/interactions.hpp"

namespace testing {

using namespace treerules;

using Key = std::tuple<std::vector<Item>, double, std::size_t>;

inline std::vector<Key> keys_of(const std::vector<AssociationRule>& rules) {
  std::vector<Key> out;
  for (const auto& r : rules) out.emplace_back(r.lhs, r.rhs.outcome, r.count);
  std::sort(out.begin(), out.end());
  return out;
}

// Every subset of the non-target items, counted directly.
inline std::vector<Key> exhaustive(const std::vector<Transaction>& ts, const MiningParams& p) {
  std::set<Item> universe;
  std::set<double> outcomes;
  for (const auto& t : ts)
    for (const auto& i : t.items) {
      if (i.kind == Item::Kind::target)
        outcomes.insert(i.outcome);
      else
        universe.insert(i);
    }
  const std::vector<Item> items(universe.begin(), universe.end());
  std::vector<Key> out;
  for (std::uint32_t mask = 1; mask < (1u << items.size()); ++mask) {
    std::vector<Item> lhs;
    for (std::size_t b = 0; b < items.size(); ++b)
      if (mask >> b & 1u) lhs.push_back(items[b]);
    if (lhs.size() + 1 > p.max_length) continue;
    std::size_t count = 0;
    std::map<double, std::size_t> by;
    for (const auto& t : ts)
      if (std::includes(t.items.begin(), t.items.end(), lhs.begin(), lhs.end())) {
        ++count;
        ++by[t.items.back().outcome];
      }
    if (count == 0 || static_cast<double>(count) < p.min_support * static_cast<double>(ts.size()) - 1e-9) continue;
    for (double k : outcomes)
      if (static_cast<double>(by[k]) / static_cast<double>(count) + 1e-12 >= p.min_confidence)
        out.emplace_back(lhs, k, count);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testing
