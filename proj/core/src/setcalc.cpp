#include "causalabs/setcalc.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "causalabs/errors.hpp"

namespace causalabs {

SetFamily::SetFamily(int universe, std::vector<VertexSet> members)
    : n(universe), sets(std::move(members)) {
  if (n < 1) throw RangeError("universe must be nonempty");
  for (const VertexSet& s : sets) {
    if (!s.empty() && (s.nodes().front() < 1 || s.nodes().back() > n)) {
      throw RangeError("set member outside 1.." + std::to_string(n));
    }
  }
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
}

Partition sigma_atoms(const SetFamily& family) {
  // Group universe elements by membership signature across the generators.
  std::map<std::vector<bool>, std::vector<Node>> groups;
  for (Node v = 1; v <= family.n; ++v) {
    std::vector<bool> signature;
    signature.reserve(family.sets.size());
    for (const VertexSet& s : family.sets) signature.push_back(s.contains(v));
    groups[std::move(signature)].push_back(v);
  }
  std::vector<VertexSet> blocks;
  blocks.reserve(groups.size());
  for (auto& [sig, members] : groups) blocks.emplace_back(std::move(members));
  return Partition(family.n, std::move(blocks));
}

std::vector<VertexSet> generated_algebra(const SetFamily& family) {
  if (sigma_atoms(family).block_count() > 20) {
    throw SizeError("generated algebra would exceed 2^20 sets");
  }
  const VertexSet universe = VertexSet{}.complement(family.n);
  std::set<VertexSet> algebra(family.sets.begin(), family.sets.end());
  algebra.insert(universe);
  // Fixpoint under complements and pairwise unions.
  for (;;) {
    std::vector<VertexSet> fresh;
    for (const VertexSet& a : algebra) {
      const VertexSet comp = a.complement(family.n);
      if (!algebra.count(comp)) fresh.push_back(comp);
      for (const VertexSet& b : algebra) {
        VertexSet u = a.unite(b);
        if (!algebra.count(u)) fresh.push_back(std::move(u));
      }
    }
    if (fresh.empty()) break;
    algebra.insert(fresh.begin(), fresh.end());
  }
  return {algebra.begin(), algebra.end()};
}

}  // namespace causalabs
