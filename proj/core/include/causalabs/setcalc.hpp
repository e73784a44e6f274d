#ifndef CAUSALABS_SETCALC_HPP
#define CAUSALABS_SETCALC_HPP

#include <vector>

#include "causalabs/vertex_set.hpp"

namespace causalabs {

/// A family of subsets of {1..n}; duplicates removed, canonical order.
/// The empty set is an allowed member.
struct SetFamily {
  int n = 0;
  std::vector<VertexSet> sets;

  SetFamily(int universe, std::vector<VertexSet> members);
};

/// Atoms of the sigma-algebra generated by the family: elements of the
/// universe are grouped by their membership signature across generators.
/// Every generator is a union of the returned blocks.
Partition sigma_atoms(const SetFamily& family);

/// The full generated algebra, computed by closure iteration under
/// complements and pairwise unions (on a finite universe the algebra equals
/// the sigma-algebra). Brute-force oracle for sigma_atoms; guarded by
/// SizeError when the atom count exceeds 20.
std::vector<VertexSet> generated_algebra(const SetFamily& family);

}  // namespace causalabs

#endif  // CAUSALABS_SETCALC_HPP
