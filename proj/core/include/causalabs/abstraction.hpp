#ifndef CAUSALABS_ABSTRACTION_HPP
#define CAUSALABS_ABSTRACTION_HPP

#include <vector>

#include "causalabs/graph.hpp"
#include "causalabs/scm.hpp"
#include "causalabs/setcalc.hpp"
#include "causalabs/targets.hpp"

namespace causalabs {

/// pi(N): intersection of all targets whose non-descendant set equals N.
/// A singleton pi(N) marks a disentanglement candidate.
struct PiEntry {
  VertexSet nd;
  VertexSet pi;
  bool singleton = false;
};

/// Everything the identifiability calculus yields for one (graph, targets)
/// instance: the non-descendant family, the atoms of its sigma-algebra, the
/// quotient graph (with acyclicity certificate), and the pi map.
struct AbstractionReport {
  std::vector<VertexSet> nd_family;
  Partition partition;
  Dag quotient;
  std::vector<PiEntry> pi_map;
  bool acyclic = false;
};

AbstractionReport identifiable_abstraction(const Dag& dag,
                                           const TargetFamily& targets);

std::vector<PiEntry> pi_sets(const Dag& dag, const TargetFamily& targets);

/// Vertex map between two directed graphs. phi[i-1] is the image of source
/// node i.
struct GraphHom {
  Digraph source;
  Digraph target;
  std::vector<Node> phi;
};

struct HomCheck {
  bool edge_preserving = false;  // phi(u)=phi(v) or (phi(u),phi(v)) an edge
  bool surjective = false;
};

HomCheck check_graph_hom(const GraphHom& hom);

/// Per-source-node linear maps h_i (scalar latents).
struct LinearMaps {
  std::vector<double> h;
};

struct AbstractionCheck {
  bool pass = false;
  double max_abs_deviation = 0.0;
};

/// Checks Eq.-style distributional consistency of an abstraction for linear
/// Gaussian SCMs: the joint covariance of the per-target-node aggregates
/// sum_{i in phi^-1(j)} h_i z'_i must match the target latent covariance
/// entrywise within tol. Joint (not per-marginal) comparison: for Gaussians
/// equality in distribution of the aggregate vector is covariance equality.
AbstractionCheck check_scm_abstraction(const LinearGaussianScm& source,
                                       const LinearGaussianScm& target,
                                       const GraphHom& hom,
                                       const LinearMaps& maps, double tol);

/// Both directions of check_scm_abstraction under a graph isomorphism with
/// inverse maps.
bool check_scm_isomorphism(const LinearGaussianScm& a,
                           const LinearGaussianScm& b, const GraphHom& iso,
                           const LinearMaps& maps, double tol);

/// Canonical quotient map (node -> its block) as a GraphHom onto the
/// report's quotient graph.
GraphHom canonical_quotient_hom(const Dag& dag, const AbstractionReport& report);

/// Block labels ("{1,2}", ...) for DOT export of a quotient graph.
std::vector<std::string> block_labels(const Partition& partition);

}  // namespace causalabs

#endif  // CAUSALABS_ABSTRACTION_HPP
