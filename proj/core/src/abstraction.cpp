#include "causalabs/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "causalabs/errors.hpp"

namespace causalabs {

std::vector<PiEntry> pi_sets(const Dag& dag, const TargetFamily& targets) {
  // Group targets by their non-descendant set, then intersect each group.
  std::map<VertexSet, VertexSet> intersections;
  for (const VertexSet& s : targets.targets()) {
    const VertexSet nd = non_descendants(dag, s);
    auto it = intersections.find(nd);
    if (it == intersections.end()) {
      intersections.emplace(nd, s);
    } else {
      it->second = it->second.intersect(s);
    }
  }
  std::vector<PiEntry> out;
  out.reserve(intersections.size());
  for (const auto& [nd, pi] : intersections) {
    out.push_back({nd, pi, pi.size() == 1});
  }
  return out;
}

AbstractionReport identifiable_abstraction(const Dag& dag,
                                           const TargetFamily& targets) {
  if (targets.size() == 0) throw EmptyTarget("target family is empty");
  std::vector<VertexSet> family = nd_family(dag, targets.targets());
  Partition partition = sigma_atoms(SetFamily(dag.node_count(), family));
  const Digraph quotient = quotient_graph(dag.as_digraph(), partition);
  // Theorem guarantee: the quotient by the sigma-algebra atoms of an
  // nd-family is acyclic. A cycle here is an implementation bug and must
  // surface loudly instead of being condensed away.
  try {
    Dag quotient_dag(quotient.node_count(), quotient.edges());
    std::vector<PiEntry> pi = pi_sets(dag, targets);
    return AbstractionReport{std::move(family), std::move(partition),
                             std::move(quotient_dag), std::move(pi), true};
  } catch (const CycleError&) {
    throw InternalError(
        "quotient by sigma-algebra atoms of an nd-family is cyclic");
  }
}

HomCheck check_graph_hom(const GraphHom& hom) {
  const int ns = hom.source.node_count();
  const int nt = hom.target.node_count();
  if (static_cast<int>(hom.phi.size()) != ns) {
    throw RangeError("phi must be total on source vertices");
  }
  std::vector<char> hit(nt + 1, 0);
  for (Node image : hom.phi) {
    if (image < 1 || image > nt) throw RangeError("phi value outside target");
    hit[image] = 1;
  }
  HomCheck result;
  result.surjective =
      std::all_of(hit.begin() + 1, hit.end(), [](char c) { return c != 0; });
  result.edge_preserving = true;
  for (const auto& [u, v] : hom.source.edges()) {
    const Node pu = hom.phi[u - 1];
    const Node pv = hom.phi[v - 1];
    if (pu != pv && !hom.target.has_edge(pu, pv)) {
      result.edge_preserving = false;
      break;
    }
  }
  return result;
}

AbstractionCheck check_scm_abstraction(const LinearGaussianScm& source,
                                       const LinearGaussianScm& target,
                                       const GraphHom& hom,
                                       const LinearMaps& maps, double tol) {
  const int ns = source.node_count();
  const int nt = target.node_count();
  if (hom.source.node_count() != ns || hom.target.node_count() != nt) {
    throw DimensionMismatch("hom does not connect the given SCMs");
  }
  if (static_cast<int>(maps.h.size()) != ns) {
    throw DimensionMismatch("one linear map per source node required");
  }
  const HomCheck hc = check_graph_hom(hom);
  if (!hc.edge_preserving || !hc.surjective) {
    throw NotSurjective("phi must be an edge-preserving surjection");
  }

  Eigen::MatrixXd aggregate = Eigen::MatrixXd::Zero(nt, ns);
  for (int i = 0; i < ns; ++i) aggregate(hom.phi[i] - 1, i) = maps.h[i];

  const Eigen::MatrixXd sigma_source = latent_covariance(source);
  const Eigen::MatrixXd sigma_target = latent_covariance(target);
  const Eigen::MatrixXd sigma_aggregate =
      aggregate * sigma_source * aggregate.transpose();

  AbstractionCheck result;
  result.max_abs_deviation =
      (sigma_aggregate - sigma_target).cwiseAbs().maxCoeff();
  result.pass = result.max_abs_deviation <= tol;
  return result;
}

bool check_scm_isomorphism(const LinearGaussianScm& a,
                           const LinearGaussianScm& b, const GraphHom& iso,
                           const LinearMaps& maps, double tol) {
  const int n = a.node_count();
  if (b.node_count() != n) throw NotBijective("node counts differ");
  if (static_cast<int>(iso.phi.size()) != n) {
    throw NotBijective("phi must be total");
  }
  std::vector<Node> inverse(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    const Node image = iso.phi[i];
    if (image < 1 || image > n || inverse[image] != 0) {
      throw NotBijective("phi is not a bijection");
    }
    inverse[image] = i + 1;
  }
  // Edge-bijective: phi maps E(a) onto E(b) exactly.
  if (a.dag().edges().size() != b.dag().edges().size()) {
    throw NotBijective("edge counts differ");
  }
  for (const auto& [u, v] : a.dag().edges()) {
    if (!b.dag().has_edge(iso.phi[u - 1], iso.phi[v - 1])) {
      throw NotBijective("phi does not map edges onto edges");
    }
  }

  // Zero maps cannot witness an isomorphism.
  for (double h : maps.h) {
    if (std::abs(h) < 1e-300) return false;
  }

  const AbstractionCheck forward = check_scm_abstraction(a, b, iso, maps, tol);
  LinearMaps inverse_maps;
  inverse_maps.h.resize(n);
  for (int i = 0; i < n; ++i) {
    inverse_maps.h[iso.phi[i] - 1] = 1.0 / maps.h[i];
  }
  GraphHom backward{b.dag().as_digraph(), a.dag().as_digraph(),
                    std::vector<Node>(inverse.begin() + 1, inverse.end())};
  const AbstractionCheck reverse =
      check_scm_abstraction(b, a, backward, inverse_maps, tol);
  return forward.pass && reverse.pass;
}

GraphHom canonical_quotient_hom(const Dag& dag,
                                const AbstractionReport& report) {
  std::vector<Node> phi(dag.node_count());
  for (Node v = 1; v <= dag.node_count(); ++v) {
    phi[v - 1] = report.partition.block_of(v) + 1;
  }
  return GraphHom{dag.as_digraph(), report.quotient.as_digraph(),
                  std::move(phi)};
}

std::vector<std::string> block_labels(const Partition& partition) {
  std::vector<std::string> labels;
  labels.reserve(partition.block_count());
  for (const VertexSet& block : partition.blocks()) {
    labels.push_back(block.to_string());
  }
  return labels;
}

}  // namespace causalabs
