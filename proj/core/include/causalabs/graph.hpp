#ifndef CAUSALABS_GRAPH_HPP
#define CAUSALABS_GRAPH_HPP

#include <string>
#include <utility>
#include <vector>

#include "causalabs/vertex_set.hpp"

namespace causalabs {

using Edge = std::pair<Node, Node>;

/// Directed graph over 1..n, possibly cyclic. No self-loops, no duplicate
/// edges; endpoints validated at construction.
class Digraph {
 public:
  Digraph(int n, std::vector<Edge> edges);

  int node_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Node>& successors(Node u) const;
  bool has_edge(Node u, Node v) const;

  friend bool operator==(const Digraph&, const Digraph&) = default;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;             // sorted, unique
  std::vector<std::vector<Node>> out_;  // adjacency, 1-based outer index
};

/// Directed acyclic graph; construction rejects cyclic edge sets and caches
/// a deterministic topological order.
class Dag {
 public:
  Dag(int n, std::vector<Edge> edges);

  int node_count() const { return graph_.node_count(); }
  const std::vector<Edge>& edges() const { return graph_.edges(); }
  const std::vector<Node>& successors(Node u) const {
    return graph_.successors(u);
  }
  bool has_edge(Node u, Node v) const { return graph_.has_edge(u, v); }
  const std::vector<Node>& topological_order() const { return topo_; }
  const Digraph& as_digraph() const { return graph_; }

  friend bool operator==(const Dag& a, const Dag& b) {
    return a.graph_ == b.graph_;
  }

 private:
  Digraph graph_;
  std::vector<Node> topo_;
};

/// Validates (n, edges) and returns a Dag with a cached topological order.
Dag validate_dag(int n, std::vector<Edge> edges);

/// {j : i leads to j by a directed path} plus i itself.
VertexSet descendants(const Dag& dag, Node i);

/// Nodes that are descendants of no member of S (S itself excluded).
VertexSet non_descendants(const Dag& dag, const VertexSet& s);

/// Deduplicated {nd(S) : S in targets}, in canonical (lexicographic) order.
std::vector<VertexSet> nd_family(const Dag& dag,
                                 const std::vector<VertexSet>& targets);

/// Blocks of p become nodes (in partition order); an edge joins distinct
/// blocks iff some original edge crosses them. Intra-block edges are dropped.
Digraph quotient_graph(const Digraph& g, const Partition& p);

/// Partition into strongly connected components plus the (always acyclic)
/// quotient by it.
std::pair<Partition, Dag> scc_condensation(const Digraph& g);

/// Graphviz DOT rendering; labels may rename nodes (index 0 names node 1).
std::string to_dot(const Digraph& g, const std::vector<std::string>& labels = {});
std::string to_dot(const Dag& g, const std::vector<std::string>& labels = {});

}  // namespace causalabs

#endif  // CAUSALABS_GRAPH_HPP
