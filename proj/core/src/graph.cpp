#include "causalabs/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "causalabs/errors.hpp"

namespace causalabs {

Digraph::Digraph(int n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)) {
  if (n < 1) throw RangeError("node count must be >= 1");
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& [u, v] = edges_[i];
    if (u < 1 || u > n || v < 1 || v > n) {
      throw RangeError("edge endpoint outside 1.." + std::to_string(n));
    }
    if (u == v) throw CycleError("self-loop at node " + std::to_string(u));
    if (i > 0 && edges_[i] == edges_[i - 1]) {
      throw DuplicateEdge("(" + std::to_string(u) + "," + std::to_string(v) + ")");
    }
  }
  out_.assign(n + 1, {});
  for (const auto& [u, v] : edges_) out_[u].push_back(v);
}

const std::vector<Node>& Digraph::successors(Node u) const {
  if (u < 1 || u > n_) throw RangeError("node outside 1..n");
  return out_[u];
}

bool Digraph::has_edge(Node u, Node v) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
}

namespace {

// Kahn's algorithm with a min-heap: yields the lexicographically smallest
// topological order, making cached orders stable across runs.
std::vector<Node> topological_order_or_empty(const Digraph& g) {
  const int n = g.node_count();
  std::vector<int> indegree(n + 1, 0);
  for (const auto& [u, v] : g.edges()) ++indegree[v];
  std::priority_queue<Node, std::vector<Node>, std::greater<>> ready;
  for (Node v = 1; v <= n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<Node> order;
  order.reserve(n);
  while (!ready.empty()) {
    const Node u = ready.top();
    ready.pop();
    order.push_back(u);
    for (Node v : g.successors(u)) {
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  if (static_cast<int>(order.size()) != n) order.clear();
  return order;
}

}  // namespace

Dag::Dag(int n, std::vector<Edge> edges) : graph_(n, std::move(edges)) {
  topo_ = topological_order_or_empty(graph_);
  if (topo_.empty()) throw CycleError("edge set has a directed cycle");
}

Dag validate_dag(int n, std::vector<Edge> edges) {
  return Dag(n, std::move(edges));
}

VertexSet descendants(const Dag& dag, Node i) {
  if (i < 1 || i > dag.node_count()) throw RangeError("node outside 1..n");
  std::vector<char> seen(dag.node_count() + 1, 0);
  std::vector<Node> stack{i};
  seen[i] = 1;
  std::vector<Node> out;
  while (!stack.empty()) {
    const Node u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (Node v : dag.successors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return VertexSet(std::move(out));
}

VertexSet non_descendants(const Dag& dag, const VertexSet& s) {
  if (s.empty()) throw EmptyTarget("non_descendants of an empty target");
  VertexSet reached;
  for (Node i : s) reached = reached.unite(descendants(dag, i));
  return reached.complement(dag.node_count());
}

std::vector<VertexSet> nd_family(const Dag& dag,
                                 const std::vector<VertexSet>& targets) {
  std::vector<VertexSet> family;
  family.reserve(targets.size());
  for (const VertexSet& s : targets) family.push_back(non_descendants(dag, s));
  std::sort(family.begin(), family.end());
  family.erase(std::unique(family.begin(), family.end()), family.end());
  return family;
}

Digraph quotient_graph(const Digraph& g, const Partition& p) {
  if (p.universe_size() != g.node_count()) {
    throw PartitionMismatch("partition universe differs from graph");
  }
  std::set<Edge> block_edges;
  for (const auto& [u, v] : g.edges()) {
    const int bu = p.block_of(u);
    const int bv = p.block_of(v);
    if (bu != bv) block_edges.insert({bu + 1, bv + 1});
  }
  return Digraph(static_cast<int>(p.block_count()),
                 {block_edges.begin(), block_edges.end()});
}

namespace {

// Iterative Tarjan SCC.
struct TarjanState {
  const Digraph& g;
  std::vector<int> index, lowlink;
  std::vector<char> on_stack;
  std::vector<Node> stack;
  int counter = 0;
  std::vector<std::vector<Node>> components;

  explicit TarjanState(const Digraph& graph)
      : g(graph),
        index(graph.node_count() + 1, -1),
        lowlink(graph.node_count() + 1, 0),
        on_stack(graph.node_count() + 1, 0) {}

  void run(Node root) {
    struct Frame {
      Node v;
      std::size_t next_child;
    };
    std::vector<Frame> frames{{root, 0}};
    visit(root);
    while (!frames.empty()) {
      Frame& f = frames.back();
      const auto& succ = g.successors(f.v);
      if (f.next_child < succ.size()) {
        const Node w = succ[f.next_child++];
        if (index[w] == -1) {
          visit(w);
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        if (lowlink[f.v] == index[f.v]) {
          std::vector<Node> comp;
          Node w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp.push_back(w);
          } while (w != f.v);
          components.push_back(std::move(comp));
        }
        const Node child = f.v;
        frames.pop_back();
        if (!frames.empty()) {
          lowlink[frames.back().v] =
              std::min(lowlink[frames.back().v], lowlink[child]);
        }
      }
    }
  }

  void visit(Node v) {
    index[v] = lowlink[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
  }
};

}  // namespace

std::pair<Partition, Dag> scc_condensation(const Digraph& g) {
  TarjanState tarjan(g);
  for (Node v = 1; v <= g.node_count(); ++v) {
    if (tarjan.index[v] == -1) tarjan.run(v);
  }
  std::vector<VertexSet> blocks;
  blocks.reserve(tarjan.components.size());
  for (auto& comp : tarjan.components) blocks.emplace_back(std::move(comp));
  Partition partition(g.node_count(), std::move(blocks));
  const Digraph quotient = quotient_graph(g, partition);
  return {partition, Dag(quotient.node_count(), quotient.edges())};
}

namespace {
std::string render_dot(int n, const std::vector<Edge>& edges,
                       const std::vector<std::string>& labels) {
  std::string out = "digraph G {\n";
  for (Node v = 1; v <= n; ++v) {
    out += "  " + std::to_string(v);
    if (static_cast<std::size_t>(v) <= labels.size()) {
      out += " [label=\"" + labels[v - 1] + "\"]";
    }
    out += ";\n";
  }
  for (const auto& [u, v] : edges) {
    out += "  " + std::to_string(u) + " -> " + std::to_string(v) + ";\n";
  }
  out += "}\n";
  return out;
}
}  // namespace

std::string to_dot(const Digraph& g, const std::vector<std::string>& labels) {
  return render_dot(g.node_count(), g.edges(), labels);
}

std::string to_dot(const Dag& g, const std::vector<std::string>& labels) {
  return render_dot(g.node_count(), g.edges(), labels);
}

}  // namespace causalabs
