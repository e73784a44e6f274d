#include "causalabs/vertex_set.hpp"

#include <algorithm>
#include <cstdint>

#include "causalabs/errors.hpp"

namespace causalabs {

namespace {
void canonicalize(std::vector<Node>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}
}  // namespace

VertexSet::VertexSet(std::initializer_list<Node> nodes) : nodes_(nodes) {
  canonicalize(nodes_);
}

VertexSet::VertexSet(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  canonicalize(nodes_);
}

bool VertexSet::contains(Node v) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), v);
}

bool VertexSet::subset_of(const VertexSet& other) const {
  return std::includes(other.nodes_.begin(), other.nodes_.end(),
                       nodes_.begin(), nodes_.end());
}

VertexSet VertexSet::unite(const VertexSet& other) const {
  std::vector<Node> out;
  out.reserve(nodes_.size() + other.nodes_.size());
  std::set_union(nodes_.begin(), nodes_.end(), other.nodes_.begin(),
                 other.nodes_.end(), std::back_inserter(out));
  VertexSet r;
  r.nodes_ = std::move(out);
  return r;
}

VertexSet VertexSet::intersect(const VertexSet& other) const {
  std::vector<Node> out;
  std::set_intersection(nodes_.begin(), nodes_.end(), other.nodes_.begin(),
                        other.nodes_.end(), std::back_inserter(out));
  VertexSet r;
  r.nodes_ = std::move(out);
  return r;
}

VertexSet VertexSet::complement(int n) const {
  std::vector<Node> out;
  out.reserve(n - nodes_.size());
  for (Node v = 1; v <= n; ++v) {
    if (!contains(v)) out.push_back(v);
  }
  VertexSet r;
  r.nodes_ = std::move(out);
  return r;
}

std::uint64_t VertexSet::bitmask() const {
  std::uint64_t mask = 0;
  for (Node v : nodes_) {
    if (v < 1 || v > 64) throw RangeError("bitmask requires labels in 1..64");
    mask |= (std::uint64_t{1} << (v - 1));
  }
  return mask;
}

VertexSet VertexSet::from_bitmask(std::uint64_t mask) {
  std::vector<Node> out;
  for (int v = 1; v <= 64 && mask != 0; ++v) {
    if (mask & 1) out.push_back(v);
    mask >>= 1;
  }
  VertexSet r;
  r.nodes_ = std::move(out);
  return r;
}

std::string VertexSet::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i != 0) s += ',';
    s += std::to_string(nodes_[i]);
  }
  s += '}';
  return s;
}

Partition::Partition(int n, std::vector<VertexSet> blocks)
    : n_(n), blocks_(std::move(blocks)) {
  if (n < 1) throw PartitionMismatch("universe must be nonempty");
  std::sort(blocks_.begin(), blocks_.end(),
            [](const VertexSet& a, const VertexSet& b) {
              if (a.empty() || b.empty()) return b.empty() && !a.empty();
              return a.nodes().front() < b.nodes().front();
            });
  block_of_.assign(n + 1, -1);
  std::size_t covered = 0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (blocks_[b].empty()) throw PartitionMismatch("empty block");
    for (Node v : blocks_[b]) {
      if (v < 1 || v > n) throw PartitionMismatch("block element out of range");
      if (block_of_[v] != -1) throw PartitionMismatch("overlapping blocks");
      block_of_[v] = static_cast<int>(b);
      ++covered;
    }
  }
  if (covered != static_cast<std::size_t>(n)) {
    throw PartitionMismatch("blocks do not cover the universe");
  }
}

int Partition::block_of(Node v) const {
  if (v < 1 || v > n_) throw RangeError("node outside universe");
  return block_of_[v];
}

Partition Partition::singletons(int n) {
  std::vector<VertexSet> blocks;
  blocks.reserve(n);
  for (Node v = 1; v <= n; ++v) blocks.push_back(VertexSet{v});
  return Partition(n, std::move(blocks));
}

bool is_refinement(const Partition& fine, const Partition& coarse) {
  if (fine.universe_size() != coarse.universe_size()) {
    throw UniverseMismatch("partitions over different universes");
  }
  for (const VertexSet& block : fine.blocks()) {
    const int target = coarse.block_of(block.nodes().front());
    if (!block.subset_of(coarse.blocks()[target])) return false;
  }
  return true;
}

}  // namespace causalabs
