#ifndef CAUSALABS_VERTEX_SET_HPP
#define CAUSALABS_VERTEX_SET_HPP

#include <initializer_list>
#include <string>
#include <vector>

namespace causalabs {

using Node = int;  // 1-based vertex labels

/// A subset of {1..n}, kept sorted and deduplicated so that equal sets
/// compare equal and serialize identically across runs.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<Node> nodes);
  explicit VertexSet(std::vector<Node> nodes);

  bool contains(Node v) const;
  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }

  bool subset_of(const VertexSet& other) const;
  VertexSet unite(const VertexSet& other) const;
  VertexSet intersect(const VertexSet& other) const;
  /// Complement within the universe {1..n}.
  VertexSet complement(int n) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  auto begin() const { return nodes_.begin(); }
  auto end() const { return nodes_.end(); }

  /// Set-as-bitmask; requires all elements <= 64.
  std::uint64_t bitmask() const;
  static VertexSet from_bitmask(std::uint64_t mask);

  std::string to_string() const;  // "{1,2,5}"

  friend bool operator==(const VertexSet&, const VertexSet&) = default;
  friend auto operator<=>(const VertexSet&, const VertexSet&) = default;

 private:
  std::vector<Node> nodes_;
};

/// Disjoint nonempty blocks covering {1..n}; blocks ordered by smallest
/// element. Construction validates the partition property.
class Partition {
 public:
  Partition(int n, std::vector<VertexSet> blocks);

  int universe_size() const { return n_; }
  const std::vector<VertexSet>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }

  /// 0-based index of the block containing v.
  int block_of(Node v) const;

  static Partition singletons(int n);

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  int n_ = 0;
  std::vector<VertexSet> blocks_;
  std::vector<int> block_of_;  // 1-based node -> block index
};

/// true iff every block of `fine` is contained in some block of `coarse`.
bool is_refinement(const Partition& fine, const Partition& coarse);

}  // namespace causalabs

#endif  // CAUSALABS_VERTEX_SET_HPP
