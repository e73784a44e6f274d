#include "causalabs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "causalabs/errors.hpp"

namespace causalabs {

SetFamily delta_support_oracle(const Eigen::MatrixXd& z,
                               const Eigen::MatrixXd& z_tilde, double tol) {
  const auto rows = z.rows();
  const int n = static_cast<int>(z.cols());
  if (rows == 0) throw EmptyInput("no latent pairs");
  if (z_tilde.rows() != rows || z_tilde.cols() != n) {
    throw DimensionMismatch("paired matrices must have equal shape");
  }
  if (n > 64) throw SizeError("oracle supports up to 64 coordinates");

  std::map<std::uint64_t, std::int64_t> pattern_counts;
  for (Eigen::Index r = 0; r < rows; ++r) {
    std::uint64_t pattern = 0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(z(r, i) - z_tilde(r, i)) <= tol) {
        pattern |= (std::uint64_t{1} << i);
      }
    }
    ++pattern_counts[pattern];
  }

  const double floor_count = std::max(
      10.0, 0.5 * static_cast<double>(rows) / pattern_counts.size());
  std::vector<VertexSet> family;
  for (const auto& [pattern, count] : pattern_counts) {
    if (static_cast<double>(count) >= floor_count) {
      family.push_back(VertexSet::from_bitmask(pattern));
    }
  }
  return SetFamily(n, std::move(family));
}

BlockScore block_score(const Eigen::MatrixXd& m, const Partition& partition) {
  const int n = partition.universe_size();
  if (m.rows() != n || m.cols() != n) {
    throw DimensionMismatch("matrix dimension differs from partition");
  }
  BlockScore result;
  result.total_mass = m.squaredNorm();
  result.block_mass.reserve(partition.block_count());
  double in_block = 0.0;
  for (const VertexSet& block : partition.blocks()) {
    double mass = 0.0;
    for (Node r : block) {
      for (Node c : block) mass += m(r - 1, c - 1) * m(r - 1, c - 1);
    }
    result.block_mass.push_back(mass);
    in_block += mass;
  }
  result.score = result.total_mass > 0.0 ? in_block / result.total_mass : 0.0;
  return result;
}

namespace {

struct Assignment {
  // mass(l, b): squared mass of learned coordinate l over block b's columns.
  Eigen::MatrixXd mass;
  std::vector<int> capacity;
  std::vector<int> best, current;
  double best_value = -1.0;

  void search(int l, double value, const std::vector<double>& optimistic) {
    const int n = static_cast<int>(current.size());
    if (l == n) {
      if (value > best_value) {
        best_value = value;
        best = current;
      }
      return;
    }
    if (value + optimistic[l] <= best_value) return;  // bound
    for (int b = 0; b < static_cast<int>(capacity.size()); ++b) {
      if (capacity[b] == 0) continue;
      --capacity[b];
      current[l] = b;
      search(l + 1, value + mass(l, b), optimistic);
      ++capacity[b];
    }
  }
};

}  // namespace

MatchResult match_blocks(const Eigen::MatrixXd& m, const Partition& partition) {
  const int n = partition.universe_size();
  if (m.rows() != n || m.cols() != n) {
    throw DimensionMismatch("matrix dimension differs from partition");
  }
  const int blocks = static_cast<int>(partition.block_count());

  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, blocks);
  for (int l = 0; l < n; ++l) {
    for (int b = 0; b < blocks; ++b) {
      for (Node c : partition.blocks()[b]) {
        mass(l, b) += m(l, c - 1) * m(l, c - 1);
      }
    }
  }

  std::vector<int> assignment(n, -1);
  if (n <= 8) {
    Assignment solver;
    solver.mass = mass;
    solver.capacity.resize(blocks);
    for (int b = 0; b < blocks; ++b) {
      solver.capacity[b] = static_cast<int>(partition.blocks()[b].size());
    }
    solver.best.assign(n, -1);
    solver.current.assign(n, -1);
    std::vector<double> optimistic(n + 1, 0.0);
    for (int l = n - 1; l >= 0; --l) {
      optimistic[l] = optimistic[l + 1] + mass.row(l).maxCoeff();
    }
    solver.search(0, 0.0, optimistic);
    assignment = solver.best;
  } else {
    // Greedy: largest |m| entries claim coordinates for their block.
    std::vector<std::pair<double, std::pair<int, int>>> entries;
    entries.reserve(static_cast<std::size_t>(n) * n);
    for (int l = 0; l < n; ++l) {
      for (int c = 0; c < n; ++c) {
        entries.push_back({m(l, c) * m(l, c), {l, c}});
      }
    }
    std::sort(entries.rbegin(), entries.rend());
    std::vector<int> remaining(blocks);
    for (int b = 0; b < blocks; ++b) {
      remaining[b] = static_cast<int>(partition.blocks()[b].size());
    }
    int assigned = 0;
    for (const auto& [value, lc] : entries) {
      const int l = lc.first;
      const int b = partition.block_of(lc.second + 1);
      if (assignment[l] == -1 && remaining[b] > 0) {
        assignment[l] = b;
        --remaining[b];
        if (++assigned == n) break;
      }
    }
  }

  MatchResult result;
  result.learned_groups.assign(blocks, VertexSet{});
  std::vector<std::vector<Node>> groups(blocks);
  double in_block = 0.0;
  for (int l = 0; l < n; ++l) {
    groups[assignment[l]].push_back(l + 1);
    in_block += mass(l, assignment[l]);
  }
  for (int b = 0; b < blocks; ++b) {
    result.learned_groups[b] = VertexSet(std::move(groups[b]));
  }
  const double total = m.squaredNorm();
  result.score = total > 0.0 ? in_block / total : 0.0;
  return result;
}

bool pi_coordinate_check(const Eigen::MatrixXd& m, const VertexSet& block,
                         Node pi_coord, double tol) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw DimensionMismatch("matrix must be square");
  if (pi_coord < 1 || pi_coord > n) throw RangeError("pi coordinate outside 1..n");
  if (!block.contains(pi_coord)) {
    throw RangeError("pi coordinate must lie in its block");
  }
  for (int r = 0; r < n; ++r) {
    if (std::abs(m(r, pi_coord - 1)) < 1.0 - tol) continue;
    bool clean = true;
    for (int c = 0; c < n; ++c) {
      if (c == pi_coord - 1) continue;
      if (std::abs(m(r, c)) > tol) {
        clean = false;
        break;
      }
    }
    if (clean) return true;
  }
  return false;
}

}  // namespace causalabs
