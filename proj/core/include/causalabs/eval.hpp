#ifndef CAUSALABS_EVAL_HPP
#define CAUSALABS_EVAL_HPP

#include <Eigen/Dense>
#include <vector>

#include "causalabs/setcalc.hpp"
#include "causalabs/vertex_set.hpp"

namespace causalabs {

/// Recovers the non-descendant family from paired latents by reading the
/// zero pattern of z - z~ per row. Exact replay makes true zeros exact, so
/// a tight tolerance separates them from almost-surely-nonzero differences.
/// Patterns below the frequency floor max(10, 0.5 * rows / #patterns) are
/// dropped as floating-point coincidences.
///
/// Valid only in ground-truth latent coordinates; applying it to mixed
/// observations without unmixing reads the wrong coordinates.
SetFamily delta_support_oracle(const Eigen::MatrixXd& z,
                               const Eigen::MatrixXd& z_tilde, double tol);

/// Fraction of squared Frobenius mass inside the partition's diagonal
/// blocks, with the identity row/column assignment.
struct BlockScore {
  double score = 0.0;
  std::vector<double> block_mass;
  double total_mass = 0.0;
};

BlockScore block_score(const Eigen::MatrixXd& m, const Partition& partition);

/// Assigns learned coordinates (rows of m) to ground-truth blocks (column
/// groups) to maximize in-block squared mass, with assigned group sizes
/// equal to block sizes. Exhaustive for n <= 8, greedy by largest |m|
/// entries beyond that.
struct MatchResult {
  std::vector<VertexSet> learned_groups;  // aligned with partition blocks
  double score = 0.0;
};

MatchResult match_blocks(const Eigen::MatrixXd& m, const Partition& partition);

/// True iff some row of m is (+-1)-aligned with the given column: absolute
/// entry >= 1 - tol there and <= tol everywhere else. Sign-insensitive.
bool pi_coordinate_check(const Eigen::MatrixXd& m, const VertexSet& block,
                         Node pi_coord, double tol);

}  // namespace causalabs

#endif  // CAUSALABS_EVAL_HPP
