#ifndef CAUSALABS_LEARN_HPP
#define CAUSALABS_LEARN_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "causalabs/scm.hpp"
#include "causalabs/vertex_set.hpp"

namespace causalabs {

/// Optimization variables: a skew-symmetric rotation parameter K (the
/// rotation is cayley(K)), an unconstrained candidate coefficient matrix,
/// and one logit per candidate intervention target.
struct FitParams {
  Eigen::MatrixXd skew;          // n x n, K = -K^T
  Eigen::MatrixXd coefficients;  // n x n, unconstrained support
  Eigen::VectorXd logits;        // one per candidate target
};

/// Gradients per parameter group. skew holds d/dk_uv in the (u,v) entry for
/// u < v (and its negation at (v,u)), so params.skew + eta * grad.skew stays
/// skew-symmetric.
struct FitGradient {
  Eigen::MatrixXd skew;
  Eigen::MatrixXd coefficients;
  Eigen::VectorXd logits;
};

struct FitConfig {
  /// Candidate intervention targets; empty means all nonempty subsets of
  /// 1..n (guarded at n <= 10).
  std::vector<VertexSet> candidates;
  int steps = 2000;  // total gradient steps, split evenly across stages
  double step_size = 0.1;
  int stages = 10;
  double slack_initial = 0.5;  // sigma schedule, geometric
  double slack_final = 0.01;
  double acyclicity_weight_final = 10.0;  // lambda schedule, linear from 0
  int restarts = 10;
  std::int64_t batch_size = 0;  // 0 = full batch
  std::uint64_t seed = 0;
  double convergence_tol = 1e-7;  // relative objective change per stage
};

struct FitResult {
  Eigen::MatrixXd rotation;        // learned Q, orthogonal with det +1
  Eigen::MatrixXd coefficients;    // learned A
  Eigen::VectorXd mixture_weights; // softmax of logits
  std::vector<VertexSet> candidates;
  std::vector<double> stage_objectives;  // best restart, one per stage
  double final_objective = 0.0;
  int best_restart = -1;
  std::vector<int> diverged_restarts;
  double wall_seconds = 0.0;
};

/// Cayley chart on SO(n): Q = (I - K)(I + K)^-1 for skew K.
Eigen::MatrixXd cayley(const Eigen::MatrixXd& skew);

/// trace(exp(A o A)) - n; zero iff the squared-entry graph is acyclic.
double acyclicity_penalty(const Eigen::MatrixXd& a);
Eigen::MatrixXd acyclicity_penalty_gradient(const Eigen::MatrixXd& a);

/// Mean over rows of the slack-relaxed mixture log-likelihood:
///   logsumexp_S [ log w_S + log N(eps; 0, I) + log|det(I-A)|
///                 + log N(z~_S; 0, I) + sum_{j not in S} log N(r_j; 0, s^2) ]
/// with z = Q^T x, z~ = Q^T x~, eps = (I-A) z, r = (I-A)(z~ - z). The slack
/// terms stand in for the exact constraint r_{S^c} = 0, which has no
/// Lebesgue density.
double relaxed_loglik(const FitParams& params,
                      const std::vector<VertexSet>& candidates,
                      const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_tilde,
                      double slack);

/// Value plus analytic gradients for all three parameter groups.
double relaxed_loglik_grad(const FitParams& params,
                           const std::vector<VertexSet>& candidates,
                           const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& x_tilde, double slack,
                           FitGradient* grad);

/// All nonempty subsets of 1..n in canonical order (n <= 10).
std::vector<VertexSet> default_candidate_family(int n);

/// Staged gradient ascent on relaxed_loglik - lambda * acyclicity_penalty
/// with annealed slack, halving backtracking, and independent restarts.
/// Labels are never consulted.
FitResult fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_tilde,
              const FitConfig& config);
FitResult fit(const CounterfactualDataset& dataset, const FitConfig& config);

}  // namespace causalabs

#endif  // CAUSALABS_LEARN_HPP
