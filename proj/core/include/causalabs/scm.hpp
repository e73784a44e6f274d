#ifndef CAUSALABS_SCM_HPP
#define CAUSALABS_SCM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "causalabs/graph.hpp"
#include "causalabs/targets.hpp"

namespace causalabs {

/// Linear Gaussian SCM: z_i = sum_{j in Pa(i)} A(i,j) z_j + eps_i with
/// standard normal exogenous noise. A is indexed 0-based; A(i,j) may be
/// nonzero only if (j+1, i+1) is an edge of the dag.
class LinearGaussianScm {
 public:
  LinearGaussianScm(Dag dag, Eigen::MatrixXd coefficients);

  const Dag& dag() const { return dag_; }
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }
  int node_count() const { return dag_.node_count(); }

 private:
  Dag dag_;
  Eigen::MatrixXd coefficients_;
};

/// Random intervention mechanism: a target S is drawn from the family's
/// weights, incoming mechanisms of S are severed, and each intervened node
/// is set to fresh standard normal noise.
class InterventionModel {
 public:
  explicit InterventionModel(TargetFamily targets);

  const TargetFamily& targets() const { return targets_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  TargetFamily targets_;
  std::vector<double> weights_;  // resolved (uniform if unspecified)
};

/// Rotation mixing x = Q z.
class MixingModel {
 public:
  explicit MixingModel(Eigen::MatrixXd rotation);

  const Eigen::MatrixXd& rotation() const { return rotation_; }
  int dimension() const { return static_cast<int>(rotation_.rows()); }

 private:
  Eigen::MatrixXd rotation_;
};

/// Paired observations (x, x~) plus the sidecar ground truth used only by
/// evaluation. Per-row intervention labels are retained only on request.
struct CounterfactualDataset {
  Eigen::MatrixXd x;        // rows x n
  Eigen::MatrixXd x_tilde;  // rows x n
  std::vector<int> labels;  // index into targets(); empty unless kept

  std::uint64_t seed = 0;
  Eigen::MatrixXd coefficients;  // ground-truth A
  Eigen::MatrixXd rotation;      // ground-truth Q
  std::vector<VertexSet> targets;
  std::vector<double> weights;
  std::vector<Edge> edges;
  int nodes = 0;

  std::int64_t rows() const { return x.rows(); }
};

/// Coefficients drawn i.i.d. from the two-component Gaussian mixture with
/// means +-1, standard deviation 0.25 and equal weights.
LinearGaussianScm sample_scm(const Dag& dag, std::uint64_t seed);

/// (I - A)^-1 (I - A)^-T; symmetric positive definite for a valid SCM.
Eigen::MatrixXd latent_covariance(const LinearGaussianScm& scm);

/// Haar-uniform rotation: QR of a Gaussian matrix with the positive-diagonal
/// sign convention, determinant fixed to +1 by negating the last column.
MixingModel sample_rotation(int n, std::uint64_t seed);

/// One counterfactual pair in observation coordinates. Pure function of
/// (seed, row), which is the parallel-generation contract.
struct PairRow {
  Eigen::VectorXd x;
  Eigen::VectorXd x_tilde;
  int iota_index = -1;
};
PairRow sample_pair_row(const LinearGaussianScm& scm,
                        const InterventionModel& interventions,
                        const MixingModel& mixing, std::uint64_t seed,
                        std::int64_t row);

CounterfactualDataset sample_pairs(const LinearGaussianScm& scm,
                                   const InterventionModel& interventions,
                                   const MixingModel& mixing,
                                   std::int64_t count, std::uint64_t seed,
                                   bool keep_labels);

}  // namespace causalabs

#endif  // CAUSALABS_SCM_HPP
