#include "causalabs/scm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "causalabs/errors.hpp"
#include "causalabs/rng.hpp"

namespace causalabs {

LinearGaussianScm::LinearGaussianScm(Dag dag, Eigen::MatrixXd coefficients)
    : dag_(std::move(dag)), coefficients_(std::move(coefficients)) {
  const int n = dag_.node_count();
  if (coefficients_.rows() != n || coefficients_.cols() != n) {
    throw DimensionMismatch("coefficient matrix must be n x n");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (coefficients_(i, j) != 0.0 && !dag_.has_edge(j + 1, i + 1)) {
        throw RangeError("coefficient outside the dag's edge support");
      }
    }
  }
}

InterventionModel::InterventionModel(TargetFamily targets)
    : targets_(std::move(targets)), weights_(targets_.resolved_weights()) {}

MixingModel::MixingModel(Eigen::MatrixXd rotation)
    : rotation_(std::move(rotation)) {
  const auto n = rotation_.rows();
  if (rotation_.cols() != n || n < 1) {
    throw DimensionMismatch("rotation must be square");
  }
  const double orth =
      (rotation_.transpose() * rotation_ - Eigen::MatrixXd::Identity(n, n))
          .cwiseAbs()
          .maxCoeff();
  if (orth > 1e-10) throw RangeError("matrix is not orthogonal within 1e-10");
  if (std::abs(rotation_.determinant() - 1.0) > 1e-10) {
    throw RangeError("determinant is not +1 within 1e-10");
  }
}

LinearGaussianScm sample_scm(const Dag& dag, std::uint64_t seed) {
  const int n = dag.node_count();
  Eigen::MatrixXd coefficients = Eigen::MatrixXd::Zero(n, n);
  RngStream rng(seed, 0, stream_id::kScmCoefficients);
  // Edges in canonical sorted order so draws are reproducible.
  for (const auto& [j, i] : dag.edges()) {
    const double mean = rng.next_uniform() < 0.5 ? 1.0 : -1.0;
    coefficients(i - 1, j - 1) = mean + 0.25 * rng.next_normal();
  }
  return LinearGaussianScm(dag, std::move(coefficients));
}

Eigen::MatrixXd latent_covariance(const LinearGaussianScm& scm) {
  const int n = scm.node_count();
  const Eigen::MatrixXd b =
      Eigen::MatrixXd::Identity(n, n) - scm.coefficients();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
  if (std::abs(lu.determinant()) < 1e-12) {
    throw SingularMatrix("I - A is singular");
  }
  const Eigen::MatrixXd inv = lu.inverse();
  return inv * inv.transpose();
}

MixingModel sample_rotation(int n, std::uint64_t seed) {
  if (n < 1) throw RangeError("dimension must be >= 1");
  RngStream rng(seed, 0, stream_id::kRotation);
  Eigen::MatrixXd gaussian(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) gaussian(i, j) = rng.next_normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  if (q.determinant() < 0.0) q.col(n - 1) = -q.col(n - 1);
  return MixingModel(std::move(q));
}

namespace {

int pick_target(const std::vector<double>& weights, double u) {
  double cumulative = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    cumulative += weights[k];
    if (u < cumulative) return static_cast<int>(k);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

PairRow sample_pair_row(const LinearGaussianScm& scm,
                        const InterventionModel& interventions,
                        const MixingModel& mixing, std::uint64_t seed,
                        std::int64_t row) {
  const int n = scm.node_count();
  if (mixing.dimension() != n) {
    throw DimensionMismatch("mixing dimension differs from the SCM");
  }
  const Eigen::MatrixXd& a = scm.coefficients();
  const auto& topo = scm.dag().topological_order();

  Eigen::VectorXd eps(n);
  {
    RngStream rng(seed, static_cast<std::uint64_t>(row), stream_id::kNoise);
    for (int i = 0; i < n; ++i) eps(i) = rng.next_normal();
  }
  const int iota = [&] {
    RngStream rng(seed, static_cast<std::uint64_t>(row),
                  stream_id::kInterventionChoice);
    return pick_target(interventions.weights(), rng.next_uniform());
  }();
  Eigen::VectorXd eps_tilde(n);
  {
    RngStream rng(seed, static_cast<std::uint64_t>(row),
                  stream_id::kInterventionNoise);
    for (int i = 0; i < n; ++i) eps_tilde(i) = rng.next_normal();
  }

  const VertexSet& target = interventions.targets().targets()[iota];

  // Ancestral sampling in topological order; identical arithmetic for z and
  // z~ outside the intervened descendants makes Eq.-(15)-style invariance
  // hold bit-exactly (the exogenous noise of non-intervened nodes is reused).
  Eigen::VectorXd z(n), z_tilde(n);
  for (Node node : topo) {
    const int i = node - 1;
    double acc = eps(i);
    for (int j = 0; j < n; ++j) {
      if (a(i, j) != 0.0) acc += a(i, j) * z(j);
    }
    z(i) = acc;
  }
  for (Node node : topo) {
    const int i = node - 1;
    if (target.contains(node)) {
      z_tilde(i) = eps_tilde(i);
      continue;
    }
    double acc = eps(i);
    for (int j = 0; j < n; ++j) {
      if (a(i, j) != 0.0) acc += a(i, j) * z_tilde(j);
    }
    z_tilde(i) = acc;
  }

  PairRow out;
  out.x = mixing.rotation() * z;
  out.x_tilde = mixing.rotation() * z_tilde;
  out.iota_index = iota;
  return out;
}

CounterfactualDataset sample_pairs(const LinearGaussianScm& scm,
                                   const InterventionModel& interventions,
                                   const MixingModel& mixing,
                                   std::int64_t count, std::uint64_t seed,
                                   bool keep_labels) {
  if (count < 1) throw EmptyDataset("sample count must be >= 1");
  const int n = scm.node_count();
  CounterfactualDataset data;
  data.x.resize(count, n);
  data.x_tilde.resize(count, n);
  if (keep_labels) data.labels.resize(count);
  for (std::int64_t r = 0; r < count; ++r) {
    PairRow row = sample_pair_row(scm, interventions, mixing, seed, r);
    data.x.row(r) = row.x.transpose();
    data.x_tilde.row(r) = row.x_tilde.transpose();
    if (keep_labels) data.labels[static_cast<std::size_t>(r)] = row.iota_index;
  }
  data.seed = seed;
  data.coefficients = scm.coefficients();
  data.rotation = mixing.rotation();
  data.targets = interventions.targets().targets();
  data.weights = interventions.weights();
  data.edges = scm.dag().edges();
  data.nodes = n;
  return data;
}

}  // namespace causalabs
