#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "causalabs/errors.hpp"
#include "causalabs/graph.hpp"
#include "causalabs/rng.hpp"
#include "causalabs/scm.hpp"
#include "support/oracles.hpp"

using namespace causalabs;
namespace oracle = causalabs::testing;

namespace {
Dag reference_graph() {
  return validate_dag(5, {{1, 3}, {2, 3}, {3, 4}, {3, 5}});
}
const TargetFamily kReferenceTargets{
    {VertexSet{3}, VertexSet{3, 4}, VertexSet{4, 5}}};

MixingModel identity_mixing(int n) {
  return MixingModel(Eigen::MatrixXd::Identity(n, n));
}
}  // namespace

TEST_CASE("sample_scm: edgeless graph has zero coefficients") {
  const LinearGaussianScm scm = sample_scm(Dag(3, {}), 9);
  CHECK(scm.coefficients().isZero(0.0));
}

TEST_CASE("sample_scm: coefficient mixture statistics") {
  const Dag two = validate_dag(2, {{1, 2}});
  const int draws = 10000;
  int within_band = 0;
  double abs_sum = 0.0;
  for (int s = 0; s < draws; ++s) {
    const double a = sample_scm(two, 1000 + s).coefficients()(1, 0);
    abs_sum += std::abs(a);
    if (std::abs(std::abs(a) - 1.0) <= 4 * 0.25) ++within_band;
  }
  // +-4 sigma band around the mixture means
  CHECK(within_band >= static_cast<int>(0.999 * draws));
  // E|a| against the quadrature oracle (~1.000004)
  const double expected = oracle::folded_mixture_mean_by_quadrature();
  CHECK(std::abs(expected - 1.0) < 1e-3);
  CHECK(std::abs(abs_sum / draws - expected) < 0.02);
}

TEST_CASE("sample_scm: support respects the dag exactly") {
  RngStream rng(51, 0, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_uniform() * 6);
    const Dag g = oracle::random_dag(n, 0.4, rng);
    const LinearGaussianScm scm = sample_scm(g, rng.next_u64());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (scm.coefficients()(i, j) != 0.0) {
          CHECK(g.has_edge(j + 1, i + 1));
        }
      }
    }
    // nonzero on every edge (mixture draws are never exactly zero)
    for (const auto& [u, v] : g.edges()) {
      CHECK(scm.coefficients()(v - 1, u - 1) != 0.0);
    }
  }
}

TEST_CASE("latent_covariance closed forms") {
  CHECK(latent_covariance(LinearGaussianScm(Dag(2, {}), Eigen::MatrixXd::Zero(2, 2)))
            .isApprox(Eigen::MatrixXd::Identity(2, 2)));

  const Dag two = validate_dag(2, {{1, 2}});
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(1, 0) = 1.0;
  Eigen::MatrixXd expected(2, 2);
  expected << 1, 1, 1, 2;
  CHECK(latent_covariance(LinearGaussianScm(two, a)).isApprox(expected, 1e-14));
}

TEST_CASE("latent_covariance is positive definite for random SCMs") {
  RngStream rng(52, 0, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_uniform() * 6);
    const Dag g = oracle::random_dag(n, 0.5, rng);
    const Eigen::MatrixXd sigma =
        latent_covariance(sample_scm(g, rng.next_u64()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("sample_rotation: SO(1) is trivial") {
  CHECK(sample_rotation(1, 123).rotation()(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("sample_rotation: orthogonal with determinant +1") {
  RngStream rng(53, 0, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_uniform() * 8);
    const Eigen::MatrixXd q = sample_rotation(n, rng.next_u64()).rotation();
    const double orth =
        (q.transpose() * q - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    CHECK(orth < 1e-10);
    CHECK(q.determinant() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("sample_rotation: SO(2) angles are Haar-uniform") {
  std::vector<double> angles;
  angles.reserve(10000);
  for (int s = 0; s < 10000; ++s) {
    const Eigen::MatrixXd q = sample_rotation(2, 40000 + s).rotation();
    double angle = std::atan2(q(1, 0), q(0, 0));
    if (angle < 0) angle += 2.0 * M_PI;
    angles.push_back(angle);
  }
  CHECK(oracle::ks_uniform_statistic(std::move(angles), 2.0 * M_PI) < 0.02);
}

TEST_CASE("sample_pairs: invariance of non-descendants is bit-exact") {
  const Dag g = reference_graph();
  const LinearGaussianScm scm = sample_scm(g, 17);
  const InterventionModel interventions{kReferenceTargets};
  const CounterfactualDataset data =
      sample_pairs(scm, interventions, identity_mixing(5), 2000, 17, true);

  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    const VertexSet& target = kReferenceTargets.targets()[data.labels[r]];
    const VertexSet nd = non_descendants(g, target);
    for (Node i : nd) {
      CHECK(data.x(r, i - 1) == data.x_tilde(r, i - 1));  // exact replay
    }
  }
}

TEST_CASE("sample_pairs: differences outside nd are almost surely nonzero") {
  const Dag g = reference_graph();
  const LinearGaussianScm scm = sample_scm(g, 18);
  const InterventionModel interventions{kReferenceTargets};
  const CounterfactualDataset data =
      sample_pairs(scm, interventions, identity_mixing(5), 10000, 18, true);

  const int n = 5;
  std::vector<std::vector<std::int64_t>> mask_counts(
      kReferenceTargets.size(), std::vector<std::int64_t>(1 << n, 0));
  std::vector<std::int64_t> rows_per_target(kReferenceTargets.size(), 0);
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    int mask = 0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(data.x(r, i) - data.x_tilde(r, i)) > 1e-9) mask |= 1 << i;
    }
    ++mask_counts[data.labels[r]][mask];
    ++rows_per_target[data.labels[r]];
  }
  for (std::size_t t = 0; t < kReferenceTargets.size(); ++t) {
    const std::uint64_t nd_mask =
        non_descendants(g, kReferenceTargets.targets()[t]).bitmask();
    for (std::uint64_t subset = 1; subset < (1u << n); ++subset) {
      if ((subset & ~nd_mask) == 0) continue;  // T inside nd(S)
      std::int64_t hits = 0;
      for (int mask = 0; mask < (1 << n); ++mask) {
        if ((static_cast<std::uint64_t>(mask) & subset) != 0) {
          hits += mask_counts[t][mask];
        }
      }
      CHECK(static_cast<double>(hits) >
            0.5 * static_cast<double>(rows_per_target[t]));
    }
  }
}

TEST_CASE("sample_pairs: fresh-noise intervention decorrelates a free node") {
  const Dag one(1, {});
  const LinearGaussianScm scm(one, Eigen::MatrixXd::Zero(1, 1));
  const InterventionModel interventions{TargetFamily{{VertexSet{1}}}};
  const CounterfactualDataset data =
      sample_pairs(scm, interventions, identity_mixing(1), 10000, 4, false);
  CHECK(std::abs(oracle::pearson_correlation(data.x.col(0), data.x_tilde.col(0))) <
        0.03);
  CHECK(std::abs(data.x.col(0).mean()) < 0.05);
  CHECK(std::abs(data.x.col(0).squaredNorm() / data.rows() - 1.0) < 0.05);
}

TEST_CASE("sample_pairs: empirical covariance matches latent_covariance") {
  const Dag g = reference_graph();
  const LinearGaussianScm scm = sample_scm(g, 19);
  const InterventionModel interventions{kReferenceTargets};
  const CounterfactualDataset data =
      sample_pairs(scm, interventions, identity_mixing(5), 100000, 19, false);
  const Eigen::MatrixXd sigma = latent_covariance(scm);
  const Eigen::MatrixXd sample_sigma = oracle::empirical_covariance(data.x);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double se = std::sqrt(
          (sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) /
          static_cast<double>(data.rows()));
      CHECK(std::abs(sample_sigma(i, j) - sigma(i, j)) <= 5.0 * se);
    }
  }
}

TEST_CASE("sample_pairs: intervened block is independent of pre-latents") {
  // Across rows sharing nd(iota) = N, z~ restricted to pi(N) decorrelates
  // from every coordinate of z.
  const Dag g = reference_graph();
  const LinearGaussianScm scm = sample_scm(g, 20);
  const InterventionModel interventions{kReferenceTargets};
  const CounterfactualDataset data =
      sample_pairs(scm, interventions, identity_mixing(5), 10000, 20, true);

  const auto pis = pi_sets(g, kReferenceTargets);
  for (const auto& entry : pis) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
      const VertexSet& target = kReferenceTargets.targets()[data.labels[r]];
      if (non_descendants(g, target) == entry.nd) rows.push_back(r);
    }
    REQUIRE(rows.size() > 1000);
    for (Node p : entry.pi) {
      Eigen::VectorXd zt_p(rows.size());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        zt_p(static_cast<Eigen::Index>(k)) = data.x_tilde(rows[k], p - 1);
      }
      for (int j = 0; j < 5; ++j) {
        Eigen::VectorXd z_j(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
          z_j(static_cast<Eigen::Index>(k)) = data.x(rows[k], j);
        }
        CHECK(std::abs(oracle::pearson_correlation(zt_p, z_j)) < 0.05);
      }
    }
  }
}

TEST_CASE("sample_pairs: deterministic and chunk-independent") {
  const Dag g = reference_graph();
  const LinearGaussianScm scm = sample_scm(g, 21);
  const MixingModel mixing = sample_rotation(5, 21);
  const InterventionModel interventions{kReferenceTargets};

  const CounterfactualDataset a =
      sample_pairs(scm, interventions, mixing, 500, 21, true);
  const CounterfactualDataset b =
      sample_pairs(scm, interventions, mixing, 500, 21, true);
  CHECK((a.x.array() == b.x.array()).all());
  CHECK((a.x_tilde.array() == b.x_tilde.array()).all());
  CHECK(a.labels == b.labels);

  // Row-keyed streams: each row is reproducible in isolation, so chunked or
  // parallel generation yields the identical dataset.
  for (Eigen::Index r = 0; r < 500; r += 97) {
    const PairRow row = sample_pair_row(scm, interventions, mixing, 21, r);
    CHECK((row.x.transpose().array() == a.x.row(r).array()).all());
    CHECK((row.x_tilde.transpose().array() == a.x_tilde.row(r).array()).all());
    CHECK(row.iota_index == a.labels[r]);
  }

  // Different seed, different data.
  const CounterfactualDataset c =
      sample_pairs(scm, interventions, mixing, 500, 22, true);
  CHECK(!(a.x.array() == c.x.array()).all());
}

TEST_CASE("sample_pairs: labels retained only on request") {
  const Dag g = reference_graph();
  const LinearGaussianScm scm = sample_scm(g, 23);
  const InterventionModel interventions{kReferenceTargets};
  const MixingModel mixing = sample_rotation(5, 23);
  CHECK(sample_pairs(scm, interventions, mixing, 10, 23, false).labels.empty());
  CHECK(sample_pairs(scm, interventions, mixing, 10, 23, true).labels.size() == 10);
  CHECK_THROWS_AS(sample_pairs(scm, interventions, mixing, 0, 23, false),
                  EmptyDataset);
}

TEST_CASE("intervention weights: uniform default, validated custom") {
  const InterventionModel uniform{kReferenceTargets};
  CHECK(uniform.weights() ==
        std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});

  const TargetFamily weighted{{VertexSet{1}, VertexSet{2}}, {0.25, 0.75}};
  CHECK(InterventionModel{weighted}.weights() == std::vector<double>{0.25, 0.75});

  CHECK_THROWS_AS(TargetFamily({VertexSet{1}}, {0.5}), ConfigError);
  CHECK_THROWS_AS(TargetFamily({VertexSet{1}, VertexSet{2}}, {-0.5, 1.5}),
                  ConfigError);
  CHECK_THROWS_AS(TargetFamily{std::vector<VertexSet>{VertexSet{}}}, EmptyTarget);
}

TEST_CASE("mixing model validation") {
  Eigen::MatrixXd reflection = Eigen::MatrixXd::Identity(2, 2);
  reflection(1, 1) = -1.0;
  CHECK_THROWS_AS(MixingModel{reflection}, RangeError);
  Eigen::MatrixXd skewed(2, 2);
  skewed << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(MixingModel{skewed}, RangeError);
}

TEST_CASE("weighted intervention choice follows the weights") {
  const Dag one(1, {});
  const LinearGaussianScm scm(one, Eigen::MatrixXd::Zero(1, 1));
  // duplicate targets merge their weights
  const TargetFamily weighted{{VertexSet{1}, VertexSet{1}}, {0.5, 0.5}};
  CHECK(weighted.size() == 1);
  CHECK(weighted.weights() == std::vector<double>{1.0});
}
