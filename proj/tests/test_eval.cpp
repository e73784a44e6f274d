#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "causalabs/abstraction.hpp"
#include "causalabs/errors.hpp"
#include "causalabs/eval.hpp"
#include "causalabs/rng.hpp"
#include "causalabs/scm.hpp"
#include "causalabs/setcalc.hpp"
#include "support/oracles.hpp"

using namespace causalabs;
namespace oracle = causalabs::testing;

namespace {
Dag reference_graph() {
  return validate_dag(5, {{1, 3}, {2, 3}, {3, 4}, {3, 5}});
}
const TargetFamily kReferenceTargets{
    {VertexSet{3}, VertexSet{3, 4}, VertexSet{4, 5}}};

CounterfactualDataset latent_pairs(const Dag& g, const TargetFamily& targets,
                                   std::uint64_t seed, std::int64_t rows) {
  const LinearGaussianScm scm = sample_scm(g, seed);
  const InterventionModel interventions{targets};
  const MixingModel identity{
      Eigen::MatrixXd::Identity(g.node_count(), g.node_count())};
  return sample_pairs(scm, interventions, identity, rows, seed, false);
}
}  // namespace

TEST_CASE("delta_support_oracle recovers the reference nd family") {
  const Dag g = reference_graph();
  const CounterfactualDataset data = latent_pairs(g, kReferenceTargets, 81, 10000);
  const SetFamily recovered =
      delta_support_oracle(data.x, data.x_tilde, 1e-9);
  CHECK(recovered.sets == nd_family(g, kReferenceTargets.targets()));
}

TEST_CASE("delta_support_oracle: everything intervened yields the empty set") {
  const Dag g = reference_graph();
  const TargetFamily all{{VertexSet{1, 2, 3, 4, 5}}};
  const CounterfactualDataset data = latent_pairs(g, all, 82, 2000);
  const SetFamily recovered = delta_support_oracle(data.x, data.x_tilde, 1e-9);
  CHECK(recovered.sets == std::vector<VertexSet>{VertexSet{}});
}

TEST_CASE("delta_support_oracle: chain with atomic targets") {
  const Dag chain = validate_dag(3, {{1, 2}, {2, 3}});
  const TargetFamily atomic{{VertexSet{1}, VertexSet{2}, VertexSet{3}}};
  const CounterfactualDataset data = latent_pairs(chain, atomic, 83, 9000);
  const SetFamily recovered = delta_support_oracle(data.x, data.x_tilde, 1e-9);
  CHECK(recovered.sets ==
        std::vector<VertexSet>{VertexSet{}, VertexSet{1}, VertexSet{1, 2}});
}

TEST_CASE("delta_support_oracle feeds sigma_atoms consistently") {
  const Dag g = reference_graph();
  const CounterfactualDataset data = latent_pairs(g, kReferenceTargets, 84, 8000);
  const SetFamily recovered = delta_support_oracle(data.x, data.x_tilde, 1e-9);
  const AbstractionReport report =
      identifiable_abstraction(g, kReferenceTargets);
  CHECK(sigma_atoms(recovered) == report.partition);
}

TEST_CASE("delta_support_oracle rejects empty input") {
  Eigen::MatrixXd empty(0, 3);
  CHECK_THROWS_AS(delta_support_oracle(empty, empty, 1e-9), EmptyInput);
}

TEST_CASE("block_score: identity and in-block permutations score 1") {
  const Partition p(5, {VertexSet{1, 2}, VertexSet{3, 4}, VertexSet{5}});
  CHECK(block_score(Eigen::MatrixXd::Identity(5, 5), p).score ==
        doctest::Approx(1.0));

  Eigen::MatrixXd swap = Eigen::MatrixXd::Identity(5, 5);
  swap(0, 0) = 0;
  swap(0, 1) = 1;
  swap(1, 1) = 0;
  swap(1, 0) = 1;  // swap inside block {1,2}
  CHECK(block_score(swap, p).score == doctest::Approx(1.0));
}

TEST_CASE("block_score: a 45-degree cross-block rotation leaks 0.2") {
  const Partition p(5, {VertexSet{1, 2}, VertexSet{3, 4}, VertexSet{5}});
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(5, 5);
  const double c = std::sqrt(0.5);
  // rotate coordinates 2 and 3 into each other (blocks {1,2} and {3,4})
  m(1, 1) = c;
  m(1, 2) = -c;
  m(2, 1) = c;
  m(2, 2) = c;
  const BlockScore score = block_score(m, p);
  CHECK(score.total_mass == doctest::Approx(5.0));
  CHECK(score.score == doctest::Approx(0.8));
}

TEST_CASE("block_score: invariant under within-block orthogonal factors") {
  RngStream rng(85, 0, 0);
  const Partition p(5, {VertexSet{1, 2}, VertexSet{3, 4}, VertexSet{5}});
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd m(5, 5);
    for (int i = 0; i < 25; ++i) m(i / 5, i % 5) = rng.next_normal();

    // block-diagonal orthogonal factors on both sides
    Eigen::MatrixXd left = Eigen::MatrixXd::Zero(5, 5);
    Eigen::MatrixXd right = Eigen::MatrixXd::Zero(5, 5);
    for (const VertexSet& block : p.blocks()) {
      const int k = static_cast<int>(block.size());
      Eigen::MatrixXd gaussian(k, k);
      for (int i = 0; i < k * k; ++i) gaussian(i / k, i % k) = rng.next_normal();
      const Eigen::MatrixXd q =
          Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian).householderQ();
      Eigen::MatrixXd gaussian2(k, k);
      for (int i = 0; i < k * k; ++i) gaussian2(i / k, i % k) = rng.next_normal();
      const Eigen::MatrixXd q2 =
          Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian2).householderQ();
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          left(block.nodes()[a] - 1, block.nodes()[b] - 1) = q(a, b);
          right(block.nodes()[a] - 1, block.nodes()[b] - 1) = q2(a, b);
        }
      }
    }
    const double before = block_score(m, p).score;
    const double after = block_score(left * m * right, p).score;
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
  }
}

TEST_CASE("block_score: 1 iff off-block mass vanishes") {
  const Partition p(4, {VertexSet{1, 2}, VertexSet{3, 4}});
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(4, 4);
  CHECK(block_score(m, p).score == doctest::Approx(1.0).epsilon(1e-12));
  m(0, 2) = 1e-5;
  CHECK(block_score(m, p).score < 1.0);
  CHECK_THROWS_AS(block_score(Eigen::MatrixXd::Identity(3, 3), p),
                  DimensionMismatch);
}

TEST_CASE("match_blocks: identity and block-swapping permutations") {
  const Partition p(4, {VertexSet{1, 2}, VertexSet{3, 4}});
  CHECK(match_blocks(Eigen::MatrixXd::Identity(4, 4), p).score ==
        doctest::Approx(1.0));

  // global permutation exchanging blocks {1,2} <-> {3,4}
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(0, 2) = 1;
  m(1, 3) = 1;
  m(2, 0) = 1;
  m(3, 1) = 1;
  const MatchResult match = match_blocks(m, p);
  CHECK(match.score == doctest::Approx(1.0));
  CHECK(match.learned_groups[0] == VertexSet{3, 4});
  CHECK(match.learned_groups[1] == VertexSet{1, 2});
}

TEST_CASE("match_blocks never scores below the identity assignment") {
  RngStream rng(86, 0, 0);
  const Partition p(5, {VertexSet{1, 2}, VertexSet{3, 4}, VertexSet{5}});
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd m(5, 5);
    for (int i = 0; i < 25; ++i) m(i / 5, i % 5) = rng.next_normal();
    CHECK(match_blocks(m, p).score >= block_score(m, p).score - 1e-12);
  }
}

TEST_CASE("match_blocks: Haar rotations average near the mass heuristic") {
  // For Haar M the expected unmatched in-block mass is sum |B|^2 / n^2.
  const Partition p(5, {VertexSet{1, 2}, VertexSet{3, 4}, VertexSet{5}});
  double unmatched_sum = 0.0;
  const int draws = 1000;
  for (int s = 0; s < draws; ++s) {
    const Eigen::MatrixXd q = sample_rotation(5, 90000 + s).rotation();
    unmatched_sum += block_score(q, p).score;
  }
  CHECK(unmatched_sum / draws == doctest::Approx(0.36).epsilon(0.14));
  // matched score exists and is reported
  const Eigen::MatrixXd q = sample_rotation(5, 987).rotation();
  CHECK(match_blocks(q, p).score >= block_score(q, p).score);
}

TEST_CASE("match_blocks greedy fallback handles n > 8") {
  const Partition p = Partition::singletons(9);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(9, 9);
  const MatchResult match = match_blocks(m, p);
  CHECK(match.score == doctest::Approx(1.0));
}

TEST_CASE("pi_coordinate_check: alignment, rotation, reflection") {
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(5, 5);
  CHECK(pi_coordinate_check(identity, VertexSet{3}, 3, 1e-6));

  // 45-degree rotation inside block {3,4}: no single axis aligns with 3.
  Eigen::MatrixXd rotated = identity;
  const double c = std::sqrt(0.5);
  rotated(2, 2) = c;
  rotated(2, 3) = -c;
  rotated(3, 2) = c;
  rotated(3, 3) = c;
  CHECK(!pi_coordinate_check(rotated, VertexSet{3, 4}, 3, 0.1));

  Eigen::MatrixXd reflected = identity;
  reflected(2, 2) = -1.0;
  CHECK(pi_coordinate_check(reflected, VertexSet{3}, 3, 1e-6));

  CHECK_THROWS_AS(pi_coordinate_check(identity, VertexSet{3}, 4, 0.1),
                  RangeError);
  CHECK_THROWS_AS(pi_coordinate_check(identity, VertexSet{3}, 6, 0.1),
                  RangeError);
}
