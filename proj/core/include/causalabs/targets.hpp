#ifndef CAUSALABS_TARGETS_HPP
#define CAUSALABS_TARGETS_HPP

#include <vector>

#include "causalabs/vertex_set.hpp"

namespace causalabs {

/// Family of intervention targets with optional probability weights.
/// Targets are deduplicated into canonical order; duplicate entries merge
/// their weights. Weights, when present, must be strictly positive and sum
/// to 1 within 1e-9.
class TargetFamily {
 public:
  explicit TargetFamily(std::vector<VertexSet> targets);
  TargetFamily(std::vector<VertexSet> targets, std::vector<double> weights);

  const std::vector<VertexSet>& targets() const { return targets_; }
  bool has_weights() const { return !weights_.empty(); }
  const std::vector<double>& weights() const { return weights_; }
  /// Stored weights, or uniform when none were given.
  std::vector<double> resolved_weights() const;

  std::size_t size() const { return targets_.size(); }

 private:
  std::vector<VertexSet> targets_;
  std::vector<double> weights_;
};

}  // namespace causalabs

#endif  // CAUSALABS_TARGETS_HPP
