#include "causalabs/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "causalabs/errors.hpp"

namespace causalabs {

namespace {

std::vector<VertexSet> dedupe_merge(std::vector<VertexSet> targets,
                                    std::vector<double>* weights) {
  if (targets.empty()) throw EmptyTarget("target family is empty");
  for (const VertexSet& t : targets) {
    if (t.empty()) throw EmptyTarget("intervention target is empty");
  }
  std::vector<std::size_t> order(targets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return targets[a] < targets[b];
  });
  std::vector<VertexSet> out;
  std::vector<double> out_weights;
  for (std::size_t idx : order) {
    if (!out.empty() && out.back() == targets[idx]) {
      if (weights) out_weights.back() += (*weights)[idx];
    } else {
      out.push_back(targets[idx]);
      if (weights) out_weights.push_back((*weights)[idx]);
    }
  }
  if (weights) *weights = std::move(out_weights);
  return out;
}

}  // namespace

TargetFamily::TargetFamily(std::vector<VertexSet> targets)
    : targets_(dedupe_merge(std::move(targets), nullptr)) {}

TargetFamily::TargetFamily(std::vector<VertexSet> targets,
                           std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.size() != targets.size()) {
    throw ConfigError("one weight per target required");
  }
  targets_ = dedupe_merge(std::move(targets), &weights_);
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) throw ConfigError("weights must be strictly positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("weights must sum to 1 within 1e-9");
  }
}

std::vector<double> TargetFamily::resolved_weights() const {
  if (!weights_.empty()) return weights_;
  return std::vector<double>(targets_.size(), 1.0 / targets_.size());
}

}  // namespace causalabs
