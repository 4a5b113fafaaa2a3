#pragma once

#include <vector>

#include "dra/core.hpp"
#include "dra/policy.hpp"

namespace dra {

// Clipped-surrogate settings. epsilon is the clip radius and must lie in
// (0, 1). mode selects the normalization convention: Grpo divides rewards
// by the group std and token sums by trajectory length, DrGrpo drops both.
// std_floor is the degenerate-group cutoff for group_advantages.
struct ClipConfig {
    double epsilon = 0.2;
    AdvantageMode mode = AdvantageMode::Grpo;
    double std_floor = 1e-8;
};

// Group-relative advantages. Grpo: (R_i - mean)/std with the population
// std; a std below std_floor yields all-zero advantages rather than a
// blow-up. DrGrpo: R_i - mean.
AdvantageVector group_advantages(const std::vector<double>& rewards, AdvantageMode mode,
                                 double std_floor = 1e-8);

// One token's pessimistic surrogate term:
// min(ratio*A, clamp(ratio, 1-eps, 1+eps)*A).
double clipped_surrogate(double ratio, double advantage, const ClipConfig& config);

// Average surrogate over a batch of trajectories with per-trajectory
// advantages, ratios taken against the policy's recorded snapshot.
// Grpo mode averages each trajectory's token terms; DrGrpo sums them.
double surrogate_value(const ToyPolicy& policy,
                       const std::vector<std::vector<int>>& trajectories,
                       const std::vector<double>& advantages, const ClipConfig& config);

// One ascent step on the surrogate with the exact analytic gradient of the
// tabular policy. Throws StaleSnapshot if any trajectory is missing from
// the snapshot. The returned policy has a cleared snapshot, forcing a fresh
// sampling round before the next step.
ToyPolicy policy_gradient_step(const ToyPolicy& policy,
                               const std::vector<std::vector<int>>& trajectories,
                               const std::vector<double>& advantages, const ClipConfig& config,
                               double learning_rate);

}  // namespace dra
