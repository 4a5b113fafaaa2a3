#include "dra/advantage.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "dra/errors.hpp"

namespace dra {
namespace {

void check_clip(const ClipConfig& config) {
    if (!std::isfinite(config.epsilon) || config.epsilon <= 0.0 || config.epsilon >= 1.0) {
        throw ValidationError("clip epsilon must lie in (0, 1), got " +
                              std::to_string(config.epsilon));
    }
    if (!std::isfinite(config.std_floor) || config.std_floor < 0.0) {
        throw ValidationError("std_floor must be finite and >= 0");
    }
}

// Shared walk over a trajectory batch. Emits per-token (state, token,
// ratio, new-prob row) via the callback so value and gradient stay in sync.
template <typename PerToken>
void for_each_token(const ToyPolicy& policy, const std::vector<std::vector<int>>& trajectories,
                    const std::vector<double>& advantages, PerToken&& per_token) {
    if (trajectories.size() != advantages.size()) {
        throw LengthMismatch("batch of " + std::to_string(trajectories.size()) +
                             " trajectories carries " + std::to_string(advantages.size()) +
                             " advantages");
    }
    if (trajectories.empty()) {
        throw ValidationError("empty trajectory batch");
    }
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        const std::vector<int>& trajectory = trajectories[i];
        const std::vector<double>* old_probs = policy.snapshot_probs(trajectory);
        if (old_probs == nullptr) {
            throw StaleSnapshot("trajectory " + std::to_string(i) +
                                " has no old-policy probabilities; re-sample before stepping");
        }
        std::vector<int> prefix;
        prefix.reserve(trajectory.size());
        for (std::size_t t = 0; t < trajectory.size(); ++t) {
            const std::size_t state = policy.state_index(prefix);
            const std::vector<double> probs = policy.token_probs(state);
            const int token = trajectory[t];
            const double ratio = probs[static_cast<std::size_t>(token)] / (*old_probs)[t];
            per_token(i, state, token, ratio, probs, advantages[i]);
            prefix.push_back(token);
        }
    }
}

double token_scale(const ClipConfig& config, std::size_t group_size, std::size_t traj_len) {
    const double g = static_cast<double>(group_size);
    if (config.mode == AdvantageMode::Grpo) return 1.0 / (g * static_cast<double>(traj_len));
    return 1.0 / g;
}

}  // namespace

AdvantageVector group_advantages(const std::vector<double>& rewards, AdvantageMode mode,
                                 double std_floor) {
    if (rewards.size() < 2) {
        throw GroupTooSmall("advantages need at least 2 rewards, got " +
                            std::to_string(rewards.size()));
    }
    double mean = 0.0;
    for (double r : rewards) {
        if (!std::isfinite(r)) throw NonFiniteValue("non-finite reward in group");
        mean += r;
    }
    mean /= static_cast<double>(rewards.size());

    AdvantageVector out;
    out.mode = mode;
    out.values.resize(rewards.size());
    if (mode == AdvantageMode::DrGrpo) {
        for (std::size_t i = 0; i < rewards.size(); ++i) out.values[i] = rewards[i] - mean;
        return out;
    }
    double variance = 0.0;
    for (double r : rewards) variance += (r - mean) * (r - mean);
    variance /= static_cast<double>(rewards.size());
    const double std = std::sqrt(variance);
    if (std < std_floor) {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        return out;
    }
    for (std::size_t i = 0; i < rewards.size(); ++i) out.values[i] = (rewards[i] - mean) / std;
    return out;
}

double clipped_surrogate(double ratio, double advantage, const ClipConfig& config) {
    check_clip(config);
    if (!std::isfinite(ratio) || ratio <= 0.0) {
        throw NonPositiveRatio("importance ratio must be finite and positive, got " +
                               std::to_string(ratio));
    }
    const double clamped = std::clamp(ratio, 1.0 - config.epsilon, 1.0 + config.epsilon);
    return std::min(ratio * advantage, clamped * advantage);
}

double surrogate_value(const ToyPolicy& policy,
                       const std::vector<std::vector<int>>& trajectories,
                       const std::vector<double>& advantages, const ClipConfig& config) {
    check_clip(config);
    double total = 0.0;
    for_each_token(policy, trajectories, advantages,
                   [&](std::size_t i, std::size_t, int, double ratio,
                       const std::vector<double>&, double advantage) {
                       const double scale =
                           token_scale(config, trajectories.size(), trajectories[i].size());
                       total += scale * clipped_surrogate(ratio, advantage, config);
                   });
    return total;
}

ToyPolicy policy_gradient_step(const ToyPolicy& policy,
                               const std::vector<std::vector<int>>& trajectories,
                               const std::vector<double>& advantages, const ClipConfig& config,
                               double learning_rate) {
    check_clip(config);
    if (!std::isfinite(learning_rate)) {
        throw ValidationError("learning_rate must be finite");
    }
    std::vector<double> grad(policy.state_count() * static_cast<std::size_t>(policy.vocab_size()),
                             0.0);
    for_each_token(
        policy, trajectories, advantages,
        [&](std::size_t i, std::size_t state, int token, double ratio,
            const std::vector<double>& probs, double advantage) {
            if (!std::isfinite(ratio) || ratio <= 0.0) {
                throw NonPositiveRatio("importance ratio must be finite and positive");
            }
            if (advantage == 0.0) return;
            // The min is flat in the clipped region: above 1+eps for positive
            // advantages, below 1-eps for negative ones. Ties take the
            // unclipped branch.
            const bool active = advantage > 0.0 ? ratio <= 1.0 + config.epsilon
                                                : ratio >= 1.0 - config.epsilon;
            if (!active) return;
            const double coeff =
                token_scale(config, trajectories.size(), trajectories[i].size()) * advantage *
                ratio;
            const std::size_t base = state * static_cast<std::size_t>(policy.vocab_size());
            for (int k = 0; k < policy.vocab_size(); ++k) {
                const double indicator = (k == token) ? 1.0 : 0.0;
                grad[base + static_cast<std::size_t>(k)] +=
                    coeff * (indicator - probs[static_cast<std::size_t>(k)]);
            }
        });
    ToyPolicy updated = policy;
    for (std::size_t state = 0; state < policy.state_count(); ++state) {
        const std::size_t base = state * static_cast<std::size_t>(policy.vocab_size());
        for (int k = 0; k < policy.vocab_size(); ++k) {
            const double delta = learning_rate * grad[base + static_cast<std::size_t>(k)];
            if (delta != 0.0) updated.add_logit(state, k, delta);
        }
    }
    updated.clear_snapshot();
    return updated;
}

}  // namespace dra
