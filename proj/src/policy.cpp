#include "dra/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dra/errors.hpp"

namespace dra {

ToyPolicy::ToyPolicy(int vocab_size, int seq_len) : vocab_(vocab_size), len_(seq_len) {
    if (vocab_ < 2) throw ValidationError("vocab_size must be >= 2");
    if (len_ < 1) throw ValidationError("seq_len must be >= 1");
    offsets_.resize(static_cast<std::size_t>(len_) + 1);
    offsets_[0] = 0;
    std::size_t level = 1;
    for (int t = 0; t < len_; ++t) {
        offsets_[static_cast<std::size_t>(t) + 1] = offsets_[static_cast<std::size_t>(t)] + level;
        level *= static_cast<std::size_t>(vocab_);
    }
    logits_.assign(state_count() * static_cast<std::size_t>(vocab_), 0.0);
}

std::size_t ToyPolicy::state_index(const std::vector<int>& prefix) const {
    if (prefix.size() >= static_cast<std::size_t>(len_)) {
        throw BadTrajectory("prefix of length " + std::to_string(prefix.size()) +
                            " has no next-token state at seq_len " + std::to_string(len_));
    }
    std::size_t number = 0;
    for (int token : prefix) {
        if (token < 0 || token >= vocab_) {
            throw BadTrajectory("token " + std::to_string(token) + " outside vocabulary of " +
                                std::to_string(vocab_));
        }
        number = number * static_cast<std::size_t>(vocab_) + static_cast<std::size_t>(token);
    }
    return offsets_[prefix.size()] + number;
}

double ToyPolicy::logit(std::size_t state, int token) const {
    return logits_[state * static_cast<std::size_t>(vocab_) + static_cast<std::size_t>(token)];
}

void ToyPolicy::set_logit(std::size_t state, int token, double value) {
    logits_[state * static_cast<std::size_t>(vocab_) + static_cast<std::size_t>(token)] = value;
}

void ToyPolicy::add_logit(std::size_t state, int token, double delta) {
    logits_[state * static_cast<std::size_t>(vocab_) + static_cast<std::size_t>(token)] += delta;
}

std::vector<double> ToyPolicy::token_probs(std::size_t state) const {
    const std::size_t base = state * static_cast<std::size_t>(vocab_);
    double max_logit = logits_[base];
    for (int k = 1; k < vocab_; ++k) {
        max_logit = std::max(max_logit, logits_[base + static_cast<std::size_t>(k)]);
    }
    std::vector<double> probs(static_cast<std::size_t>(vocab_));
    double total = 0.0;
    for (int k = 0; k < vocab_; ++k) {
        probs[static_cast<std::size_t>(k)] =
            std::exp(logits_[base + static_cast<std::size_t>(k)] - max_logit);
        total += probs[static_cast<std::size_t>(k)];
    }
    for (double& p : probs) p /= total;
    return probs;
}

std::vector<int> ToyPolicy::sample_trajectory(RandomStream& rng) const {
    std::vector<int> trajectory;
    trajectory.reserve(static_cast<std::size_t>(len_));
    for (int t = 0; t < len_; ++t) {
        const std::vector<double> probs = token_probs(state_index(trajectory));
        const double u = rng.uniform();
        double cumulative = 0.0;
        int chosen = -1;
        for (int k = 0; k < vocab_; ++k) {
            cumulative += probs[static_cast<std::size_t>(k)];
            if (u < cumulative) {
                chosen = k;
                break;
            }
        }
        if (chosen < 0) {
            // Cumulative rounding left u unmatched; take the last token that
            // has mass so zero-probability tokens stay unreachable.
            for (int k = vocab_ - 1; k >= 0; --k) {
                if (probs[static_cast<std::size_t>(k)] > 0.0) {
                    chosen = k;
                    break;
                }
            }
        }
        trajectory.push_back(chosen);
    }
    return trajectory;
}

std::vector<double> ToyPolicy::trajectory_token_probs(const std::vector<int>& trajectory) const {
    if (trajectory.size() != static_cast<std::size_t>(len_)) {
        throw BadTrajectory("trajectory length " + std::to_string(trajectory.size()) +
                            " does not match seq_len " + std::to_string(len_));
    }
    std::vector<double> out;
    out.reserve(trajectory.size());
    std::vector<int> prefix;
    prefix.reserve(trajectory.size());
    for (int token : trajectory) {
        const std::vector<double> probs = token_probs(state_index(prefix));
        if (token < 0 || token >= vocab_) {
            throw BadTrajectory("token " + std::to_string(token) + " outside vocabulary of " +
                                std::to_string(vocab_));
        }
        out.push_back(probs[static_cast<std::size_t>(token)]);
        prefix.push_back(token);
    }
    return out;
}

double ToyPolicy::trajectory_prob(const std::vector<int>& trajectory) const {
    double p = 1.0;
    for (double q : trajectory_token_probs(trajectory)) p *= q;
    return p;
}

void ToyPolicy::record_snapshot(const std::vector<std::vector<int>>& trajectories) {
    snapshot_.clear();
    for (const std::vector<int>& trajectory : trajectories) {
        snapshot_[encode(trajectory)] = trajectory_token_probs(trajectory);
    }
}

const std::vector<double>* ToyPolicy::snapshot_probs(const std::vector<int>& trajectory) const {
    const auto it = snapshot_.find(encode(trajectory));
    if (it == snapshot_.end()) return nullptr;
    return &it->second;
}

void ToyPolicy::clear_snapshot() { snapshot_.clear(); }

std::uint64_t ToyPolicy::encode(const std::vector<int>& trajectory) const {
    std::uint64_t code = 0;
    for (int token : trajectory) {
        code = code * static_cast<std::uint64_t>(vocab_) + static_cast<std::uint64_t>(token);
    }
    return code;
}

}  // namespace dra
