#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "dra/random.hpp"

namespace dra {

// Tabular autoregressive policy over fixed-length token sequences. Every
// prefix of length t < seq_len owns one state with a full logit row, so
// gradients are exact and free of function-approximation confounds. State
// count is 1 + V + ... + V^(L-1); feasible at toy scale (73 for V=8, L=3).
//
// The snapshot holds per-token probabilities of trajectories captured at
// sampling time. Importance ratios in the surrogate are taken against it,
// so a gradient step requires every trajectory in the batch to have been
// recorded since the last update.
class ToyPolicy {
  public:
    ToyPolicy(int vocab_size, int seq_len);

    int vocab_size() const { return vocab_; }
    int seq_len() const { return len_; }
    std::size_t state_count() const { return offsets_.back(); }

    // State owning the next-token distribution after `prefix`
    // (prefix.size() < seq_len). Tokens must lie in [0, V).
    std::size_t state_index(const std::vector<int>& prefix) const;

    double logit(std::size_t state, int token) const;
    void set_logit(std::size_t state, int token, double value);
    void add_logit(std::size_t state, int token, double delta);

    // Softmax row for one state; sums to 1 within 1e-9.
    std::vector<double> token_probs(std::size_t state) const;

    std::vector<int> sample_trajectory(RandomStream& rng) const;

    // Probability of each token of `trajectory` at its own prefix state.
    std::vector<double> trajectory_token_probs(const std::vector<int>& trajectory) const;
    double trajectory_prob(const std::vector<int>& trajectory) const;

    // Freezes current per-token probabilities for the given trajectories.
    // Replaces any previous snapshot.
    void record_snapshot(const std::vector<std::vector<int>>& trajectories);
    // Frozen probabilities for one trajectory, or nullptr if it was not part
    // of the last recorded batch.
    const std::vector<double>* snapshot_probs(const std::vector<int>& trajectory) const;
    void clear_snapshot();
    bool has_snapshot() const { return !snapshot_.empty(); }

  private:
    std::uint64_t encode(const std::vector<int>& trajectory) const;

    int vocab_;
    int len_;
    std::vector<std::size_t> offsets_;  // offsets_[t] = first state of depth t
    std::vector<double> logits_;        // state-major, state_count() * V
    std::map<std::uint64_t, std::vector<double>> snapshot_;
};

}  // namespace dra
