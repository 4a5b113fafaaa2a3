#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dra/advantage.hpp"
#include "dra/core.hpp"
#include "dra/policy.hpp"
#include "dra/smi.hpp"

namespace dra {

// Discrete multi-modal reward landscape: a handful of rewarded trajectory
// sets (modes) inside a much larger space of unrewarded trajectories. Each
// mode owns an embedding center; centers are mutually orthogonal unit
// vectors. Trajectories outside every mode embed into the coordinates no
// center touches, so cross-mode and mode-to-background similarities vanish.
struct ToyEnvironment {
    int vocab_size = 8;
    int seq_len = 3;
    std::vector<std::vector<std::vector<int>>> modes;  // disjoint trajectory sets
    std::vector<double> mode_rewards;                  // one per mode
    std::vector<Embedding> mode_centers;               // orthonormal, one per mode
    int embedding_dim = 8;
    double within_mode_noise = 0.0;                    // in [0, 0.5)
    std::size_t dominant_mode = 0;
    std::uint64_t geometry_seed = 0;                   // seeds background directions
};

// One dominant and four sparse single-trajectory modes over V=8, L=3
// (512 trajectories). Mode m is the trajectory (m, 0, 0): the first token
// selects the mode, the shared suffix keeps every mode reachable under the
// biased initial policy. Rewards 1.0 each; embedding dim 8 leaves three
// spare coordinates for background trajectories.
ToyEnvironment default_landscape(std::uint64_t geometry_seed = 0);

// Checks vocab/length bounds, noise range, orthonormal centers, disjoint
// valid modes whose union is a strict subset of the trajectory space, and
// that at least two embedding coordinates are free of every center.
void validate_environment(const ToyEnvironment& env);

// Index of the mode containing the trajectory, or -1 if unrewarded.
int mode_of(const ToyEnvironment& env, const std::vector<int>& trajectory);

double trajectory_reward(const ToyEnvironment& env, const std::vector<int>& trajectory);

// Deterministic unit embedding. Mode members sit at their center, displaced
// by within_mode_noise along a trajectory-hashed nonnegative direction when
// noise > 0. Background trajectories get a trajectory-hashed nonnegative
// unit vector over the center-free coordinates. Identical trajectories
// always produce identical embeddings.
Embedding trajectory_embedding(const ToyEnvironment& env, const std::vector<int>& trajectory);

// Biased starting policy. Along every mode representative's path the next
// token is favored with probability suffix_bias per step; the root favors
// the dominant representative's first token so that its total visit
// probability equals dominant_prob. States reached by two representatives
// that disagree on the next token stay uniform.
ToyPolicy initial_policy(const ToyEnvironment& env, double dominant_prob = 0.7,
                         double suffix_bias = 0.95);

// Policy whose trajectory distribution is exactly mode_probs over the mode
// representatives (first trajectory of each mode) and zero elsewhere.
// Probabilities are renormalized; used by the de-biasing check.
ToyPolicy mode_seeking_policy(const ToyEnvironment& env, const std::vector<double>& mode_probs);

struct SampledGroup {
    CompletionGroup group;
    std::vector<std::vector<int>> trajectories;
};

// Draws group_size i.i.d. trajectories, scores and embeds them, and records
// the policy snapshot the importance ratios will be taken against.
SampledGroup sample_group(ToyPolicy& policy, const ToyEnvironment& env, int group_size,
                          std::uint64_t seed);

enum class Algorithm { Grpo, DrGrpo, DraGrpo, DraDrGrpo };

std::string algorithm_name(Algorithm algorithm);

struct TrainConfig {
    Algorithm algorithm = Algorithm::Grpo;
    int steps = 500;
    int group_size = 6;
    double learning_rate = 0.5;
    double clip_epsilon = 0.2;
    double std_floor = 1e-8;
    double dra_epsilon = 1e-6;   // denominator slack of the reward adjustment
    SmiKind smi;                 // graph-cut by default
    int eval_every = 10;
    int eval_batch = 256;
    double dominant_prob = 0.7;
    double suffix_bias = 0.95;
    std::uint64_t seed = 0;
};

struct RunMetrics {
    int step = 0;
    int mode_recall = 0;         // distinct rewarded modes hit in the batch
    double mode_entropy = 0.0;   // nats, over the batch's mode-visit distribution
    double mean_reward = 0.0;
    std::vector<int> visits;     // per-mode counts
};

// Samples an evaluation batch from the policy (fresh stream, no snapshot)
// and summarizes mode coverage. Entropy is taken over mode visits only and
// is 0 when the batch never hits a mode; it never exceeds ln(M).
RunMetrics evaluate_policy(const ToyPolicy& policy, const ToyEnvironment& env, int batch,
                           std::uint64_t seed, int step);

// Full training loop: sample, optionally adjust rewards by diversity
// weights, compute group advantages, take one clipped-surrogate ascent
// step. Metrics are emitted at step 0, every eval_every steps, and at the
// final step. Deterministic given config.seed.
std::vector<RunMetrics> train(const ToyEnvironment& env, const TrainConfig& config);

// Estimator comparison in the exact-duplicate geometry, where a group's
// similarity row sums equal mode multiplicities. vanilla_mean tracks the
// policy-weighted expected reward; dra_mean (the adjusted-reward group sum)
// tracks the uniform sum of rewards over all modes, the integral the
// de-biased estimator targets. Biases are measured against that uniform sum.
struct IpsReport {
    double vanilla_mean = 0.0;
    double dra_mean = 0.0;
    double eq_reward = 0.0;           // sum q_m * R_m under the sampling policy
    double distinct_sum_mean = 0.0;   // mean over trials of sum R over modes present
    double uniform_sum = 0.0;         // sum of R over all modes
    double vanilla_bias = 0.0;        // |vanilla_mean - uniform_sum|
    double dra_bias = 0.0;            // |dra_mean - uniform_sum|
    double vanilla_se = 0.0;
    double dra_se = 0.0;
    std::size_t trials = 0;
};

// Requires within_mode_noise == 0 and singleton modes (GeometryNotExact
// otherwise) and a policy whose mass sits on the mode representatives to
// within 1e-9. Each trial runs the real pipeline: validate, cosine kernel,
// graph-cut weights with epsilon 0, adjust.
IpsReport ips_debias_check(const ToyEnvironment& env, const ToyPolicy& policy, int group_size,
                           int trials, std::uint64_t seed);

}  // namespace dra
