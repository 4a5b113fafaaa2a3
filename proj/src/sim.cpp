#include "dra/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_set>

#include "dra/adjust.hpp"
#include "dra/errors.hpp"
#include "dra/random.hpp"

namespace dra {
namespace {

constexpr double kNegInf = -1e30;
constexpr std::uint64_t kEmbedStream = 0x454d4244;   // embedding directions
constexpr std::uint64_t kSampleStream = 0x53414d50;  // training groups
constexpr std::uint64_t kEvalStream = 0x4556414c;    // evaluation batches
constexpr std::uint64_t kIpsStream = 0x49505344;     // de-biasing trials

void check_trajectory(const ToyEnvironment& env, const std::vector<int>& trajectory) {
    if (trajectory.size() != static_cast<std::size_t>(env.seq_len)) {
        throw BadTrajectory("trajectory length " + std::to_string(trajectory.size()) +
                            " does not match seq_len " + std::to_string(env.seq_len));
    }
    for (int token : trajectory) {
        if (token < 0 || token >= env.vocab_size) {
            throw BadTrajectory("token " + std::to_string(token) + " outside vocabulary of " +
                                std::to_string(env.vocab_size));
        }
    }
}

std::uint64_t encode_trajectory(const ToyEnvironment& env, const std::vector<int>& trajectory) {
    std::uint64_t code = 0;
    for (int token : trajectory) {
        code = code * static_cast<std::uint64_t>(env.vocab_size) +
               static_cast<std::uint64_t>(token);
    }
    return code;
}

std::vector<std::size_t> free_coordinates(const ToyEnvironment& env) {
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < static_cast<std::size_t>(env.embedding_dim); ++k) {
        bool touched = false;
        for (const Embedding& center : env.mode_centers) {
            if (std::abs(center.values[k]) > 1e-12) {
                touched = true;
                break;
            }
        }
        if (!touched) free.push_back(k);
    }
    return free;
}

// Logit that gives `prob` to one token against vocab-1 zero-logit tokens.
double bias_logit(int vocab, double prob) {
    return std::log(static_cast<double>(vocab - 1) * prob / (1.0 - prob));
}

double entropy_nats(const std::vector<int>& visits) {
    long total = 0;
    for (int v : visits) total += v;
    if (total == 0) return 0.0;
    double entropy = 0.0;
    for (int v : visits) {
        if (v == 0) continue;
        const double p = static_cast<double>(v) / static_cast<double>(total);
        entropy -= p * std::log(p);
    }
    return entropy;
}

AdvantageMode advantage_mode_of(Algorithm algorithm) {
    return (algorithm == Algorithm::Grpo || algorithm == Algorithm::DraGrpo)
               ? AdvantageMode::Grpo
               : AdvantageMode::DrGrpo;
}

bool uses_dra(Algorithm algorithm) {
    return algorithm == Algorithm::DraGrpo || algorithm == Algorithm::DraDrGrpo;
}

}  // namespace

ToyEnvironment default_landscape(std::uint64_t geometry_seed) {
    ToyEnvironment env;
    env.vocab_size = 8;
    env.seq_len = 3;
    env.embedding_dim = 8;
    env.within_mode_noise = 0.0;
    env.dominant_mode = 0;
    env.geometry_seed = geometry_seed;
    for (int m = 0; m < 5; ++m) {
        env.modes.push_back({{m, 0, 0}});
        env.mode_rewards.push_back(1.0);
        Embedding center;
        center.values.assign(8, 0.0);
        center.values[static_cast<std::size_t>(m)] = 1.0;
        env.mode_centers.push_back(center);
    }
    return env;
}

void validate_environment(const ToyEnvironment& env) {
    if (env.vocab_size < 2) throw ValidationError("vocab_size must be >= 2");
    if (env.seq_len < 1) throw ValidationError("seq_len must be >= 1");
    if (!std::isfinite(env.within_mode_noise) || env.within_mode_noise < 0.0 ||
        env.within_mode_noise >= 0.5) {
        throw ValidationError("within_mode_noise must lie in [0, 0.5)");
    }
    const std::size_t m_count = env.modes.size();
    if (m_count == 0) throw ValidationError("environment needs at least one mode");
    if (env.mode_rewards.size() != m_count || env.mode_centers.size() != m_count) {
        throw ValidationError("modes, mode_rewards, and mode_centers must align");
    }
    if (env.dominant_mode >= m_count) throw ValidationError("dominant_mode out of range");
    for (double r : env.mode_rewards) {
        if (!std::isfinite(r)) throw NonFiniteValue("non-finite mode reward");
    }
    if (env.embedding_dim < 1) throw ValidationError("embedding_dim must be >= 1");
    for (std::size_t a = 0; a < m_count; ++a) {
        if (env.mode_centers[a].dim() != static_cast<std::size_t>(env.embedding_dim)) {
            throw DimensionMismatch("mode center dimension disagrees with embedding_dim");
        }
        for (std::size_t b = a; b < m_count; ++b) {
            const double expected = (a == b) ? 1.0 : 0.0;
            if (std::abs(dot(env.mode_centers[a], env.mode_centers[b]) - expected) > 1e-9) {
                throw ValidationError("mode centers must be orthonormal");
            }
        }
    }
    std::unordered_set<std::uint64_t> seen;
    std::size_t total = 0;
    for (const auto& mode : env.modes) {
        if (mode.empty()) throw ValidationError("empty mode trajectory set");
        for (const auto& trajectory : mode) {
            check_trajectory(env, trajectory);
            if (!seen.insert(encode_trajectory(env, trajectory)).second) {
                throw ValidationError("modes must be pairwise disjoint");
            }
            ++total;
        }
    }
    const double space = std::pow(static_cast<double>(env.vocab_size),
                                  static_cast<double>(env.seq_len));
    if (static_cast<double>(total) >= space) {
        throw ValidationError("modes must cover a strict subset of the trajectory space");
    }
    if (free_coordinates(env).size() < 2) {
        throw ValidationError(
            "mode centers must leave at least two embedding coordinates free for "
            "background trajectories");
    }
}

int mode_of(const ToyEnvironment& env, const std::vector<int>& trajectory) {
    check_trajectory(env, trajectory);
    for (std::size_t m = 0; m < env.modes.size(); ++m) {
        for (const auto& member : env.modes[m]) {
            if (member == trajectory) return static_cast<int>(m);
        }
    }
    return -1;
}

double trajectory_reward(const ToyEnvironment& env, const std::vector<int>& trajectory) {
    const int m = mode_of(env, trajectory);
    return m >= 0 ? env.mode_rewards[static_cast<std::size_t>(m)] : 0.0;
}

Embedding trajectory_embedding(const ToyEnvironment& env, const std::vector<int>& trajectory) {
    const int m = mode_of(env, trajectory);
    RandomStream rng(
        derive_seed(env.geometry_seed, kEmbedStream, encode_trajectory(env, trajectory)));
    if (m >= 0) {
        const Embedding& center = env.mode_centers[static_cast<std::size_t>(m)];
        if (env.within_mode_noise == 0.0) return center;
        std::vector<double> direction = rng.normal_vector(static_cast<std::size_t>(env.embedding_dim));
        for (double& v : direction) v = std::abs(v);
        const Embedding unit = Embedding{direction}.normalized();
        Embedding displaced = center;
        for (std::size_t k = 0; k < displaced.values.size(); ++k) {
            displaced.values[k] += env.within_mode_noise * unit.values[k];
        }
        return displaced.normalized();
    }
    const std::vector<std::size_t> free = free_coordinates(env);
    std::vector<double> raw = rng.normal_vector(free.size());
    Embedding out;
    out.values.assign(static_cast<std::size_t>(env.embedding_dim), 0.0);
    for (std::size_t k = 0; k < free.size(); ++k) {
        out.values[free[k]] = std::abs(raw[k]);
    }
    return out.normalized();
}

ToyPolicy initial_policy(const ToyEnvironment& env, double dominant_prob, double suffix_bias) {
    validate_environment(env);
    if (!std::isfinite(dominant_prob) || dominant_prob <= 0.0 || dominant_prob >= 1.0) {
        throw ValidationError("dominant_prob must lie in (0, 1)");
    }
    if (!std::isfinite(suffix_bias) || suffix_bias <= 0.0 || suffix_bias >= 1.0) {
        throw ValidationError("suffix_bias must lie in (0, 1)");
    }
    const double root_prob =
        dominant_prob / std::pow(suffix_bias, static_cast<double>(env.seq_len - 1));
    if (root_prob >= 1.0) {
        throw ValidationError("dominant_prob is unreachable at this suffix_bias");
    }
    ToyPolicy policy(env.vocab_size, env.seq_len);
    // Desired next tokens per suffix state; states contested by two
    // representatives stay uniform.
    std::map<std::size_t, std::set<int>> wanted;
    for (const auto& mode : env.modes) {
        const std::vector<int>& rep = mode.front();
        std::vector<int> prefix = {rep[0]};
        for (int t = 1; t < env.seq_len; ++t) {
            wanted[policy.state_index(prefix)].insert(rep[static_cast<std::size_t>(t)]);
            prefix.push_back(rep[static_cast<std::size_t>(t)]);
        }
    }
    for (const auto& [state, tokens] : wanted) {
        if (tokens.size() == 1) {
            policy.set_logit(state, *tokens.begin(), bias_logit(env.vocab_size, suffix_bias));
        }
    }
    const int first = env.modes[env.dominant_mode].front()[0];
    policy.set_logit(0, first, bias_logit(env.vocab_size, root_prob));
    return policy;
}

ToyPolicy mode_seeking_policy(const ToyEnvironment& env, const std::vector<double>& mode_probs) {
    validate_environment(env);
    if (mode_probs.size() != env.modes.size()) {
        throw LengthMismatch("mode_probs length " + std::to_string(mode_probs.size()) +
                             " does not match " + std::to_string(env.modes.size()) + " modes");
    }
    double total = 0.0;
    for (double q : mode_probs) {
        if (!std::isfinite(q) || q < 0.0) {
            throw ValidationError("mode probabilities must be finite and >= 0");
        }
        total += q;
    }
    if (total <= 0.0) throw ValidationError("mode probabilities must not all be zero");

    ToyPolicy policy(env.vocab_size, env.seq_len);
    // Accumulated representative mass per (state, next token); softmax of
    // log-mass rows reproduces the conditional distributions exactly, and
    // tokens off every representative path get probability exactly zero.
    std::map<std::size_t, std::vector<double>> mass;
    for (std::size_t m = 0; m < env.modes.size(); ++m) {
        const double q = mode_probs[m] / total;
        if (q == 0.0) continue;
        const std::vector<int>& rep = env.modes[m].front();
        std::vector<int> prefix;
        for (int token : rep) {
            auto& row = mass.try_emplace(policy.state_index(prefix),
                                         std::vector<double>(env.vocab_size, 0.0))
                            .first->second;
            row[static_cast<std::size_t>(token)] += q;
            prefix.push_back(token);
        }
    }
    for (const auto& [state, row] : mass) {
        for (int k = 0; k < env.vocab_size; ++k) {
            const double m_k = row[static_cast<std::size_t>(k)];
            policy.set_logit(state, k, m_k > 0.0 ? std::log(m_k) : kNegInf);
        }
    }
    return policy;
}

SampledGroup sample_group(ToyPolicy& policy, const ToyEnvironment& env, int group_size,
                          std::uint64_t seed) {
    if (group_size < 2) {
        throw GroupTooSmall("group_size must be >= 2, got " + std::to_string(group_size));
    }
    RandomStream rng(seed);
    SampledGroup out;
    out.group.prompt_id = "sim";
    for (int i = 0; i < group_size; ++i) {
        std::vector<int> trajectory = policy.sample_trajectory(rng);
        out.group.completion_ids.push_back("c" + std::to_string(i));
        out.group.rewards.push_back(trajectory_reward(env, trajectory));
        out.group.embeddings.push_back(trajectory_embedding(env, trajectory));
        out.trajectories.push_back(std::move(trajectory));
    }
    policy.record_snapshot(out.trajectories);
    return out;
}

std::string algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::Grpo: return "grpo";
        case Algorithm::DrGrpo: return "drgrpo";
        case Algorithm::DraGrpo: return "dra_grpo";
        case Algorithm::DraDrGrpo: return "dra_drgrpo";
    }
    throw ValidationError("unknown algorithm");
}

RunMetrics evaluate_policy(const ToyPolicy& policy, const ToyEnvironment& env, int batch,
                           std::uint64_t seed, int step) {
    if (batch < 1) throw ValidationError("evaluation batch must be >= 1");
    RandomStream rng(seed);
    RunMetrics metrics;
    metrics.step = step;
    metrics.visits.assign(env.modes.size(), 0);
    double total_reward = 0.0;
    for (int b = 0; b < batch; ++b) {
        const std::vector<int> trajectory = policy.sample_trajectory(rng);
        const int m = mode_of(env, trajectory);
        if (m >= 0) {
            ++metrics.visits[static_cast<std::size_t>(m)];
            total_reward += env.mode_rewards[static_cast<std::size_t>(m)];
        }
    }
    metrics.mean_reward = total_reward / static_cast<double>(batch);
    metrics.mode_recall = static_cast<int>(
        std::count_if(metrics.visits.begin(), metrics.visits.end(), [](int v) { return v > 0; }));
    metrics.mode_entropy = entropy_nats(metrics.visits);
    return metrics;
}

std::vector<RunMetrics> train(const ToyEnvironment& env, const TrainConfig& config) {
    validate_environment(env);
    if (config.steps < 0) throw ValidationError("steps must be >= 0");
    if (config.group_size < 2) throw GroupTooSmall("group_size must be >= 2");
    if (!std::isfinite(config.learning_rate) || config.learning_rate <= 0.0) {
        throw ValidationError("learning_rate must be finite and > 0");
    }
    if (config.eval_every < 1) throw ValidationError("eval_every must be >= 1");
    if (config.eval_batch < 1) throw ValidationError("eval_batch must be >= 1");
    if (!std::isfinite(config.dra_epsilon) || config.dra_epsilon < 0.0) {
        throw ValidationError("dra_epsilon must be finite and >= 0");
    }
    ClipConfig clip;
    clip.epsilon = config.clip_epsilon;
    clip.mode = advantage_mode_of(config.algorithm);
    clip.std_floor = config.std_floor;

    ToyPolicy policy = initial_policy(env, config.dominant_prob, config.suffix_bias);
    std::vector<RunMetrics> metrics;
    metrics.push_back(evaluate_policy(policy, env, config.eval_batch,
                                      derive_seed(config.seed, kEvalStream, 0), 0));
    for (int t = 1; t <= config.steps; ++t) {
        SampledGroup sampled = sample_group(policy, env, config.group_size,
                                            derive_seed(config.seed, kSampleStream,
                                                        static_cast<std::uint64_t>(t)));
        std::vector<double> rewards = sampled.group.rewards;
        if (uses_dra(config.algorithm)) {
            const SimilarityMatrix matrix = cosine_similarity_matrix(sampled.group.embeddings);
            rewards = adjust_rewards(rewards, dra_weights(matrix, config.smi, config.dra_epsilon));
        }
        const AdvantageVector advantages = group_advantages(rewards, clip.mode, config.std_floor);
        policy = policy_gradient_step(policy, sampled.trajectories, advantages.values, clip,
                                      config.learning_rate);
        if (t % config.eval_every == 0 || t == config.steps) {
            metrics.push_back(evaluate_policy(policy, env, config.eval_batch,
                                              derive_seed(config.seed, kEvalStream,
                                                          static_cast<std::uint64_t>(t)),
                                              t));
        }
    }
    return metrics;
}

IpsReport ips_debias_check(const ToyEnvironment& env, const ToyPolicy& policy, int group_size,
                           int trials, std::uint64_t seed) {
    validate_environment(env);
    if (env.within_mode_noise != 0.0) {
        throw GeometryNotExact("de-biasing check needs within_mode_noise == 0");
    }
    for (const auto& mode : env.modes) {
        if (mode.size() != 1) {
            throw GeometryNotExact("de-biasing check needs one representative per mode");
        }
    }
    if (trials < 1) throw ValidationError("trials must be >= 1");

    const std::size_t m_count = env.modes.size();
    std::vector<double> q(m_count);
    double total_q = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
        q[m] = policy.trajectory_prob(env.modes[m].front());
        total_q += q[m];
    }
    if (std::abs(total_q - 1.0) > 1e-9) {
        throw GeometryNotExact("policy mass leaks off the mode representatives");
    }

    IpsReport report;
    report.trials = static_cast<std::size_t>(trials);
    for (std::size_t m = 0; m < m_count; ++m) {
        report.uniform_sum += env.mode_rewards[m];
        report.eq_reward += q[m] * env.mode_rewards[m];
    }

    RandomStream rng(derive_seed(seed, kIpsStream, 0));
    const SmiKind graph_cut{SmiVariant::GraphCut, 0.0};
    double vanilla_sum = 0.0, vanilla_sq = 0.0;
    double dra_sum = 0.0, dra_sq = 0.0;
    double distinct_sum = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        CompletionGroup group;
        group.prompt_id = "ips";
        std::vector<bool> present(m_count, false);
        for (int i = 0; i < group_size; ++i) {
            const std::vector<int> trajectory = policy.sample_trajectory(rng);
            const int m = mode_of(env, trajectory);
            if (m >= 0) present[static_cast<std::size_t>(m)] = true;
            group.completion_ids.push_back("c" + std::to_string(i));
            group.rewards.push_back(trajectory_reward(env, trajectory));
            group.embeddings.push_back(trajectory_embedding(env, trajectory));
        }
        const CompletionGroup validated = validate_group(group);
        const SimilarityMatrix matrix = cosine_similarity_matrix(validated.embeddings);
        const std::vector<double> adjusted =
            adjust_rewards(validated.rewards, dra_weights(matrix, graph_cut, 0.0));

        double vanilla = 0.0;
        for (double r : validated.rewards) vanilla += r;
        vanilla /= static_cast<double>(group_size);
        double dra = 0.0;
        for (double r : adjusted) dra += r;
        double distinct = 0.0;
        for (std::size_t m = 0; m < m_count; ++m) {
            if (present[m]) distinct += env.mode_rewards[m];
        }
        vanilla_sum += vanilla;
        vanilla_sq += vanilla * vanilla;
        dra_sum += dra;
        dra_sq += dra * dra;
        distinct_sum += distinct;
    }
    const double n = static_cast<double>(trials);
    report.vanilla_mean = vanilla_sum / n;
    report.dra_mean = dra_sum / n;
    report.distinct_sum_mean = distinct_sum / n;
    report.vanilla_bias = std::abs(report.vanilla_mean - report.uniform_sum);
    report.dra_bias = std::abs(report.dra_mean - report.uniform_sum);
    if (trials > 1) {
        const double var_vanilla =
            std::max(0.0, (vanilla_sq - n * report.vanilla_mean * report.vanilla_mean) / (n - 1.0));
        const double var_dra =
            std::max(0.0, (dra_sq - n * report.dra_mean * report.dra_mean) / (n - 1.0));
        report.vanilla_se = std::sqrt(var_vanilla / n);
        report.dra_se = std::sqrt(var_dra / n);
    }
    return report;
}

}  // namespace dra
