#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dra/analyzer.hpp"
#include "dra/core.hpp"
#include "dra/rewards.hpp"
#include "dra/sim.hpp"
#include "dra/smi.hpp"

namespace dra {

// Doubles serialize as decimal text with 17 significant digits, enough to
// reparse to the identical bit pattern.
std::string format_double(double value);

// Writes content to a sibling temp file and renames it into place, so a
// failure never leaves a partial file at the target path.
void write_text_atomic(const std::string& path, const std::string& content);

// Reads completion JSON-Lines: one object per line with fields prompt_id,
// completion_id, reward, embedding, and optional text; unknown fields are
// ignored. Lines are grouped by prompt_id, preserving file order both for
// groups (first appearance) and completions within a group. Malformed JSON
// or field types raise ParseError naming the line. With validate set, each
// group is checked and embeddings come back unit-normalized: inconsistent
// embedding sizes within a prompt raise MixedDimension, other group-level
// failures raise ValidationError naming the prompt. Callers that collect
// per-group problems themselves (the analyze pipeline) pass validate =
// false to receive the raw groups.
std::vector<CompletionGroup> ingest_completions(const std::string& path, bool validate = true);

// One completion as a JSONL line. weight/adjusted_reward are appended when
// non-null (the adjust command's added fields).
std::string completion_line(const CompletionGroup& group, std::size_t index,
                            const double* weight, const double* adjusted_reward);

std::string completion_jsonl(const std::vector<CompletionGroup>& groups);
void write_completions(const std::string& path, const std::vector<CompletionGroup>& groups);

// CSV: step,algorithm,seed,mode_recall,mode_entropy,mean_reward,visits_0..
std::string metrics_csv(const std::vector<RunMetrics>& metrics, Algorithm algorithm,
                        std::uint64_t seed);

// CSV: prompt_id,n_completions,rho,p_value,degenerate
std::string analysis_records_csv(const std::vector<AnalysisRecord>& records);

// CSV: bin_left,bin_right,count
std::string analysis_histogram_csv(const std::vector<HistogramBin>& bins);

// Flat run configuration, the union of training, environment, and reward
// settings. The file format is a single JSON object whose keys mirror these
// field names; unknown keys, wrong types, and out-of-range values raise
// ConfigError naming the key.
struct RunConfig {
    Algorithm algorithm = Algorithm::Grpo;
    SmiKind smi;
    double epsilon = 1e-6;  // adjustment denominator slack
    int group_size = 6;
    int steps = 500;
    double learning_rate = 0.5;
    double clip_epsilon = 0.2;
    double std_floor = 1e-8;
    std::uint64_t seed = 0;
    int eval_every = 10;
    int eval_batch = 256;
    double dominant_prob = 0.7;
    double suffix_bias = 0.95;
    int vocab_size = 8;
    int seq_len = 3;
    int embedding_dim = 8;
    int num_modes = 5;
    double mode_reward = 1.0;
    double within_mode_noise = 0.0;
    std::size_t dominant_mode = 0;
    std::uint64_t geometry_seed = 0;
    RewardConfig rewards;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Landscape implied by the scalar environment fields: num_modes
// single-trajectory modes of the form (m, 0, ..., 0) with orthonormal basis
// centers, mode_reward each.
ToyEnvironment environment_from(const RunConfig& config);
TrainConfig train_config_from(const RunConfig& config);

}  // namespace dra
