#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "dra/analyzer.hpp"
#include "dra/smi.hpp"

namespace dra {

// Command implementations behind the CLI subcommands. Each returns a
// process exit code: 0 on success, 1 on the first fatal error, with the
// diagnostic written to stderr. Output files are written atomically.

// Reads completion JSONL, computes diversity weights per group, and writes
// the same records with added weight and adjusted_reward fields.
int cmd_adjust(const std::string& input_path, const std::string& output_path,
               const SmiKind& kind, double epsilon);

// Runs the reward-vs-embedding distance correlation over every group and
// writes <prefix>_records.csv and <prefix>_histogram.csv. Prints the
// fraction of prompts with p > alpha; per-group failures go to stderr and
// the run continues.
int cmd_analyze(const std::string& input_path, const std::string& output_prefix, double alpha,
                PValueMethod method, std::uint64_t seed);

// Trains on the configured landscape and writes the metrics CSV. With
// sweep set, runs all four algorithms under the shared seed, writing one
// CSV per algorithm with the algorithm name appended to the output stem.
int cmd_simulate(const std::string& config_path, const std::string& output_path, bool sweep);

// Times the two weight variants on seeded random groups over a doubling
// size grid 8, 16, ..., max_group. Writes G,graphcut_us,logdet_us rows
// (median microseconds per call) and prints fitted log-log slopes.
int cmd_bench(int max_group, int repetitions, const std::string& output_path,
              std::uint64_t seed);

enum class SynthKind { Null, Monotone };

// Generates a synthetic completion dataset (null or monotone regime) as
// JSONL. angular_noise applies to the monotone kind only.
int cmd_synth(SynthKind kind, std::size_t prompts, int group_size, int dim,
              double angular_noise, std::uint64_t seed, const std::string& output_path);

}  // namespace dra
