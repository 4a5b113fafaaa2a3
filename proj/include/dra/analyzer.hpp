#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dra/core.hpp"

namespace dra {

enum class PValueMethod { TApprox, Permutation };

// Strict upper triangle of the two pairwise distance matrices, row-major:
// (0,1), (0,2), ..., (1,2), ... Both vectors have length G(G-1)/2.
struct PairwiseDistances {
    std::vector<double> reward_diffs;  // |R_i - R_j|
    std::vector<double> embed_dists;   // 1 - cosine similarity
};

struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0;
    bool degenerate = false;
    PValueMethod method = PValueMethod::TApprox;
};

struct AnalysisRecord {
    std::string prompt_id;
    std::size_t n_completions = 0;
    std::size_t n_pairs = 0;
    double rho = 0.0;
    double p_value = 1.0;
    bool degenerate = false;
    PValueMethod method = PValueMethod::TApprox;
};

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::size_t count = 0;
};

struct AnalysisReport {
    std::vector<AnalysisRecord> records;
    double fraction_insignificant = 0.0;  // share of prompts with p > alpha
    double fraction_degenerate = 0.0;     // share with a constant distance vector
    std::vector<HistogramBin> histogram;  // 20 equal-width p-value bins on [0, 1]
    std::vector<std::string> group_errors;
};

// Requires G >= 3 so the correlation has at least 3 pairs. Embeddings are
// assumed unit-norm (validate_group output).
PairwiseDistances pairwise_distances(const CompletionGroup& group);

// Midranks for ties: tied runs share the average of their positions.
std::vector<double> rank_with_ties(const std::vector<double>& values);

// Spearman rank correlation with a two-sided p-value. TApprox uses the
// t statistic rho*sqrt((n-2)/(1-rho^2)) with n-2 degrees of freedom.
// Permutation enumerates all n! rank pairings exactly for n <= 10 and
// falls back to seeded Monte-Carlo sampling (add-one smoothed) above that.
// A constant input yields a degenerate result with rho 0 and p 1 instead
// of an exception, so whole-dataset scans can count such prompts.
SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y,
                        PValueMethod method = PValueMethod::TApprox, std::uint64_t seed = 0,
                        std::size_t mc_permutations = 10000);

// Per-prompt correlation between reward distances and embedding distances,
// plus the dataset-level aggregates. Group failures (too small, invalid)
// are collected in group_errors, not fatal. An empty or all-failing input
// throws EmptyDataset.
AnalysisReport analyze_dataset(const std::vector<CompletionGroup>& groups, double alpha = 0.05,
                               PValueMethod method = PValueMethod::TApprox,
                               std::uint64_t seed = 0);

}  // namespace dra
