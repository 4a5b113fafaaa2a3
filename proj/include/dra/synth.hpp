#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dra/core.hpp"

namespace dra {

// Null-regime dataset: per prompt, group_size random unit embeddings and
// rewards drawn independently of them (uniform on [0, 1)). Pairwise reward
// and embedding distances are then unrelated, so roughly (1 - alpha) of
// the prompts test insignificant at level alpha.
std::vector<CompletionGroup> synth_null_dataset(std::size_t prompts, int group_size, int dim,
                                                std::uint64_t seed);

// Monotone-linked dataset: per prompt, completions spread along an arc
// away from an anchor direction (arc position uniform on [0.2, 1.2], plus
// angular_noise times a random displacement before renormalizing), with
// reward 2 minus the cosine distance to the anchor. Reward differences
// then grow with embedding distances, so tests come out significant at
// small noise (0.05 keeps nearly every prompt under p = 0.05 at G = 6).
std::vector<CompletionGroup> synth_monotone_dataset(std::size_t prompts, int group_size, int dim,
                                                    double angular_noise, std::uint64_t seed);

}  // namespace dra
