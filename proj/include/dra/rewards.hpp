#pragma once

#include <map>
#include <string>

namespace dra {

// Composition weights and the length schedule for the cosine reward.
// Correct completions score in [cosine_correct_min, cosine_correct_max]
// (shorter is better); incorrect ones in [cosine_wrong_min, cosine_wrong_max]
// with both bounds <= 0 (shorter is worse).
struct RewardConfig {
    std::map<std::string, double> weights = {{"format", 1.0}, {"cosine", 2.0}};
    int max_len = 3584;
    double cosine_correct_min = 0.0;
    double cosine_correct_max = 1.0;
    double cosine_wrong_min = -1.0;
    double cosine_wrong_max = 0.0;
};

// Throws ValidationError unless weights are nonnegative, max_len >= 1,
// correct_max >= correct_min, and wrong_min <= wrong_max <= 0.
void validate_reward_config(const RewardConfig& config);

// 1.0 on exact match after trimming ASCII whitespace and case-folding
// ASCII letters, else 0.0.
double accuracy_reward(const std::string& answer, const std::string& ground_truth);

// 1.0 iff the byte sequence "\n</think>\n" occurs exactly once (overlapping
// occurrences counted), else 0.0. The opening tag is not required.
double format_reward(const std::string& text);

// Length-scheduled reward: with t = len/max_len and c = 0.5*(1 + cos(pi*t)),
// correct completions interpolate max -> min as length grows, incorrect
// ones interpolate wrong_min -> wrong_max (short wrong answers are
// penalized hardest).
double cosine_reward(bool correct, int len, const RewardConfig& config);

// Weighted sum of named component scores; every component name must carry
// a weight in the config.
double combined_reward(const std::map<std::string, double>& components,
                       const RewardConfig& config);

}  // namespace dra
