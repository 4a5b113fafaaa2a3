#include "dra/rewards.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "dra/errors.hpp"

namespace dra {
namespace {

std::string normalize_answer(const std::string& raw) {
    std::size_t begin = 0;
    std::size_t end = raw.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
    std::string out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i]))));
    }
    return out;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    std::size_t pos = text.find(needle);
    while (pos != std::string::npos) {
        ++count;
        pos = text.find(needle, pos + 1);  // step one byte so overlaps count
    }
    return count;
}

}  // namespace

void validate_reward_config(const RewardConfig& config) {
    for (const auto& [name, weight] : config.weights) {
        if (!std::isfinite(weight) || weight < 0.0) {
            throw ValidationError("reward weight for '" + name + "' must be finite and >= 0");
        }
    }
    if (config.max_len < 1) throw ValidationError("max_len must be >= 1");
    if (!(config.cosine_correct_max >= config.cosine_correct_min)) {
        throw ValidationError("cosine correct range is inverted");
    }
    if (!(config.cosine_wrong_min <= config.cosine_wrong_max) || config.cosine_wrong_max > 0.0) {
        throw ValidationError("cosine wrong range must satisfy min <= max <= 0");
    }
}

double accuracy_reward(const std::string& answer, const std::string& ground_truth) {
    return normalize_answer(answer) == normalize_answer(ground_truth) ? 1.0 : 0.0;
}

double format_reward(const std::string& text) {
    return count_occurrences(text, "\n</think>\n") == 1 ? 1.0 : 0.0;
}

double cosine_reward(bool correct, int len, const RewardConfig& config) {
    validate_reward_config(config);
    if (len < 0 || len > config.max_len) {
        throw LengthOutOfRange("completion length " + std::to_string(len) +
                               " outside [0, " + std::to_string(config.max_len) + "]");
    }
    const double t = static_cast<double>(len) / static_cast<double>(config.max_len);
    const double c = 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    if (correct) {
        return config.cosine_correct_min +
               (config.cosine_correct_max - config.cosine_correct_min) * c;
    }
    return config.cosine_wrong_max + (config.cosine_wrong_min - config.cosine_wrong_max) * c;
}

double combined_reward(const std::map<std::string, double>& components,
                       const RewardConfig& config) {
    validate_reward_config(config);
    double total = 0.0;
    for (const auto& [name, value] : components) {
        const auto it = config.weights.find(name);
        if (it == config.weights.end()) {
            throw UnknownComponent("no weight configured for reward component '" + name + "'");
        }
        total += it->second * value;
    }
    return total;
}

}  // namespace dra
