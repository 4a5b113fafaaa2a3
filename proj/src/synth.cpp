#include "dra/synth.hpp"

#include <cmath>
#include <string>

#include "dra/errors.hpp"
#include "dra/random.hpp"

namespace dra {
namespace {

constexpr std::uint64_t kNullStream = 0x4e554c4c;      // "NULL"
constexpr std::uint64_t kMonotoneStream = 0x4d4f4e4f;  // "MONO"

void check_shape(std::size_t prompts, int group_size, int dim) {
    if (prompts == 0) throw ValidationError("prompts must be >= 1");
    if (group_size < 3) {
        throw ValidationError("group_size must be >= 3 for correlation analysis");
    }
    if (dim < 2) throw ValidationError("dim must be >= 2");
}

Embedding unit_normal(RandomStream& rng, int dim) {
    return Embedding{rng.normal_vector(static_cast<std::size_t>(dim))}.normalized();
}

CompletionGroup shell(std::size_t prompt, int group_size) {
    CompletionGroup group;
    group.prompt_id = "p" + std::to_string(prompt);
    group.completion_ids.reserve(static_cast<std::size_t>(group_size));
    for (int i = 0; i < group_size; ++i) {
        group.completion_ids.push_back("c" + std::to_string(i));
    }
    return group;
}

}  // namespace

std::vector<CompletionGroup> synth_null_dataset(std::size_t prompts, int group_size, int dim,
                                                std::uint64_t seed) {
    check_shape(prompts, group_size, dim);
    std::vector<CompletionGroup> groups;
    groups.reserve(prompts);
    for (std::size_t p = 0; p < prompts; ++p) {
        RandomStream rng(derive_seed(seed, kNullStream, p));
        CompletionGroup group = shell(p, group_size);
        for (int i = 0; i < group_size; ++i) {
            group.embeddings.push_back(unit_normal(rng, dim));
            group.rewards.push_back(rng.uniform());
        }
        groups.push_back(validate_group(group));
    }
    return groups;
}

std::vector<CompletionGroup> synth_monotone_dataset(std::size_t prompts, int group_size, int dim,
                                                    double angular_noise, std::uint64_t seed) {
    check_shape(prompts, group_size, dim);
    if (!std::isfinite(angular_noise) || angular_noise < 0.0) {
        throw ValidationError("angular_noise must be finite and >= 0");
    }
    std::vector<CompletionGroup> groups;
    groups.reserve(prompts);
    for (std::size_t p = 0; p < prompts; ++p) {
        RandomStream rng(derive_seed(seed, kMonotoneStream, p));
        const Embedding anchor = unit_normal(rng, dim);
        // Unit direction orthogonal to the anchor; the arc coordinate t
        // moves completions along it.
        Embedding across{rng.normal_vector(static_cast<std::size_t>(dim))};
        const double overlap = dot(across, anchor);
        for (std::size_t k = 0; k < across.values.size(); ++k) {
            across.values[k] -= overlap * anchor.values[k];
        }
        across = across.normalized();

        CompletionGroup group = shell(p, group_size);
        for (int i = 0; i < group_size; ++i) {
            const double t = rng.uniform(0.2, 1.2);
            std::vector<double> v(static_cast<std::size_t>(dim));
            const std::vector<double> jostle = rng.normal_vector(static_cast<std::size_t>(dim));
            for (std::size_t k = 0; k < v.size(); ++k) {
                v[k] = anchor.values[k] + t * across.values[k] + angular_noise * jostle[k];
            }
            const Embedding e = Embedding{std::move(v)}.normalized();
            group.rewards.push_back(2.0 - (1.0 - dot(e, anchor)));
            group.embeddings.push_back(e);
        }
        groups.push_back(validate_group(group));
    }
    return groups;
}

}  // namespace dra
