#include "dra/adjust.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "dra/errors.hpp"

namespace dra {

DraWeights dra_weights(const SimilarityMatrix& matrix, const SmiKind& kind, double epsilon) {
    if (!std::isfinite(epsilon) || epsilon < 0.0) {
        throw ValidationError("epsilon must be finite and >= 0, got " + std::to_string(epsilon));
    }
    const std::size_t g = matrix.size();
    DraWeights out;
    out.kind = kind;
    out.epsilon = epsilon;
    out.values.resize(g);
    if (kind.variant == SmiVariant::GraphCut) {
        const std::vector<double> row_sums = graph_cut_row_sums(matrix);
        for (std::size_t i = 0; i < g; ++i) {
            const double denom = row_sums[i] + epsilon;
            if (!(denom > 0.0)) {
                throw NonPositiveDenominator(
                    "row sum + epsilon = " + std::to_string(denom) + " at completion " +
                    std::to_string(i) + "; embedding geometry is pathological");
            }
            out.values[i] = 1.0 / denom;
        }
    } else {
        const std::vector<double> smi = logdet_smi_all(matrix, kind.jitter);
        for (std::size_t i = 0; i < g; ++i) {
            const double denom = 1.0 + smi[i] + epsilon;
            if (!(denom > 0.0)) {
                throw NonPositiveDenominator(
                    "1 + logdet SMI + epsilon = " + std::to_string(denom) +
                    " at completion " + std::to_string(i));
            }
            out.values[i] = 1.0 / denom;
        }
    }
    return out;
}

std::vector<double> adjust_rewards(const std::vector<double>& rewards,
                                   const DraWeights& weights) {
    if (rewards.size() != weights.values.size()) {
        throw LengthMismatch("rewards length " + std::to_string(rewards.size()) +
                             " does not match weights length " +
                             std::to_string(weights.values.size()));
    }
    std::vector<double> adjusted(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        adjusted[i] = rewards[i] * weights.values[i];
    }
    return adjusted;
}

}  // namespace dra
