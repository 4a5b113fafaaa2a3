#pragma once

#include <vector>

#include "dra/core.hpp"
#include "dra/smi.hpp"

namespace dra {

// Per-completion multiplicative reward factors, 1/(1 + SMI + epsilon) up to
// the variant's bookkeeping. All values are finite and positive; for the
// graph-cut variant on nonnegative similarities they lie in (0, 1].
struct DraWeights {
    std::vector<double> values;
    SmiKind kind;
    double epsilon = 1e-6;
};

// Derives diversity weights from a similarity matrix.
// GraphCut: 1/(row_sum_i + epsilon); the unit self-similarity inside the
// row sum supplies the "1 +" of the adjustment rule. LogDet:
// 1/(1 + logdet_smi_i + epsilon). A non-positive denominator rejects the
// whole group (NonPositiveDenominator); it is never clamped, since that
// would silently change the estimator.
DraWeights dra_weights(const SimilarityMatrix& matrix, const SmiKind& kind, double epsilon);

// Applies the weights: result[i] = rewards[i] * weights.values[i].
std::vector<double> adjust_rewards(const std::vector<double>& rewards,
                                   const DraWeights& weights);

}  // namespace dra
