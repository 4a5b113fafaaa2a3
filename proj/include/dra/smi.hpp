#pragma once

#include <vector>

#include "dra/core.hpp"

namespace dra {

enum class SmiVariant { GraphCut, LogDet };

// Selects the submodular-mutual-information instantiation used to score a
// completion's redundancy against the rest of its group. jitter is the
// diagonal regularizer applied before factorization (LogDet only).
struct SmiKind {
    SmiVariant variant = SmiVariant::GraphCut;
    double jitter = 1e-8;
};

// Cosine kernel matrix of a validated group of unit-norm embeddings.
// entries[i][j] = dot(e_i, e_j); the diagonal is exactly 1.
SimilarityMatrix cosine_similarity_matrix(const std::vector<Embedding>& embeddings);

// Graph-Cut SMI of item i against the rest of the group: the total
// similarity sum over j != i. Zero for an orthogonal group.
double graph_cut_smi(const SimilarityMatrix& matrix, std::size_t i);

// Full row sums of the similarity matrix, one pass over the entries.
// row_sums[i] == graph_cut_smi(matrix, i) + 1 (the unit self-similarity).
std::vector<double> graph_cut_row_sums(const SimilarityMatrix& matrix);

// LogDet SMI of item i: logdet of the kernel with row/column i removed
// minus logdet of the full kernel (the 1x1 self block contributes zero).
// Both log-determinants are taken on (L + jitter*I) via Cholesky, with the
// minor inheriting whichever jitter level let the full kernel factorize:
// the requested value first, then one retry at 1e-6. A second failure
// throws NotPositiveDefinite. Nonnegative for positive-definite kernels.
double logdet_smi(const SimilarityMatrix& matrix, std::size_t i, double jitter);

// LogDet SMI for every item, sharing the single full-matrix factorization
// across all G leave-one-out terms.
std::vector<double> logdet_smi_all(const SimilarityMatrix& matrix, double jitter);

}  // namespace dra
