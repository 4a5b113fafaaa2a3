#pragma once

#include <string>
#include <vector>

#include "dra/errors.hpp"

namespace dra {

// A completion's semantic embedding. The library always works with
// unit-norm vectors; validate_group / normalized() own the normalization.
struct Embedding {
    std::vector<double> values;

    Embedding() = default;
    explicit Embedding(std::vector<double> v) : values(std::move(v)) {}

    std::size_t dim() const { return values.size(); }
    double norm() const;

    // L2-normalized copy. Vectors already unit within 1e-10 are returned
    // unchanged, which makes normalization exactly idempotent.
    Embedding normalized() const;
};

double dot(const Embedding& a, const Embedding& b);

// One prompt's G sampled completions with scalar rewards and embeddings.
// This is the unit over which advantages and diversity weights are computed.
struct CompletionGroup {
    std::string prompt_id;
    std::vector<std::string> completion_ids;
    std::vector<double> rewards;
    std::vector<Embedding> embeddings;
    std::vector<std::string> texts;  // optional; empty or one per completion

    std::size_t size() const { return rewards.size(); }
};

// G x G symmetric cosine-kernel matrix with unit diagonal, stored dense
// row-major. Construction via from_rows validates the invariants; the
// kernel builder in smi.hpp produces valid matrices by construction.
class SimilarityMatrix {
public:
    explicit SimilarityMatrix(std::size_t g) : g_(g), entries_(g * g, 0.0) {
        for (std::size_t i = 0; i < g; ++i) entries_[i * g + i] = 1.0;
    }

    static SimilarityMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const { return g_; }

    double operator()(std::size_t i, std::size_t j) const { return entries_[i * g_ + j]; }

    // Sets both (i,j) and (j,i).
    void set(std::size_t i, std::size_t j, double v) {
        entries_[i * g_ + j] = v;
        entries_[j * g_ + i] = v;
    }

    const std::vector<double>& entries() const { return entries_; }

    // Throws ValidationError unless symmetric within 1e-9, unit diagonal
    // within 1e-9, and all entries within [-1-1e-9, 1+1e-9].
    void validate() const;

private:
    std::size_t g_;
    std::vector<double> entries_;
};

enum class AdvantageMode { Grpo, DrGrpo };

// Per-completion group-relative advantages (constant across tokens of a
// completion). mean(values) == 0; under Grpo with non-constant rewards the
// population std of values is 1.
struct AdvantageVector {
    std::vector<double> values;
    AdvantageMode mode = AdvantageMode::Grpo;
};

// Validates a group and returns it with embeddings renormalized to unit
// norm. Throws GroupTooSmall, ZeroNormEmbedding, NonFiniteValue, or
// DimensionMismatch. Idempotent: validating twice equals validating once.
CompletionGroup validate_group(CompletionGroup group);

}  // namespace dra
