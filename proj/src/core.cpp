#include "dra/core.hpp"

#include <cmath>

namespace dra {

namespace {

constexpr double kZeroNormThreshold = 1e-12;
// Vectors whose norm is already this close to 1 are left untouched, which
// keeps renormalization exactly idempotent and round-trip stable.
constexpr double kUnitSlack = 1e-10;

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

double Embedding::norm() const {
    double s = 0.0;
    for (double x : values) s += x * x;
    return std::sqrt(s);
}

Embedding Embedding::normalized() const {
    const double n = norm();
    if (std::abs(n - 1.0) <= kUnitSlack) return *this;
    Embedding out = *this;
    for (double& x : out.values) x /= n;
    return out;
}

double dot(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("dot: embedding dimensions differ (" + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) s += a.values[k] * b.values[k];
    return s;
}

SimilarityMatrix SimilarityMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t g = rows.size();
    SimilarityMatrix m(g);
    for (std::size_t i = 0; i < g; ++i) {
        if (rows[i].size() != g) {
            throw ValidationError("similarity matrix row " + std::to_string(i) + " has length " + std::to_string(rows[i].size()) + ", expected " + std::to_string(g));
        }
        for (std::size_t j = 0; j < g; ++j) m.entries_[i * g + j] = rows[i][j];
    }
    m.validate();
    return m;
}

void SimilarityMatrix::validate() const {
    constexpr double tol = 1e-9;
    for (std::size_t i = 0; i < g_; ++i) {
        const double d = (*this)(i, i);
        if (!(std::abs(d - 1.0) <= tol)) {
            throw ValidationError("similarity matrix diagonal entry " + std::to_string(i) + " is " + std::to_string(d) + ", expected 1");
        }
        for (std::size_t j = 0; j < g_; ++j) {
            const double v = (*this)(i, j);
            if (!std::isfinite(v) || v < -1.0 - tol || v > 1.0 + tol) {
                throw ValidationError("similarity matrix entry (" + std::to_string(i) + "," + std::to_string(j) + ") out of range: " + std::to_string(v));
            }
            if (std::abs(v - (*this)(j, i)) > tol) {
                throw ValidationError("similarity matrix not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

CompletionGroup validate_group(CompletionGroup group) {
    const std::size_t g = group.rewards.size();
    if (group.completion_ids.size() != g || group.embeddings.size() != g) {
        throw DimensionMismatch("group '" + group.prompt_id + "': completion_ids/rewards/embeddings lengths disagree");
    }
    if (!group.texts.empty() && group.texts.size() != g) {
        throw DimensionMismatch("group '" + group.prompt_id + "': texts length " + std::to_string(group.texts.size()) + " does not match group size " + std::to_string(g));
    }
    if (g < 2) {
        throw GroupTooSmall("group '" + group.prompt_id + "' has " + std::to_string(g) + " completion(s), need at least 2");
    }
    if (!all_finite(group.rewards)) {
        throw NonFiniteValue("group '" + group.prompt_id + "': non-finite reward");
    }
    const std::size_t d = group.embeddings.front().dim();
    if (d == 0) {
        throw DimensionMismatch("group '" + group.prompt_id + "': empty embedding");
    }
    for (std::size_t i = 0; i < g; ++i) {
        Embedding& e = group.embeddings[i];
        if (e.dim() != d) {
            throw DimensionMismatch("group '" + group.prompt_id + "': embedding " + std::to_string(i) + " has dimension " + std::to_string(e.dim()) + ", expected " + std::to_string(d));
        }
        if (!all_finite(e.values)) {
            throw NonFiniteValue("group '" + group.prompt_id + "': non-finite embedding entry in completion " + std::to_string(i));
        }
        const double n = e.norm();
        if (n < kZeroNormThreshold) {
            throw ZeroNormEmbedding("group '" + group.prompt_id + "': embedding " + std::to_string(i) + " has norm " + std::to_string(n));
        }
        e = e.normalized();
    }
    return group;
}

}  // namespace dra
