#include "dra/smi.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "dra/errors.hpp"

namespace dra {
namespace {

constexpr std::size_t kFullMatrix = std::numeric_limits<std::size_t>::max();

void check_jitter(double jitter) {
    if (!std::isfinite(jitter) || jitter < 0.0 || jitter > 1e-3) {
        throw ValidationError("jitter must lie in [0, 1e-3], got " + std::to_string(jitter));
    }
}

// In-place lower Cholesky on a row-major buffer; only the lower triangle is
// referenced. Returns false on a non-positive pivot instead of throwing so
// callers can escalate the jitter.
bool cholesky_logdet(std::vector<double>& a, std::size_t n, double& out) {
    double half_logdet = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double d = a[k * n + k];
        for (std::size_t j = 0; j < k; ++j) d -= a[k * n + j] * a[k * n + j];
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double pivot = std::sqrt(d);
        a[k * n + k] = pivot;
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = a[i * n + k];
            for (std::size_t j = 0; j < k; ++j) v -= a[i * n + j] * a[k * n + j];
            a[i * n + k] = v / pivot;
        }
        half_logdet += std::log(pivot);
    }
    out = 2.0 * half_logdet;
    return true;
}

// Log-determinant of (matrix + jitter*I) with row/column `skip` removed;
// skip == kFullMatrix keeps the whole matrix.
bool jittered_logdet(const SimilarityMatrix& matrix, std::size_t skip, double jitter,
                     double& out) {
    const std::size_t g = matrix.size();
    const std::size_t n = (skip == kFullMatrix) ? g : g - 1;
    std::vector<double> a(n * n);
    std::size_t r = 0;
    for (std::size_t i = 0; i < g; ++i) {
        if (i == skip) continue;
        std::size_t c = 0;
        for (std::size_t j = 0; j < g; ++j) {
            if (j == skip) continue;
            a[r * n + c] = matrix(i, j) + (i == j ? jitter : 0.0);
            ++c;
        }
        ++r;
    }
    return cholesky_logdet(a, n, out);
}

// Picks the jitter level that makes the full kernel factorizable: the
// requested value first, then a single retry at 1e-6. Leave-one-out minors
// inherit the resolved level so both log-determinants see the same kernel.
double resolve_jitter(const SimilarityMatrix& matrix, double jitter, double& full_logdet) {
    if (jittered_logdet(matrix, kFullMatrix, jitter, full_logdet)) return jitter;
    if (jitter < 1e-6 && jittered_logdet(matrix, kFullMatrix, 1e-6, full_logdet)) return 1e-6;
    throw NotPositiveDefinite("similarity matrix is not positive definite after jitter");
}

double minor_logdet(const SimilarityMatrix& matrix, std::size_t i, double jitter) {
    double out = 0.0;
    if (!jittered_logdet(matrix, i, jitter, out)) {
        throw NotPositiveDefinite("leave-one-out similarity minor is not positive definite");
    }
    return out;
}

}  // namespace

SimilarityMatrix cosine_similarity_matrix(const std::vector<Embedding>& embeddings) {
    const std::size_t g = embeddings.size();
    SimilarityMatrix matrix(g);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = i + 1; j < g; ++j) {
            matrix.set(i, j, dot(embeddings[i], embeddings[j]));
        }
    }
    return matrix;
}

double graph_cut_smi(const SimilarityMatrix& matrix, std::size_t i) {
    const std::size_t g = matrix.size();
    if (i >= g) {
        throw IndexOutOfRange("completion index " + std::to_string(i) +
                              " out of range for group of " + std::to_string(g));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
        if (j != i) sum += matrix(i, j);
    }
    return sum;
}

std::vector<double> graph_cut_row_sums(const SimilarityMatrix& matrix) {
    const std::size_t g = matrix.size();
    std::vector<double> sums(g);
    for (std::size_t i = 0; i < g; ++i) {
        // Off-diagonal terms in ascending order, unit diagonal added last:
        // this reproduces graph_cut_smi(matrix, i) + 1.0 bit for bit.
        double sum = 0.0;
        for (std::size_t j = 0; j < g; ++j) {
            if (j != i) sum += matrix(i, j);
        }
        sums[i] = sum + 1.0;
    }
    return sums;
}

double logdet_smi(const SimilarityMatrix& matrix, std::size_t i, double jitter) {
    check_jitter(jitter);
    const std::size_t g = matrix.size();
    if (i >= g) {
        throw IndexOutOfRange("completion index " + std::to_string(i) +
                              " out of range for group of " + std::to_string(g));
    }
    double full = 0.0;
    const double level = resolve_jitter(matrix, jitter, full);
    return minor_logdet(matrix, i, level) - full;
}

std::vector<double> logdet_smi_all(const SimilarityMatrix& matrix, double jitter) {
    check_jitter(jitter);
    const std::size_t g = matrix.size();
    double full = 0.0;
    const double level = resolve_jitter(matrix, jitter, full);
    std::vector<double> out(g);
    for (std::size_t i = 0; i < g; ++i) {
        out[i] = minor_logdet(matrix, i, level) - full;
    }
    return out;
}

}  // namespace dra
