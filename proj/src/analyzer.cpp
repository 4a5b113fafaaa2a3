#include "dra/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "dra/errors.hpp"
#include "dra/random.hpp"
#include "dra/smi.hpp"

namespace dra {
namespace {

bool is_constant(const std::vector<double>& values) {
    for (double v : values) {
        if (v != values.front()) return false;
    }
    return true;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double cov = 0.0, var_x = 0.0, var_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    return cov / std::sqrt(var_x * var_y);
}

double t_approx_p_value(double rho, std::size_t n) {
    const double denom = 1.0 - rho * rho;
    if (denom <= 0.0) return 0.0;
    const double t = rho * std::sqrt(static_cast<double>(n - 2) / denom);
    const boost::math::students_t dist(static_cast<double>(n - 2));
    return 2.0 * boost::math::cdf(dist, -std::abs(t));
}

// Permutation statistic: Pearson-of-ranks is a fixed affine function of
// S = sum rx[i]*ry[perm[i]] because rank means and variances are
// permutation-invariant, so two-sidedness in rho is |S - c| >= |S_obs - c|
// with c = n*((n+1)/2)^2. Midranks are exact multiples of 0.5, so every S
// is an exact multiple of 0.25 and the comparisons below are exact.
struct PermutationCounter {
    const std::vector<double>& rx;
    std::vector<double>& ry;
    double threshold;  // |S_obs - c|
    double center;
    std::size_t hits = 0;

    void run(std::size_t level, double partial) {
        const std::size_t n = rx.size();
        if (level == n) {
            if (std::abs(partial - center) >= threshold) ++hits;
            return;
        }
        for (std::size_t k = level; k < n; ++k) {
            std::swap(ry[level], ry[k]);
            run(level + 1, partial + rx[level] * ry[level]);
            std::swap(ry[level], ry[k]);
        }
    }
};

double permutation_p_value(const std::vector<double>& rx, const std::vector<double>& ry,
                           std::uint64_t seed, std::size_t mc_permutations) {
    const std::size_t n = rx.size();
    const double mean = (static_cast<double>(n) + 1.0) / 2.0;
    const double center = static_cast<double>(n) * mean * mean;
    double s_obs = 0.0;
    for (std::size_t i = 0; i < n; ++i) s_obs += rx[i] * ry[i];
    const double threshold = std::abs(s_obs - center);

    if (n <= 10) {
        std::vector<double> scratch = ry;
        PermutationCounter counter{rx, scratch, threshold, center};
        counter.run(0, 0.0);
        double total = 1.0;
        for (std::size_t k = 2; k <= n; ++k) total *= static_cast<double>(k);
        return static_cast<double>(counter.hits) / total;
    }

    RandomStream rng(derive_seed(seed, 0x7065726dULL, 0));
    std::vector<double> shuffled = ry;
    std::size_t hits = 0;
    for (std::size_t trial = 0; trial < mc_permutations; ++trial) {
        rng.shuffle(shuffled);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += rx[i] * shuffled[i];
        if (std::abs(s - center) >= threshold) ++hits;
    }
    return (1.0 + static_cast<double>(hits)) / (1.0 + static_cast<double>(mc_permutations));
}

}  // namespace

PairwiseDistances pairwise_distances(const CompletionGroup& group) {
    const std::size_t g = group.size();
    if (g < 3) {
        throw GroupTooSmall("pairwise analysis needs at least 3 completions, got " +
                            std::to_string(g));
    }
    PairwiseDistances out;
    out.reward_diffs.reserve(g * (g - 1) / 2);
    out.embed_dists.reserve(g * (g - 1) / 2);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = i + 1; j < g; ++j) {
            out.reward_diffs.push_back(std::abs(group.rewards[i] - group.rewards[j]));
            out.embed_dists.push_back(1.0 - dot(group.embeddings[i], group.embeddings[j]));
        }
    }
    return out;
}

std::vector<double> rank_with_ties(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // Positions i..j (0-based) tie; midrank is the average 1-based position.
        const double midrank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = midrank;
        i = j + 1;
    }
    return ranks;
}

SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y,
                        PValueMethod method, std::uint64_t seed, std::size_t mc_permutations) {
    if (x.size() != y.size()) {
        throw LengthMismatch("spearman inputs of length " + std::to_string(x.size()) + " and " +
                             std::to_string(y.size()));
    }
    if (x.size() < 3) {
        throw ValidationError("spearman needs at least 3 paired samples, got " +
                              std::to_string(x.size()));
    }
    SpearmanResult result;
    result.method = method;
    if (is_constant(x) || is_constant(y)) {
        result.rho = 0.0;
        result.p_value = 1.0;
        result.degenerate = true;
        return result;
    }
    const std::vector<double> rx = rank_with_ties(x);
    const std::vector<double> ry = rank_with_ties(y);
    result.rho = std::clamp(pearson(rx, ry), -1.0, 1.0);
    if (method == PValueMethod::TApprox) {
        result.p_value = t_approx_p_value(result.rho, x.size());
    } else {
        result.p_value = permutation_p_value(rx, ry, seed, mc_permutations);
    }
    return result;
}

AnalysisReport analyze_dataset(const std::vector<CompletionGroup>& groups, double alpha,
                               PValueMethod method, std::uint64_t seed) {
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0) {
        throw ValidationError("alpha must lie in (0, 1)");
    }
    AnalysisReport report;
    report.histogram.resize(20);
    for (std::size_t b = 0; b < 20; ++b) {
        report.histogram[b].left = static_cast<double>(b) / 20.0;
        report.histogram[b].right = static_cast<double>(b + 1) / 20.0;
    }
    std::size_t insignificant = 0;
    std::size_t degenerate = 0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        try {
            const CompletionGroup group = validate_group(groups[gi]);
            const PairwiseDistances dists = pairwise_distances(group);
            const SpearmanResult stat = spearman(dists.reward_diffs, dists.embed_dists, method,
                                                 derive_seed(seed, gi, 0));
            AnalysisRecord record;
            record.prompt_id = group.prompt_id;
            record.n_completions = group.size();
            record.n_pairs = dists.reward_diffs.size();
            record.rho = stat.rho;
            record.p_value = stat.p_value;
            record.degenerate = stat.degenerate;
            record.method = stat.method;
            report.records.push_back(record);
            if (record.p_value > alpha) ++insignificant;
            if (record.degenerate) ++degenerate;
            const std::size_t bin =
                std::min<std::size_t>(19, static_cast<std::size_t>(record.p_value * 20.0));
            ++report.histogram[bin].count;
        } catch (const Error& e) {
            report.group_errors.push_back(groups[gi].prompt_id + ": " + e.what());
        }
    }
    if (report.records.empty()) {
        throw EmptyDataset("no analyzable completion groups in input");
    }
    const double n = static_cast<double>(report.records.size());
    report.fraction_insignificant = static_cast<double>(insignificant) / n;
    report.fraction_degenerate = static_cast<double>(degenerate) / n;
    return report;
}

}  // namespace dra
