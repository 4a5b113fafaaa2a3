#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dra/adjust.hpp"
#include "dra/random.hpp"

using namespace dra;

namespace {

const SmiKind kGraphCut{SmiVariant::GraphCut, 0.0};
const SmiKind kLogDetNoJitter{SmiVariant::LogDet, 0.0};

// Nonnegative random unit embeddings: cosine similarities all in [0, 1],
// so graph-cut denominators stay positive.
std::vector<Embedding> nonneg_embeddings(std::size_t g, std::size_t dim, RandomStream& rng) {
    std::vector<Embedding> out;
    for (std::size_t i = 0; i < g; ++i) {
        Embedding e{rng.normal_vector(dim)};
        for (auto& v : e.values) v = std::abs(v);
        out.push_back(e.normalized());
    }
    return out;
}

}  // namespace

TEST_CASE("graph-cut weights on fixtures") {
    SUBCASE("identical pair halves the reward") {
        const auto m = SimilarityMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
        const auto w = dra_weights(m, kGraphCut, 0.0);
        CHECK(w.values[0] == 0.5);
        CHECK(w.values[1] == 0.5);
    }

    SUBCASE("0.6-similar pair weighs 0.625, reward 2 adjusts to 1.25") {
        const auto m = SimilarityMatrix::from_rows({{1.0, 0.6}, {0.6, 1.0}});
        const auto w = dra_weights(m, kGraphCut, 0.0);
        CHECK(w.values[0] == 0.625);
        CHECK(w.values[1] == 0.625);
        const auto adjusted = adjust_rewards({2.0, 2.0}, w);
        CHECK(adjusted[0] == 1.25);
        CHECK(adjusted[1] == 1.25);
    }

    SUBCASE("orthogonal group keeps rewards intact") {
        SimilarityMatrix m(4);
        const auto w = dra_weights(m, kGraphCut, 0.0);
        for (double v : w.values) CHECK(v == 1.0);
        const std::vector<double> rewards = {0.3, -1.2, 2.782, 0.0};
        const auto adjusted = adjust_rewards(rewards, w);
        for (std::size_t i = 0; i < rewards.size(); ++i) CHECK(adjusted[i] == rewards[i]);
    }

    SUBCASE("six identical completions with reward 3 adjust to 0.5") {
        SimilarityMatrix m(6);
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = i + 1; j < 6; ++j) m.set(i, j, 1.0);
        }
        const auto w = dra_weights(m, kGraphCut, 0.0);
        const auto adjusted = adjust_rewards(std::vector<double>(6, 3.0), w);
        for (double v : adjusted) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("log-det weights on fixtures") {
    SUBCASE("orthogonal group keeps rewards intact at zero jitter") {
        SimilarityMatrix m(3);
        const auto w = dra_weights(m, kLogDetNoJitter, 0.0);
        for (double v : w.values) CHECK(v == 1.0);
    }

    SUBCASE("correlated pair shrinks below 1") {
        const auto m = SimilarityMatrix::from_rows({{1.0, 0.6}, {0.6, 1.0}});
        const auto w = dra_weights(m, kLogDetNoJitter, 0.0);
        // 1 / (1 - log(0.64))
        CHECK(w.values[0] == doctest::Approx(0.69142564998515399).epsilon(1e-12));
        CHECK(w.values[0] == w.values[1]);
    }
}

TEST_CASE("duplicate mass splits the reward across copies") {
    // 3 copies of A, 2 of B, 1 of C on orthogonal centers: the adjusted
    // rewards sum to one R per distinct item.
    const std::vector<Embedding> basis = {Embedding{{1.0, 0.0, 0.0}},
                                          Embedding{{0.0, 1.0, 0.0}},
                                          Embedding{{0.0, 0.0, 1.0}}};
    std::vector<Embedding> group = {basis[0], basis[0], basis[0], basis[1], basis[1], basis[2]};
    const std::vector<double> rewards = {5.0, 5.0, 5.0, 2.0, 2.0, 7.0};
    const auto m = cosine_similarity_matrix(group);
    const auto w = dra_weights(m, kGraphCut, 0.0);
    const auto adjusted = adjust_rewards(rewards, w);
    const double total = std::accumulate(adjusted.begin(), adjusted.end(), 0.0);
    CHECK(total == doctest::Approx(5.0 + 2.0 + 7.0).epsilon(1e-12));
    // Each copy carries R/multiplicity.
    CHECK(adjusted[0] == doctest::Approx(5.0 / 3).epsilon(1e-12));
    CHECK(adjusted[3] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(adjusted[5] == 7.0);
}

TEST_CASE("weight properties on random nonnegative geometry") {
    RandomStream rng(1234);

    SUBCASE("weights lie in (0, 1] and are finite") {
        for (int rep = 0; rep < 30; ++rep) {
            const auto e = nonneg_embeddings(2 + rep % 10, 6, rng);
            const auto m = cosine_similarity_matrix(e);
            const auto w = dra_weights(m, kGraphCut, 1e-6);
            for (double v : w.values) {
                CHECK(v > 0.0);
                CHECK(v <= 1.0);
            }
        }
    }

    SUBCASE("permuting the group permutes the weights") {
        const auto e = nonneg_embeddings(7, 6, rng);
        const auto m = cosine_similarity_matrix(e);
        const auto w = dra_weights(m, kGraphCut, 1e-6);

        std::vector<std::size_t> perm(7);
        std::iota(perm.begin(), perm.end(), 0);
        std::reverse(perm.begin(), perm.begin() + 5);
        std::vector<Embedding> permuted;
        for (auto i : perm) permuted.push_back(e[i]);
        const auto wp = dra_weights(cosine_similarity_matrix(permuted), kGraphCut, 1e-6);
        for (std::size_t i = 0; i < perm.size(); ++i) {
            CHECK(wp.values[i] == doctest::Approx(w.values[perm[i]]).epsilon(1e-12));
        }
    }

    SUBCASE("raising one similarity strictly lowers that item's weight") {
        auto rows = std::vector<std::vector<double>>{
            {1.0, 0.2, 0.1}, {0.2, 1.0, 0.3}, {0.1, 0.3, 1.0}};
        const auto w0 = dra_weights(SimilarityMatrix::from_rows(rows), kGraphCut, 1e-6);
        rows[0][1] = rows[1][0] = 0.6;
        const auto w1 = dra_weights(SimilarityMatrix::from_rows(rows), kGraphCut, 1e-6);
        CHECK(w1.values[0] < w0.values[0]);
        CHECK(w1.values[1] < w0.values[1]);
        CHECK(w1.values[2] == w0.values[2]);
    }

    SUBCASE("equal redundancy preserves reward ordering") {
        const auto m = SimilarityMatrix::from_rows(
            {{1.0, 0.4, 0.0}, {0.4, 1.0, 0.4}, {0.0, 0.4, 1.0}});
        // Rows 0 and 2 share the same row sum; their rewards keep their order.
        const auto w = dra_weights(m, kGraphCut, 1e-6);
        const auto adjusted = adjust_rewards({1.0, 5.0, 3.0}, w);
        CHECK(adjusted[0] < adjusted[2]);
    }
}

TEST_CASE("adjustment rejects bad input") {
    SUBCASE("negative total similarity is an error, not a clamp") {
        const auto m = SimilarityMatrix::from_rows({{1.0, -0.9, -0.9},
                                                    {-0.9, 1.0, 0.8},
                                                    {-0.9, 0.8, 1.0}});
        CHECK_THROWS_AS(dra_weights(m, kGraphCut, 0.0), NonPositiveDenominator);
    }

    SUBCASE("negative epsilon") {
        SimilarityMatrix m(2);
        CHECK_THROWS_AS(dra_weights(m, kGraphCut, -1e-9), ValidationError);
    }

    SUBCASE("reward/weight length mismatch") {
        SimilarityMatrix m(3);
        const auto w = dra_weights(m, kGraphCut, 0.0);
        CHECK_THROWS_AS(adjust_rewards({1.0, 2.0}, w), LengthMismatch);
    }
}
