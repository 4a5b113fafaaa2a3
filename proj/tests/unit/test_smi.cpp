#include <doctest.h>

#include <cmath>
#include <vector>

#include "dra/random.hpp"
#include "dra/smi.hpp"

using namespace dra;

namespace {

// Random valid similarity matrix via a random Gram construction.
SimilarityMatrix random_similarity(std::size_t g, std::size_t dim, RandomStream& rng) {
    std::vector<Embedding> embeddings;
    for (std::size_t i = 0; i < g; ++i) {
        Embedding e{rng.normal_vector(dim)};
        embeddings.push_back(e.normalized());
    }
    return cosine_similarity_matrix(embeddings);
}

}  // namespace

TEST_CASE("cosine similarity matrix") {
    SUBCASE("orthonormal basis gives the identity") {
        const std::vector<Embedding> basis = {Embedding{{1.0, 0.0, 0.0}},
                                              Embedding{{0.0, 1.0, 0.0}},
                                              Embedding{{0.0, 0.0, 1.0}}};
        const auto m = cosine_similarity_matrix(basis);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(m(i, j) == (i == j ? 1.0 : 0.0));
            }
        }
    }

    SUBCASE("off-diagonals are the dot products, diagonal exactly 1") {
        const std::vector<Embedding> e = {Embedding{{1.0, 0.0}}, Embedding{{0.6, 0.8}},
                                          Embedding{{0.0, 1.0}}};
        const auto m = cosine_similarity_matrix(e);
        CHECK(m(0, 1) == 0.6);
        CHECK(m(0, 2) == 0.0);
        CHECK(m(1, 2) == 0.8);
        CHECK(m(1, 0) == 0.6);
        for (std::size_t i = 0; i < 3; ++i) CHECK(m(i, i) == 1.0);
        m.validate();
    }
}

TEST_CASE("graph-cut redundancy score") {
    SUBCASE("orthogonal group scores zero everywhere") {
        SimilarityMatrix m(4);
        for (std::size_t i = 0; i < 4; ++i) CHECK(graph_cut_smi(m, i) == 0.0);
    }

    SUBCASE("all-duplicates group scores G-1") {
        const std::size_t g = 6;
        SimilarityMatrix m(g);
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t j = i + 1; j < g; ++j) m.set(i, j, 1.0);
        }
        for (std::size_t i = 0; i < g; ++i) CHECK(graph_cut_smi(m, i) == 5.0);
    }

    SUBCASE("two-item fixture") {
        const auto m = SimilarityMatrix::from_rows({{1.0, 0.6}, {0.6, 1.0}});
        CHECK(graph_cut_smi(m, 0) == 0.6);
        CHECK(graph_cut_smi(m, 1) == 0.6);
    }

    SUBCASE("row sums equal the score plus the unit self-similarity, bit-exact") {
        RandomStream rng(41);
        for (int rep = 0; rep < 20; ++rep) {
            const std::size_t g = 2 + rep % 9;
            const auto m = random_similarity(g, g + 2, rng);
            const auto sums = graph_cut_row_sums(m);
            REQUIRE(sums.size() == g);
            for (std::size_t i = 0; i < g; ++i) {
                CHECK(sums[i] == graph_cut_smi(m, i) + 1.0);
            }
        }
    }

    SUBCASE("index out of range") {
        SimilarityMatrix m(3);
        CHECK_THROWS_AS(graph_cut_smi(m, 3), IndexOutOfRange);
    }
}

TEST_CASE("log-determinant redundancy score") {
    SUBCASE("orthogonal group scores zero at zero jitter") {
        SimilarityMatrix m(4);
        for (std::size_t i = 0; i < 4; ++i) CHECK(logdet_smi(m, i, 0.0) == 0.0);
    }

    SUBCASE("correlated pair matches -log(1 - s^2)") {
        const auto m = SimilarityMatrix::from_rows({{1.0, 0.6}, {0.6, 1.0}});
        // det = 1 - 0.36 = 0.64, minor det = 1.
        const double expect = 0.44628710262841947;  // -log(0.64)
        CHECK(logdet_smi(m, 0, 0.0) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(logdet_smi(m, 1, 0.0) == doctest::Approx(expect).epsilon(1e-12));
    }

    SUBCASE("equicorrelated triple matches log(0.75) - log(0.5)") {
        const auto m = SimilarityMatrix::from_rows(
            {{1.0, 0.5, 0.5}, {0.5, 1.0, 0.5}, {0.5, 0.5, 1.0}});
        const double expect = 0.40546510810816438;  // log(1.5)
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(logdet_smi(m, i, 0.0) == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    SUBCASE("batch variant equals the per-item one") {
        RandomStream rng(42);
        const auto m = random_similarity(6, 8, rng);
        const auto all = logdet_smi_all(m, 1e-8);
        REQUIRE(all.size() == 6);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(all[i] == doctest::Approx(logdet_smi(m, i, 1e-8)).epsilon(1e-12));
        }
    }

    SUBCASE("nonnegative for positive-definite kernels") {
        RandomStream rng(43);
        for (int rep = 0; rep < 20; ++rep) {
            const auto m = random_similarity(5, 8, rng);
            const auto all = logdet_smi_all(m, 1e-8);
            for (double v : all) CHECK(v >= -1e-8);
        }
    }

    SUBCASE("exact duplicates survive via the jitter retry") {
        const auto m = SimilarityMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0}});
        // Rank-deficient: zero jitter fails, the 1e-6 retry factorizes.
        const double v = logdet_smi(m, 0, 0.0);
        CHECK(std::isfinite(v));
        CHECK(v > 10.0);  // -log(jitter-scale determinant) is large
    }

    SUBCASE("indefinite matrix is rejected") {
        const auto m = SimilarityMatrix::from_rows({{1.0, 0.9, -0.9},
                                                    {0.9, 1.0, 0.9},
                                                    {-0.9, 0.9, 1.0}});
        CHECK_THROWS_AS(logdet_smi(m, 0, 1e-8), NotPositiveDefinite);
        CHECK_THROWS_AS(logdet_smi_all(m, 1e-8), NotPositiveDefinite);
    }

    SUBCASE("jitter outside [0, 1e-3] is rejected") {
        SimilarityMatrix m(2);
        CHECK_THROWS_AS(logdet_smi(m, 0, 0.01), ValidationError);
        CHECK_THROWS_AS(logdet_smi(m, 0, -1e-9), ValidationError);
    }

    SUBCASE("index out of range") {
        SimilarityMatrix m(3);
        CHECK_THROWS_AS(logdet_smi(m, 3, 1e-8), IndexOutOfRange);
    }
}
