#include <doctest.h>

#include <cmath>
#include <vector>

#include "dra/core.hpp"

using namespace dra;

namespace {

CompletionGroup make_group(std::vector<double> rewards,
                           std::vector<std::vector<double>> embeddings) {
    CompletionGroup g;
    g.prompt_id = "p0";
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        g.completion_ids.push_back("c" + std::to_string(i));
    }
    g.rewards = std::move(rewards);
    for (auto& e : embeddings) g.embeddings.emplace_back(std::move(e));
    return g;
}

}  // namespace

TEST_CASE("embedding normalization") {
    SUBCASE("3-4-5 triangle lands on exact coordinates") {
        const Embedding e{{3.0, 4.0}};
        const Embedding n = e.normalized();
        CHECK(n.values[0] == 0.6);
        CHECK(n.values[1] == 0.8);
    }

    SUBCASE("idempotent: normalizing twice is bit-identical") {
        const Embedding e{{0.3, -1.7, 2.9, 0.01}};
        const Embedding once = e.normalized();
        const Embedding twice = once.normalized();
        REQUIRE(once.dim() == twice.dim());
        for (std::size_t i = 0; i < once.dim(); ++i) {
            CHECK(once.values[i] == twice.values[i]);
        }
        CHECK(std::abs(once.norm() - 1.0) < 1e-12);
    }

    SUBCASE("power-of-two scaling does not move the result") {
        const Embedding e{{0.125, -2.25, 17.0}};
        Embedding scaled = e;
        for (auto& v : scaled.values) v *= 4.0;
        const Embedding a = e.normalized();
        const Embedding b = scaled.normalized();
        for (std::size_t i = 0; i < a.dim(); ++i) CHECK(a.values[i] == b.values[i]);
    }

    SUBCASE("general positive scaling agrees within 1e-15") {
        const Embedding e{{1.0, 2.0, -0.5}};
        Embedding scaled = e;
        for (auto& v : scaled.values) v *= 3.7;
        const Embedding a = e.normalized();
        const Embedding b = scaled.normalized();
        for (std::size_t i = 0; i < a.dim(); ++i) {
            CHECK(std::abs(a.values[i] - b.values[i]) < 1e-15);
        }
    }
}

TEST_CASE("dot product") {
    const Embedding a{{1.0, 0.0}};
    const Embedding b{{0.0, 1.0}};
    const Embedding c{{0.6, 0.8}};
    CHECK(dot(a, b) == 0.0);
    CHECK(dot(a, c) == 0.6);
    CHECK(dot(c, c) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(dot(a, Embedding{{1.0, 0.0, 0.0}}), DimensionMismatch);
}

TEST_CASE("validate_group accepts a well-formed group and renormalizes") {
    auto g = make_group({1.0, 0.0}, {{3.0, 4.0}, {0.0, 2.0}});
    const CompletionGroup v = validate_group(g);
    CHECK(v.size() == 2);
    CHECK(v.embeddings[0].values[0] == 0.6);
    CHECK(v.embeddings[0].values[1] == 0.8);
    CHECK(v.embeddings[1].values[0] == 0.0);
    CHECK(v.embeddings[1].values[1] == 1.0);

    // Idempotence: a validated group passes through unchanged.
    const CompletionGroup w = validate_group(v);
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t d = 0; d < v.embeddings[i].dim(); ++d) {
            CHECK(w.embeddings[i].values[d] == v.embeddings[i].values[d]);
        }
    }
}

TEST_CASE("validate_group error taxonomy") {
    SUBCASE("fewer than two completions") {
        auto g = make_group({1.0}, {{1.0, 0.0}});
        CHECK_THROWS_AS(validate_group(g), GroupTooSmall);
    }
    SUBCASE("zero-norm embedding") {
        auto g = make_group({1.0, 0.0}, {{1.0, 0.0}, {0.0, 0.0}});
        CHECK_THROWS_AS(validate_group(g), ZeroNormEmbedding);
    }
    SUBCASE("non-finite reward") {
        auto g = make_group({1.0, std::nan("")}, {{1.0, 0.0}, {0.0, 1.0}});
        CHECK_THROWS_AS(validate_group(g), NonFiniteValue);
    }
    SUBCASE("non-finite embedding entry") {
        auto g = make_group({1.0, 0.0}, {{1.0, 0.0}, {INFINITY, 1.0}});
        CHECK_THROWS_AS(validate_group(g), NonFiniteValue);
    }
    SUBCASE("embedding dimensions disagree") {
        auto g = make_group({1.0, 0.0}, {{1.0, 0.0}, {0.0, 1.0}});
        g.embeddings[1] = Embedding{{0.0, 1.0, 0.0}};
        CHECK_THROWS_AS(validate_group(g), DimensionMismatch);
    }
    SUBCASE("parallel array lengths disagree") {
        auto g = make_group({1.0, 0.0}, {{1.0, 0.0}, {0.0, 1.0}});
        g.rewards.push_back(0.5);
        CHECK_THROWS_AS(validate_group(g), DimensionMismatch);
    }
}

TEST_CASE("similarity matrix") {
    SUBCASE("fresh matrix has a unit diagonal and set mirrors") {
        SimilarityMatrix m(3);
        CHECK(m(0, 0) == 1.0);
        CHECK(m(2, 2) == 1.0);
        m.set(0, 2, 0.25);
        CHECK(m(0, 2) == 0.25);
        CHECK(m(2, 0) == 0.25);
        m.validate();
    }

    SUBCASE("from_rows round trip") {
        const auto m = SimilarityMatrix::from_rows({{1.0, 0.6}, {0.6, 1.0}});
        CHECK(m.size() == 2);
        CHECK(m(0, 1) == 0.6);
    }

    SUBCASE("from_rows rejects ragged input") {
        CHECK_THROWS_AS(SimilarityMatrix::from_rows({{1.0, 0.6}, {0.6}}), ValidationError);
    }
    SUBCASE("validate rejects asymmetry") {
        SimilarityMatrix m(2);
        // Bypass set's mirroring via from_rows with unequal off-diagonals.
        CHECK_THROWS_AS(SimilarityMatrix::from_rows({{1.0, 0.5}, {0.4, 1.0}}),
                        ValidationError);
    }
    SUBCASE("validate rejects a non-unit diagonal") {
        CHECK_THROWS_AS(SimilarityMatrix::from_rows({{0.9, 0.5}, {0.5, 1.0}}),
                        ValidationError);
    }
    SUBCASE("validate rejects entries outside [-1, 1]") {
        CHECK_THROWS_AS(SimilarityMatrix::from_rows({{1.0, 1.5}, {1.5, 1.0}}),
                        ValidationError);
    }
}
