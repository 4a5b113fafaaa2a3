#include <doctest.h>

#include <cmath>
#include <vector>

#include "dra/advantage.hpp"
#include "dra/random.hpp"

using namespace dra;

TEST_CASE("group advantages") {
    const std::vector<double> rewards = {1.0, 0.0, 0.0, 1.0, 0.0, 0.0};

    SUBCASE("grpo fixture: hits at sqrt(2), misses at -1/sqrt(2)") {
        const auto a = group_advantages(rewards, AdvantageMode::Grpo);
        CHECK(a.mode == AdvantageMode::Grpo);
        REQUIRE(a.values.size() == 6);
        for (std::size_t i : {0, 3}) {
            CHECK(a.values[i] == doctest::Approx(1.4142135623730951).epsilon(1e-9));
        }
        for (std::size_t i : {1, 2, 4, 5}) {
            CHECK(a.values[i] == doctest::Approx(-0.70710678118654746).epsilon(1e-9));
        }
    }

    SUBCASE("drgrpo fixture: plain mean-centering") {
        const auto a = group_advantages(rewards, AdvantageMode::DrGrpo);
        CHECK(a.values[0] == doctest::Approx(1.0 - 2.0 / 6.0).epsilon(1e-15));
        CHECK(a.values[1] == doctest::Approx(-2.0 / 6.0).epsilon(1e-15));
    }

    SUBCASE("population std, not sample std") {
        const auto a = group_advantages({0.0, 2.0}, AdvantageMode::Grpo);
        CHECK(a.values[0] == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(a.values[1] == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("constant rewards give all zeros in both modes") {
        for (auto mode : {AdvantageMode::Grpo, AdvantageMode::DrGrpo}) {
            const auto a = group_advantages({3.0, 3.0, 3.0}, mode);
            for (double v : a.values) CHECK(v == 0.0);
        }
    }

    SUBCASE("grpo advantages are invariant to positive affine reward maps") {
        RandomStream rng(7);
        for (int rep = 0; rep < 25; ++rep) {
            std::vector<double> r(5);
            for (auto& v : r) v = rng.uniform(-2.0, 2.0);
            const auto base = group_advantages(r, AdvantageMode::Grpo);
            std::vector<double> mapped = r;
            for (auto& v : mapped) v = 3.5 * v - 11.0;
            const auto moved = group_advantages(mapped, AdvantageMode::Grpo);
            for (std::size_t i = 0; i < r.size(); ++i) {
                CHECK(moved.values[i] == doctest::Approx(base.values[i]).epsilon(1e-8));
            }
        }
    }

    SUBCASE("drgrpo advantages shift away but scale along") {
        RandomStream rng(8);
        std::vector<double> r(6);
        for (auto& v : r) v = rng.uniform(0.0, 1.0);
        const auto base = group_advantages(r, AdvantageMode::DrGrpo);
        std::vector<double> mapped = r;
        for (auto& v : mapped) v = 2.0 * v + 5.0;
        const auto moved = group_advantages(mapped, AdvantageMode::DrGrpo);
        for (std::size_t i = 0; i < r.size(); ++i) {
            CHECK(moved.values[i] == doctest::Approx(2.0 * base.values[i]).epsilon(1e-10));
        }
    }

    SUBCASE("mean of advantages is zero") {
        RandomStream rng(9);
        for (auto mode : {AdvantageMode::Grpo, AdvantageMode::DrGrpo}) {
            std::vector<double> r(8);
            for (auto& v : r) v = rng.uniform(-1.0, 4.0);
            const auto a = group_advantages(r, mode);
            double sum = 0.0;
            for (double v : a.values) sum += v;
            CHECK(std::abs(sum / 8.0) < 1e-8);
        }
    }

    SUBCASE("rejects tiny groups and non-finite rewards") {
        CHECK_THROWS_AS(group_advantages({1.0}, AdvantageMode::Grpo), GroupTooSmall);
        CHECK_THROWS_AS(group_advantages({1.0, std::nan("")}, AdvantageMode::Grpo),
                        NonFiniteValue);
    }
}

TEST_CASE("clipped surrogate term") {
    const ClipConfig cfg;  // epsilon 0.2

    SUBCASE("unit ratio passes the advantage through") {
        CHECK(clipped_surrogate(1.0, 2.5, cfg) == 2.5);
        CHECK(clipped_surrogate(1.0, -2.5, cfg) == -2.5);
    }
    SUBCASE("overshooting ratio with positive advantage clips at 1+eps") {
        CHECK(clipped_surrogate(1.5, 1.0, cfg) == doctest::Approx(1.2).epsilon(1e-15));
    }
    SUBCASE("undershooting ratio with negative advantage clips at 1-eps") {
        CHECK(clipped_surrogate(0.5, -1.0, cfg) == doctest::Approx(-0.8).epsilon(1e-15));
    }
    SUBCASE("pessimistic bound holds on random input") {
        RandomStream rng(10);
        for (int rep = 0; rep < 200; ++rep) {
            const double r = rng.uniform(0.05, 3.0);
            const double a = rng.uniform(-2.0, 2.0);
            const double s = clipped_surrogate(r, a, cfg);
            CHECK(s <= r * a + 1e-12);
            CHECK(s <= std::clamp(r, 0.8, 1.2) * a + 1e-12);
        }
    }
    SUBCASE("rejects non-positive or non-finite ratios and bad epsilon") {
        CHECK_THROWS_AS(clipped_surrogate(0.0, 1.0, cfg), NonPositiveRatio);
        CHECK_THROWS_AS(clipped_surrogate(-0.5, 1.0, cfg), NonPositiveRatio);
        CHECK_THROWS_AS(clipped_surrogate(std::nan(""), 1.0, cfg), NonPositiveRatio);
        ClipConfig bad;
        bad.epsilon = 1.0;
        CHECK_THROWS_AS(clipped_surrogate(1.0, 1.0, bad), ValidationError);
    }
}

TEST_CASE("policy gradient step") {
    SUBCASE("zero advantages leave the policy untouched") {
        ToyPolicy p(4, 2);
        p.set_logit(0, 1, 0.7);
        const std::vector<std::vector<int>> batch = {{0, 1}, {2, 3}};
        p.record_snapshot(batch);
        const ToyPolicy q = policy_gradient_step(p, batch, {0.0, 0.0}, ClipConfig{}, 0.5);
        for (std::size_t s = 0; s < p.state_count(); ++s) {
            for (int k = 0; k < 4; ++k) CHECK(q.logit(s, k) == p.logit(s, k));
        }
        CHECK_FALSE(q.has_snapshot());
    }

    SUBCASE("missing snapshot is stale") {
        ToyPolicy p(4, 2);
        CHECK_THROWS_AS(
            policy_gradient_step(p, {{0, 1}}, {1.0}, ClipConfig{}, 0.1), StaleSnapshot);
        p.record_snapshot({{0, 1}});
        CHECK_THROWS_AS(
            policy_gradient_step(p, {{1, 1}}, {1.0}, ClipConfig{}, 0.1), StaleSnapshot);
    }

    SUBCASE("on-policy single trajectory reduces to reinforce") {
        ToyPolicy p(3, 2);
        p.set_logit(0, 0, 0.4);
        p.set_logit(1, 2, -0.3);
        const std::vector<int> traj = {0, 2};
        p.record_snapshot({traj});

        const double advantage = 2.0;
        const double lr = 0.1;
        ClipConfig cfg;  // Grpo: token scale 1/(G*L) = 1/2
        const auto p_root = p.token_probs(p.state_index({}));
        const auto p_next = p.token_probs(p.state_index({0}));

        const ToyPolicy q = policy_gradient_step(p, {traj}, {advantage}, cfg, lr);
        for (int k = 0; k < 3; ++k) {
            const double g_root = 0.5 * advantage * ((k == 0 ? 1.0 : 0.0) - p_root[k]);
            const double g_next = 0.5 * advantage * ((k == 2 ? 1.0 : 0.0) - p_next[k]);
            CHECK(q.logit(0, k) ==
                  doctest::Approx(p.logit(0, k) + lr * g_root).epsilon(1e-14));
            CHECK(q.logit(p.state_index({0}), k) ==
                  doctest::Approx(p.logit(p.state_index({0}), k) + lr * g_next).epsilon(1e-14));
        }

        // DrGrpo drops the length normalization: twice the Grpo step here.
        p.record_snapshot({traj});
        ClipConfig dr;
        dr.mode = AdvantageMode::DrGrpo;
        const ToyPolicy q2 = policy_gradient_step(p, {traj}, {advantage}, dr, lr);
        for (int k = 0; k < 3; ++k) {
            const double moved = q.logit(0, k) - p.logit(0, k);
            CHECK(q2.logit(0, k) ==
                  doctest::Approx(p.logit(0, k) + 2.0 * moved).epsilon(1e-12));
        }
    }

    SUBCASE("fully clipped trajectory contributes nothing") {
        ToyPolicy p(3, 1);
        p.record_snapshot({{0}});
        // Push prob of token 0 far above the snapshot: ratio > 1.2, A > 0.
        p.add_logit(0, 0, 2.0);
        const ToyPolicy q = policy_gradient_step(p, {{0}}, {1.0}, ClipConfig{}, 0.5);
        for (int k = 0; k < 3; ++k) CHECK(q.logit(0, k) == p.logit(0, k));
    }

    SUBCASE("analytic gradient matches finite differences") {
        RandomStream rng(11);
        for (int rep = 0; rep < 5; ++rep) {
            ToyPolicy p(3, 2);
            for (std::size_t s = 0; s < p.state_count(); ++s) {
                for (int k = 0; k < 3; ++k) p.set_logit(s, k, rng.uniform(-0.7, 0.7));
            }
            RandomStream sampler(100 + rep);
            std::vector<std::vector<int>> batch;
            for (int i = 0; i < 4; ++i) batch.push_back(p.sample_trajectory(sampler));
            p.record_snapshot(batch);
            // Small off-policy drift keeps every ratio inside the clip band.
            for (std::size_t s = 0; s < p.state_count(); ++s) {
                for (int k = 0; k < 3; ++k) p.add_logit(s, k, rng.uniform(-0.02, 0.02));
            }
            const std::vector<double> adv = {1.5, -0.7, 0.3, -0.2};
            ClipConfig cfg;
            cfg.mode = (rep % 2 == 0) ? AdvantageMode::Grpo : AdvantageMode::DrGrpo;

            const ToyPolicy stepped = policy_gradient_step(p, batch, adv, cfg, 1.0);
            const double h = 1e-6;
            for (std::size_t s = 0; s < p.state_count(); ++s) {
                for (int k = 0; k < 3; ++k) {
                    ToyPolicy lo = p;
                    ToyPolicy hi = p;
                    lo.add_logit(s, k, -h);
                    hi.add_logit(s, k, h);
                    const double fd = (surrogate_value(hi, batch, adv, cfg) -
                                       surrogate_value(lo, batch, adv, cfg)) /
                                      (2.0 * h);
                    const double an = stepped.logit(s, k) - p.logit(s, k);
                    CHECK(an == doctest::Approx(fd).epsilon(5e-4));
                }
            }
        }
    }
}
