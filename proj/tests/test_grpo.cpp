#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lapo/errors.hpp"
#include "lapo/grpo.hpp"
#include "oracles.hpp"

using namespace lapo;

namespace {

double pop_std(const std::vector<double>& v) {
    const double m = oracle::mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

RolloutGroup group_of(std::vector<Tokens> lengths, std::optional<Tokens> budget = std::nullopt) {
    RolloutGroup g{"q", {}};
    for (auto L : lengths) g.rollouts.push_back({"q", L, true, budget});
    return g;
}

}  // namespace

TEST(GroupAdvantages, Examples) {
    EXPECT_EQ(group_advantages(std::vector<double>{1.7, 1.7, 1.7}), (AdvantageVector{0, 0, 0}));
    const auto a = group_advantages(std::vector<double>{2.0, 0.0});
    EXPECT_NEAR(a[0], 1.0, 1e-7);
    EXPECT_NEAR(a[1], -1.0, 1e-7);
    EXPECT_EQ(group_advantages(std::vector<double>{1.0}), (AdvantageVector{0.0}));
    EXPECT_THROW(group_advantages(std::vector<double>{}), ConfigError);
}

TEST(GroupAdvantages, NormalizationAndShiftInvariance) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> r(0.0, 1.8), shift(-50, 50);
    std::uniform_int_distribution<int> n(2, 16);
    for (int t = 0; t < 2000; ++t) {
        std::vector<double> rewards(static_cast<std::size_t>(n(rng)));
        for (auto& x : rewards) x = r(rng);
        const auto a = group_advantages(rewards);
        EXPECT_NEAR(oracle::mean(a), 0.0, 1e-9);
        const double s = pop_std(a);
        EXPECT_GE(s, 1.0 - 1e-3);
        EXPECT_LE(s, 1.0);

        const double c = shift(rng);
        auto moved = rewards;
        for (auto& x : moved) x += c;
        const auto b = group_advantages(moved);
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
    }
}

TEST(ApplyUpdate, ZeroAdvantagesOrRateLeaveParamsUnchanged) {
    const ProblemPolicy p{7.2, 0.25, 0.4};
    const auto g = group_of({800, 1500, 2500}, 1000);
    EXPECT_EQ(apply_update(p, g, std::vector<double>{0, 0, 0}, 0.05, Stage::Internalization), p);
    EXPECT_EQ(apply_update(p, g, std::vector<double>{1, -2, 1}, 0.0, Stage::Internalization), p);
    EXPECT_THROW(apply_update(p, g, std::vector<double>{1, 2}, 0.05, Stage::Discovery), ConfigError);
}

TEST(ApplyUpdate, DiscoveryMovesMuTowardRewardedLength) {
    const ProblemPolicy p{7.5, 0.25, 0.0};
    const auto g = group_of({1000});  // below exp(7.5) ~ 1808
    const auto next = apply_update(p, g, std::vector<double>{1.0}, 0.05, Stage::Discovery);
    EXPECT_LT(next.mu, p.mu);
    EXPECT_EQ(next.w, p.w);
    EXPECT_EQ(next.sigma_gen, p.sigma_gen);
}

TEST(ApplyUpdate, InternalizationClampsW) {
    const ProblemPolicy p{7.5, 0.25, 0.99};
    const auto g = group_of({600, 3000}, 600);
    const auto next = apply_update(p, g, std::vector<double>{1.0, -1.0}, 10.0, Stage::Internalization);
    EXPECT_EQ(next.w, 1.0);
    const ProblemPolicy q{7.5, 0.25, 0.01};
    const auto down = apply_update(q, g, std::vector<double>{-1.0, 1.0}, 10.0, Stage::Internalization);
    EXPECT_EQ(down.w, 0.0);
}

TEST(ApplyUpdate, MatchesFiniteDifferenceOfSurrogate) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> mu(5.5, 8.0), sg(0.15, 0.5), w(0.05, 0.95), adv(-2, 2);
    std::uniform_int_distribution<Tokens> len(1, 4096);
    for (int t = 0; t < 100; ++t) {
        const ProblemPolicy p{mu(rng), sg(rng), w(rng)};
        const Tokens budget = len(rng);
        RolloutGroup g{"q", {}};
        std::vector<double> a;
        for (int i = 0; i < 6; ++i) {
            g.rollouts.push_back({"q", len(rng), true, budget});
            a.push_back(adv(rng));
        }
        auto surrogate = [&](const ProblemPolicy& q) {
            double s = 0;
            for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * log_density_length(q, budget, g.rollouts[i].length);
            return s / static_cast<double>(a.size());
        };
        const double h = 1e-5, lr = 1e-3;
        ProblemPolicy up = p, dn = p;
        up.mu += h;
        dn.mu -= h;
        const double fd = (surrogate(up) - surrogate(dn)) / (2 * h);
        const auto next = apply_update(p, g, a, lr, Stage::Internalization);
        const double step = (next.mu - p.mu) / lr;
        EXPECT_NEAR(step, fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST(ApplyUpdate, RewardedAdherenceRaisesW) {
    // One problem, budget below the intrinsic length; reward closeness to n.
    ProblemPolicy p{std::log(2000.0), 0.25, 0.0};
    const Tokens n = 900;
    std::mt19937_64 rng(44);
    double prev_w = p.w;
    int increases = 0, decreases = 0;
    for (int step = 0; step < 200; ++step) {
        RolloutGroup g{"q", {}};
        std::vector<double> rewards;
        for (int i = 0; i < 8; ++i) {
            const Tokens L = sample_length(p, n, 4096, rng);
            g.rollouts.push_back({"q", L, true, n});
            rewards.push_back(1.0 + 0.8 * std::exp(-std::pow(static_cast<double>(L - n), 2) / (2 * 400.0 * 400.0)));
        }
        p = apply_update(p, g, group_advantages(rewards), 0.05, Stage::Internalization);
        if (p.w > prev_w) ++increases;
        if (p.w < prev_w) ++decreases;
        prev_w = p.w;
    }
    EXPECT_GT(p.w, 0.5);
    EXPECT_GT(increases, decreases);
}
