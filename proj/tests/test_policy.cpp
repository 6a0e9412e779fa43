#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lapo/errors.hpp"
#include "lapo/io.hpp"
#include "lapo/policy.hpp"
#include "lapo/rng.hpp"

using namespace lapo;

namespace {

double median_of(std::vector<Tokens> v) {
    std::sort(v.begin(), v.end());
    return static_cast<double>(v[v.size() / 2]);
}

std::vector<Tokens> draws(const ProblemPolicy& p, std::optional<Tokens> budget, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Tokens> out;
    for (int i = 0; i < n; ++i) out.push_back(sample_length(p, budget, 4096, rng));
    return out;
}

}  // namespace

TEST(SampleLength, ZeroWeightIgnoresBudget) {
    ProblemPolicy p{std::log(1500.0), 0.25, 0.0};
    EXPECT_EQ(draws(p, 300, 500, 5), draws(p, std::nullopt, 500, 5));
}

TEST(SampleLength, FullWeightDegenerateSpreadHitsBudget) {
    ProblemPolicy p{std::log(2500.0), 1e-9, 1.0};
    for (auto len : draws(p, 1000, 50, 6)) EXPECT_EQ(len, 1000);
}

TEST(SampleLength, MedianMatchesLogNormal) {
    ProblemPolicy p{std::log(800.0), 0.25, 0.0};
    const double med = median_of(draws(p, std::nullopt, 100000, 7));
    EXPECT_NEAR(med, 800.0, 0.03 * 800.0);
}

TEST(SampleLength, ClampedToSupport) {
    ProblemPolicy p{std::log(4000.0), 1.5, 0.0};
    for (auto len : draws(p, std::nullopt, 5000, 8)) {
        EXPECT_GE(len, 1);
        EXPECT_LE(len, 4096);
    }
}

TEST(SampleLength, ConditioningPullsTowardShortBudget) {
    ProblemPolicy p{std::log(2000.0), 0.25, 0.3};
    const auto cond = draws(p, 500, 100000, 9);
    const auto free = draws(p, std::nullopt, 100000, 10);
    EXPECT_LT(median_of(cond), median_of(free));
    // Sign test on paired draws.
    int below = 0;
    for (std::size_t i = 0; i < cond.size(); ++i) below += cond[i] < free[i] ? 1 : 0;
    EXPECT_GT(below, 50000 + 3 * 158);  // > 3 sd above the null mean
}

TEST(EnvModel, ProbCorrectExamples) {
    const EnvModel env;
    EXPECT_NEAR(prob_correct(env, 1.0, 1e-12), 0.0, 1e-12);
    EXPECT_NEAR(prob_correct(env, 1.0, 300), 0.98 * (1.0 - std::exp(-1.0)), 1e-12);
    EXPECT_NEAR(prob_correct(env, 1.0, 300), 0.6195, 5e-5);
    EXPECT_NEAR(prob_correct(env, 5.0, 1e9), 0.50, 1e-12);
    EXPECT_DOUBLE_EQ(env.p_max(5.0), 0.50);
    EXPECT_DOUBLE_EQ(env.tau(3.0), 900.0);
}

TEST(EnvModel, Monotonicity) {
    const EnvModel env;
    for (double L = 1; L < 4096; L += 97) {
        EXPECT_LT(prob_correct(env, 3.0, L), prob_correct(env, 3.0, L + 50));
        for (double d = 1.0; d < 5.0; d += 0.5) EXPECT_GE(prob_correct(env, d, L), prob_correct(env, d + 0.5, L));
    }
}

TEST(EnvModel, DerailHazard) {
    EnvModel env;
    EXPECT_NEAR(prob_success(env, 2.0, 1500), prob_correct(env, 2.0, 1500) * std::exp(-0.5), 1e-12);
    env.derail_scale = 0.0;
    EXPECT_EQ(prob_success(env, 2.0, 1500), prob_correct(env, 2.0, 1500));
}

TEST(RolloutGroup, ShapeAndDeterminism) {
    const Problem prob{"q", 2.0, "t"};
    const ProblemPolicy p;
    const EnvModel env;
    Rng a(42), b(42);
    const auto g1 = rollout_group(p, env, prob, std::nullopt, 8, a);
    const auto g2 = rollout_group(p, env, prob, std::nullopt, 8, b);
    EXPECT_EQ(g1.rollouts.size(), 8u);
    for (const auto& r : g1.rollouts) EXPECT_EQ(r.problem_id, "q");
    EXPECT_EQ(g1, g2);

    EnvModel dead;
    dead.p_max_intercept = 0.0;
    dead.p_max_slope = 0.0;
    Rng c(1);
    for (const auto& r : rollout_group(p, dead, prob, std::nullopt, 64, c).rollouts) EXPECT_FALSE(r.correct);
}

TEST(LogDensity, ValueAtExpM) {
    const ProblemPolicy p{7.0, 0.3, 0.0};
    const double L = std::exp(7.0);
    const auto len = static_cast<Tokens>(std::llround(L));
    const double expected = -std::log(static_cast<double>(len) * 0.3 * std::sqrt(2.0 * std::numbers::pi)) -
                            0.5 * std::pow((std::log(static_cast<double>(len)) - 7.0) / 0.3, 2);
    EXPECT_NEAR(log_density_length(p, std::nullopt, len), expected, 1e-12);
}

TEST(LogDensity, JacobianIdentity) {
    // ld(e^{m+k}) = ld(e^{m-k}) - 2k, evaluated on the continuous density.
    const double m = 7.0, s = 0.3;
    auto ld = [&](double L) {
        return -std::log(L) - std::log(s * std::sqrt(2 * std::numbers::pi)) - 0.5 * std::pow((std::log(L) - m) / s, 2);
    };
    for (double k : {0.1, 0.25, 0.6}) EXPECT_NEAR(ld(std::exp(m + k)), ld(std::exp(m - k)) - 2 * k, 1e-12);
    // Library agrees with the closed form at integer lengths.
    const ProblemPolicy p{m, s, 0.0};
    for (Tokens L : {10, 500, 1097, 4000}) EXPECT_NEAR(log_density_length(p, std::nullopt, L), ld(static_cast<double>(L)), 1e-12);
}

TEST(LogDensity, GradientMatchesFiniteDifferences) {
    Rng rng(77);
    std::uniform_real_distribution<double> mu(5.0, 8.0), sg(0.1, 0.6), w(0.0, 1.0);
    std::uniform_int_distribution<Tokens> len(1, 4096);
    for (int t = 0; t < 100; ++t) {
        ProblemPolicy p{mu(rng), sg(rng), w(rng)};
        const std::optional<Tokens> budget = (t % 2) ? std::optional<Tokens>(len(rng)) : std::nullopt;
        const Tokens L = len(rng);
        const auto g = log_density_gradient(p, budget, L);
        const double h = 1e-5;
        auto at = [&](double dmu, double dw) {
            ProblemPolicy q = p;
            q.mu += dmu;
            q.w += dw;
            return log_density_length(q, budget, L);
        };
        const double fd_mu = (at(h, 0) - at(-h, 0)) / (2 * h);
        EXPECT_NEAR(g.d_mu, fd_mu, 1e-5 * std::max(1.0, std::abs(fd_mu)));
        if (budget) {
            const double fd_w = (at(0, h) - at(0, -h)) / (2 * h);
            EXPECT_NEAR(g.d_w, fd_w, 1e-5 * std::max(1.0, std::abs(fd_w)));
        } else {
            EXPECT_EQ(g.d_w, 0.0);
        }
    }
}

TEST(PolicyInit, RejectsMassAboveCap) {
    PolicyInit ok;
    EXPECT_NO_THROW(ok.validate(4096));
    EXPECT_LT(clamp_mass_above({std::log(ok.initial_length), ok.sigma_gen, 0.0}, 4096), 1e-3);
    PolicyInit bad;
    bad.initial_length = 3000;
    EXPECT_THROW(bad.validate(4096), ConfigError);
}

TEST(PolicyParams, JsonRoundTrip) {
    const auto bank = make_synthetic_bank(2, 3);
    auto params = make_initial_params(PolicyInit{}, bank);
    params.set("l1-000", {6.25, 0.3, 0.75});
    EXPECT_EQ(params.size(), 6u);
    EXPECT_EQ(policy_params_from_json_string(to_json_string(params)), params);
    EXPECT_THROW(policy_params_from_json_string(R"({"problems":{"q":{"mu":7,"sigma_gen":0,"w":0}}})"), ValidationError);
    EXPECT_THROW(policy_params_from_json_string(R"({"problems":{"q":{"mu":7,"sigma_gen":0.2,"w":1.5}}})"),
                 ValidationError);
    EXPECT_THROW(params.at("missing"), ConfigError);
}
