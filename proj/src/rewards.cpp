#include "lapo/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "lapo/errors.hpp"
#include "lapo/stats.hpp"

namespace lapo {

namespace {

RewardBreakdown compose(bool correct, double coefficient, double length_term) {
    RewardBreakdown b;
    b.correctness_term = correct ? 1.0 : 0.0;
    b.length_term = correct ? length_term : 0.0;
    b.total = b.correctness_term + coefficient * b.length_term;
    return b;
}

void check_range(const LengthRange& range) {
    if (range.lo > range.hi) throw ConfigError("length range has lo > hi");
}

}  // namespace

LengthRange compute_range(const CorrectLengthSample& sample) {
    LengthRange r;
    r.lo = round_tokens(percentile(sample, 30.0));
    r.hi = round_tokens(percentile(sample, 70.0));
    return r;
}

double discovery_length_reward(Tokens length, bool correct, const LengthRange& range,
                               double distance_scale) {
    check_range(range);
    if (!correct) return 0.0;
    if (range.contains(length)) return 1.0;
    const auto d = std::min(std::llabs(length - range.lo), std::llabs(length - range.hi));
    return std::max(0.0, 1.0 - static_cast<double>(d) / distance_scale);
}

RewardBreakdown discovery_total_reward(const Rollout& rollout, const LengthRange& range,
                                       const RewardConfig& cfg) {
    const double term =
        discovery_length_reward(rollout.length, rollout.correct, range, cfg.distance_scale);
    return compose(rollout.correct, cfg.alpha, term);
}

double adherence_reward(Tokens length, bool correct, Tokens n, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("adherence sigma must be positive");
    if (!correct) return 0.0;
    const double diff = static_cast<double>(length - n);
    return std::exp(-(diff * diff) / (2.0 * sigma * sigma));
}

RewardBreakdown internalization_total_reward(const Rollout& rollout, const RewardConfig& cfg) {
    if (!rollout.declared_budget) throw BudgetMissing();
    const Tokens n = *rollout.declared_budget;
    const double term = adherence_reward(rollout.length, rollout.correct, n, cfg.sigma_for(n));
    return compose(rollout.correct, cfg.beta, term);
}

RewardBreakdown guidance_variant_reward(const Rollout& rollout, GuidanceMode mode,
                                        std::optional<Tokens> n,
                                        std::optional<LengthRange> range,
                                        const RewardConfig& cfg) {
    switch (mode) {
        case GuidanceMode::Exact: {
            if (!n) throw BudgetMissing();
            Rollout conditioned = rollout;
            conditioned.declared_budget = *n;
            return internalization_total_reward(conditioned, cfg);
        }
        case GuidanceMode::Range: {
            if (!range) throw ConfigError("range guidance requires a target range");
            check_range(*range);
            // Constructed variant: Discovery-style plateau, Gaussian shoulders.
            const Tokens anchor = n.value_or(round_tokens(0.5 * static_cast<double>(range->lo + range->hi)));
            double term = 1.0;
            if (!range->contains(rollout.length)) {
                const auto d = std::min(std::llabs(rollout.length - range->lo),
                                        std::llabs(rollout.length - range->hi));
                const double sigma = cfg.sigma_for(anchor);
                term = std::exp(-static_cast<double>(d * d) / (2.0 * sigma * sigma));
            }
            return compose(rollout.correct, cfg.beta, term);
        }
        case GuidanceMode::Implicit: {
            if (!range) throw ConfigError("implicit guidance requires the group's discovery range");
            return discovery_total_reward(rollout, *range, cfg);
        }
    }
    throw ConfigError("unknown guidance mode");
}

}  // namespace lapo
