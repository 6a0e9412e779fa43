#include "lapo/grpo.hpp"

#include <algorithm>
#include <cmath>

#include "lapo/errors.hpp"

namespace lapo {

AdvantageVector group_advantages(std::span<const double> rewards, double eps) {
    if (rewards.empty()) throw ConfigError("advantages need a non-empty reward list");
    AdvantageVector adv(rewards.size(), 0.0);
    const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
    if (*lo == *hi) return adv;

    const double n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    const double denom = std::sqrt(var / n) + eps;
    for (std::size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mean) / denom;
    return adv;
}

ProblemPolicy apply_update(const ProblemPolicy& policy, const RolloutGroup& group,
                           std::span<const double> advantages, double learning_rate, Stage stage) {
    if (advantages.size() != group.rollouts.size()) {
        throw ConfigError("advantages are not aligned with the rollout group");
    }
    if (group.rollouts.empty()) return policy;

    double g_mu = 0.0;
    double g_w = 0.0;
    for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
        const auto& r = group.rollouts[i];
        const auto g = log_density_gradient(policy, r.declared_budget, r.length);
        g_mu += advantages[i] * g.d_mu;
        g_w += advantages[i] * g.d_w;
    }
    const double n = static_cast<double>(group.rollouts.size());

    ProblemPolicy next = policy;
    next.mu += learning_rate * g_mu / n;
    if (stage == Stage::Internalization) {
        next.w = std::clamp(policy.w + learning_rate * g_w / n, 0.0, 1.0);
    }
    return next;
}

}  // namespace lapo
