#pragma once

#include <span>
#include <vector>

#include "lapo/policy.hpp"
#include "lapo/types.hpp"

namespace lapo {

using AdvantageVector = std::vector<double>;

/// Group-relative advantages A_i = (r_i - mean) / (std_pop + eps). Singleton
/// and constant-reward groups yield all zeros.
AdvantageVector group_advantages(std::span<const double> rewards, double eps = 1e-8);

/// One score-function step on a single problem's parameters:
///   theta += lr * mean_i(A_i * d/dtheta log p(length_i)).
/// Discovery moves mu only; Internalization moves mu and w (w clamped to
/// [0, 1]). sigma_gen is never updated.
ProblemPolicy apply_update(const ProblemPolicy& policy, const RolloutGroup& group,
                           std::span<const double> advantages, double learning_rate, Stage stage);

}  // namespace lapo
