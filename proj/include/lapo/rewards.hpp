#pragma once

#include <optional>

#include "lapo/types.hpp"

namespace lapo {

/// [P30, P70] of the correct lengths, each rounded to the nearest token.
LengthRange compute_range(const CorrectLengthSample& sample);

/// Discovery length term: 1 inside the range, linear falloff
/// max(0, 1 - d / distance_scale) outside it, 0 for incorrect responses.
double discovery_length_reward(Tokens length, bool correct, const LengthRange& range,
                               double distance_scale);

RewardBreakdown discovery_total_reward(const Rollout& rollout, const LengthRange& range,
                                       const RewardConfig& cfg);

/// Gaussian adherence to the declared budget n; 0 for incorrect responses.
double adherence_reward(Tokens length, bool correct, Tokens n, double sigma);

/// Internalization reward. Requires rollout.declared_budget (BudgetMissing).
RewardBreakdown internalization_total_reward(const Rollout& rollout, const RewardConfig& cfg);

/// Reward for the guidance ablation arms.
///   Exact    -> internalization reward against `n` (BudgetMissing if absent)
///   Range    -> 1 inside `range`, Gaussian falloff from the nearest bound
///   Implicit -> Discovery reward against the current group's `range`
RewardBreakdown guidance_variant_reward(const Rollout& rollout, GuidanceMode mode,
                                        std::optional<Tokens> n,
                                        std::optional<LengthRange> range,
                                        const RewardConfig& cfg);

}  // namespace lapo
