#pragma once

#include "lapo/types.hpp"

namespace lapo {

/// Linear-interpolation percentile on rank h = (n-1) * p / 100 over the
/// sorted sample. Throws EmptySample for an empty sample and ConfigError for
/// p outside [0, 100].
double percentile(const CorrectLengthSample& sample, double p);

/// Nearest-integer rounding with ties away from zero.
Tokens round_tokens(double value);

/// Map target for a sample: rounded median, rounded mean, or the minimum.
/// The result is always >= 1.
Tokens select_target(const CorrectLengthSample& sample, TargetStatistic stat);

}  // namespace lapo
