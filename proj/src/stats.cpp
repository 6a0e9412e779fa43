#include "lapo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lapo/errors.hpp"

namespace lapo {

double percentile(const CorrectLengthSample& sample, double p) {
    if (sample.empty()) throw EmptySample();
    if (!(p >= 0.0 && p <= 100.0)) throw ConfigError("percentile p must lie in [0, 100]");

    std::vector<Tokens> x = sample.lengths;
    std::sort(x.begin(), x.end());
    if (x.size() == 1) return static_cast<double>(x.front());

    const double h = static_cast<double>(x.size() - 1) * p / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    const double base = static_cast<double>(x[lo]);
    if (lo + 1 >= x.size()) return base;
    return base + frac * static_cast<double>(x[lo + 1] - x[lo]);
}

Tokens round_tokens(double value) {
    return static_cast<Tokens>(std::llround(value));
}

Tokens select_target(const CorrectLengthSample& sample, TargetStatistic stat) {
    if (sample.empty()) throw EmptySample();
    Tokens target = 1;
    switch (stat) {
        case TargetStatistic::Median:
            target = round_tokens(percentile(sample, 50.0));
            break;
        case TargetStatistic::Mean: {
            const double sum = std::accumulate(sample.lengths.begin(), sample.lengths.end(), 0.0);
            target = round_tokens(sum / static_cast<double>(sample.size()));
            break;
        }
        case TargetStatistic::Minimum:
            target = *std::min_element(sample.lengths.begin(), sample.lengths.end());
            break;
    }
    return std::max<Tokens>(1, target);
}

}  // namespace lapo
