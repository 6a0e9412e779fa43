#include "lapo/types.hpp"

#include <cmath>

#include "lapo/errors.hpp"

namespace lapo {

CorrectLengthSample CorrectLengthSample::from_group(const RolloutGroup& group) {
    CorrectLengthSample sample;
    for (const auto& r : group.rollouts) {
        if (r.correct) sample.lengths.push_back(r.length);
    }
    return sample;
}

double RewardConfig::sigma_for(Tokens n) const {
    double sigma = std::visit(
        [n](const auto& mode) -> double {
            using T = std::decay_t<decltype(mode)>;
            if constexpr (std::is_same_v<T, SigmaProportional>) {
                return std::max(1.0, std::round(mode.ratio * static_cast<double>(n)));
            } else {
                return static_cast<double>(mode.tokens);
            }
        },
        sigma_mode);
    if (!(sigma > 0.0)) throw ConfigError("reward sigma must be positive");
    return sigma;
}

void RewardConfig::validate() const {
    if (!(alpha >= 0.0)) throw ConfigError("reward.alpha must be >= 0");
    if (!(beta >= 0.0)) throw ConfigError("reward.beta must be >= 0");
    if (!(distance_scale > 0.0)) throw ConfigError("reward.distance_scale must be > 0");
    if (const auto* p = std::get_if<SigmaProportional>(&sigma_mode); p && !(p->ratio > 0.0)) {
        throw ConfigError("reward.sigma_mode.ratio must be > 0");
    }
    if (const auto* f = std::get_if<SigmaFixed>(&sigma_mode); f && f->tokens < 1) {
        throw ConfigError("reward.sigma_mode.tokens must be >= 1");
    }
}

std::string_view to_string(Stage stage) {
    return stage == Stage::Discovery ? "discovery" : "internalization";
}

std::string_view to_string(GuidanceMode mode) {
    switch (mode) {
        case GuidanceMode::Exact: return "exact";
        case GuidanceMode::Range: return "range";
        case GuidanceMode::Implicit: return "implicit";
    }
    return "exact";
}

std::string_view to_string(TargetStatistic stat) {
    switch (stat) {
        case TargetStatistic::Median: return "median";
        case TargetStatistic::Mean: return "mean";
        case TargetStatistic::Minimum: return "minimum";
    }
    return "median";
}

Stage parse_stage(std::string_view name) {
    if (name == "discovery") return Stage::Discovery;
    if (name == "internalization") return Stage::Internalization;
    throw ConfigError("unknown stage '" + std::string(name) + "'");
}

GuidanceMode parse_guidance_mode(std::string_view name) {
    if (name == "exact") return GuidanceMode::Exact;
    if (name == "range") return GuidanceMode::Range;
    if (name == "implicit") return GuidanceMode::Implicit;
    throw ConfigError("unknown guidance mode '" + std::string(name) +
                      "' (expected exact, range or implicit)");
}

TargetStatistic parse_target_statistic(std::string_view name) {
    if (name == "median") return TargetStatistic::Median;
    if (name == "mean") return TargetStatistic::Mean;
    if (name == "minimum") return TargetStatistic::Minimum;
    throw ConfigError("unknown target statistic '" + std::string(name) +
                      "' (expected median, mean or minimum)");
}

void StageConfig::validate(std::string_view key_path) const {
    const std::string p(key_path);
    if (episodes < 0) throw ConfigError(p + ".episodes must be >= 0");
    if (steps_per_episode < 1) throw ConfigError(p + ".steps_per_episode must be >= 1");
    if (rollouts_per_problem < 1) throw ConfigError(p + ".rollouts_per_problem must be >= 1");
    if (batch_size < 1) throw ConfigError(p + ".batch_size must be >= 1");
    if (max_generation_length < 1) throw ConfigError(p + ".max_generation_length must be >= 1");
    if (!(learning_rate >= 0.0)) throw ConfigError(p + ".learning_rate must be >= 0");
}

}  // namespace lapo
