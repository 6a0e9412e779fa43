#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lapo {

/// Token count. Lengths, budgets and map targets are all integral.
using Tokens = std::int64_t;

inline constexpr Tokens kDefaultMaxGenerationLength = 4096;

/// A synthetic task. `difficulty` plays the role of a MATH level (1..5).
struct Problem {
    std::string id;
    double difficulty = 1.0;
    std::string benchmark_tag;

    friend bool operator==(const Problem&, const Problem&) = default;
};

/// One sampled response. `declared_budget` is the budget the response was
/// conditioned on; it is absent for unconditioned rollouts.
struct Rollout {
    std::string problem_id;
    Tokens length = 1;
    bool correct = false;
    std::optional<Tokens> declared_budget;

    friend bool operator==(const Rollout&, const Rollout&) = default;
};

struct RolloutGroup {
    std::string problem_id;
    std::vector<Rollout> rollouts;

    friend bool operator==(const RolloutGroup&, const RolloutGroup&) = default;
};

/// Lengths of the correct rollouts in a group, kept as a multiset (duplicates
/// are retained; ordering is irrelevant to every statistic computed on it).
struct CorrectLengthSample {
    std::vector<Tokens> lengths;

    bool empty() const noexcept { return lengths.empty(); }
    std::size_t size() const noexcept { return lengths.size(); }

    static CorrectLengthSample from_group(const RolloutGroup& group);

    friend bool operator==(const CorrectLengthSample&, const CorrectLengthSample&) = default;
};

struct LengthRange {
    Tokens lo = 1;
    Tokens hi = 1;

    bool contains(Tokens length) const noexcept { return lo <= length && length <= hi; }

    friend bool operator==(const LengthRange&, const LengthRange&) = default;
};

/// sigma tracks the declared budget: sigma = max(1, round(ratio * n)).
struct SigmaProportional {
    double ratio = 0.1;
    friend bool operator==(const SigmaProportional&, const SigmaProportional&) = default;
};

struct SigmaFixed {
    Tokens tokens = 400;
    friend bool operator==(const SigmaFixed&, const SigmaFixed&) = default;
};

using SigmaMode = std::variant<SigmaProportional, SigmaFixed>;

struct RewardConfig {
    double alpha = 0.7;
    double beta = 0.8;
    SigmaMode sigma_mode = SigmaFixed{400};
    double distance_scale = 100.0;

    /// Resolves the adherence-reward width for budget `n`. Throws ConfigError
    /// when the result would not be strictly positive.
    double sigma_for(Tokens n) const;

    void validate() const;

    friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

/// Per-rollout reward decomposition. `total == correctness_term + c * length_term`
/// where c is alpha for Discovery-shaped rewards and beta otherwise.
struct RewardBreakdown {
    double correctness_term = 0.0;
    double length_term = 0.0;
    double total = 0.0;

    friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

enum class Stage { Discovery, Internalization };

enum class GuidanceMode { Exact, Range, Implicit };

enum class TargetStatistic { Median, Mean, Minimum };

std::string_view to_string(Stage stage);
std::string_view to_string(GuidanceMode mode);
std::string_view to_string(TargetStatistic stat);

/// Parse the lowercase names produced by to_string. Throw ConfigError otherwise.
Stage parse_stage(std::string_view name);
GuidanceMode parse_guidance_mode(std::string_view name);
TargetStatistic parse_target_statistic(std::string_view name);

struct StageConfig {
    int episodes = 3;
    int steps_per_episode = 80;
    int rollouts_per_problem = 8;
    int batch_size = 128;
    Tokens max_generation_length = kDefaultMaxGenerationLength;
    double learning_rate = 0.02;
    /// Derived from the run seed and the stage; not read from config files.
    std::uint64_t seed = 0;

    void validate(std::string_view key_path) const;

    friend bool operator==(const StageConfig&, const StageConfig&) = default;
};

}  // namespace lapo
