#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lapo/policy.hpp"
#include "lapo/types.hpp"

namespace lapo {

inline constexpr int kSchemaVersion = 1;

/// Where the problem bank comes from: a JSON file, or (empty path) the
/// built-in synthetic bank of `tiers` x `per_tier` problems.
struct BankSpec {
    std::string path;
    int tiers = 5;
    int per_tier = 40;

    friend bool operator==(const BankSpec&, const BankSpec&) = default;
};

/// Everything a run needs. Defaults reproduce the bundled configs/default.json.
struct RunConfig {
    int schema_version = kSchemaVersion;
    std::uint64_t seed = 7;
    std::string output_dir = "runs/default";
    BankSpec bank;
    StageConfig discovery = default_discovery();
    StageConfig internalization = default_internalization();
    RewardConfig reward;
    EnvModel env;
    PolicyInit policy;
    GuidanceMode guidance = GuidanceMode::Exact;
    TargetStatistic target_statistic = TargetStatistic::Median;
    int eval_samples = 32;

    static StageConfig default_discovery();
    static StageConfig default_internalization();

    /// Fills derived fields (stage seeds, env generation cap) and validates.
    /// Throws ConfigError.
    void resolve();

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Strict parse: unknown keys and type mismatches raise ValidationError with
/// the key path; missing keys keep their defaults. The result is resolved.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Hash of the resolved config echo minus output_dir; identifies a run in log
/// headers.
std::string config_hash(const RunConfig& cfg);

/// Dotted key paths whose values differ between two configs.
std::vector<std::string> config_diff(const RunConfig& a, const RunConfig& b);

std::vector<Problem> resolve_bank(const RunConfig& cfg);

}  // namespace lapo
