#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "lapo/errors.hpp"
#include "lapo/types.hpp"

namespace lapo {

// File helpers. Failures raise IoError naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Parses JSON, rejecting empty documents. Parse errors become ValidationError
/// with the parser's line/column message.
nlohmann::json parse_json_document(const std::string& text, std::string_view what);

inline std::string join_path(std::string_view parent, std::string_view key) {
    if (parent.empty()) return std::string(key);
    return std::string(parent) + "." + std::string(key);
}

/// Rejects any key of `object` not listed in `allowed`.
void require_known_keys(const nlohmann::json& object, std::initializer_list<std::string_view> allowed,
                        std::string_view path);

/// Typed field access with key-path diagnostics.
template <typename T>
T require_field(const nlohmann::json& object, std::string_view key, std::string_view path) {
    const std::string full = join_path(path, key);
    auto it = object.find(std::string(key));
    if (it == object.end()) throw ValidationError(full, "missing required field");
    const auto& v = *it;
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ValidationError(full, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ValidationError(full, "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_unsigned()) return static_cast<T>(v.template get<std::uint64_t>());
            if (v.template get<std::int64_t>() < 0) throw ValidationError(full, "expected a non-negative integer");
        }
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ValidationError(full, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ValidationError(full, "expected a string");
    }
    return v.template get<T>();
}

/// Reads `key` if present, otherwise returns `fallback`.
template <typename T>
T optional_field(const nlohmann::json& object, std::string_view key, std::string_view path, T fallback) {
    if (!object.contains(std::string(key))) return fallback;
    return require_field<T>(object, key, path);
}

// Problem banks: a JSON array of {id, difficulty, benchmark_tag}.
nlohmann::json to_json(const Problem& p);
std::vector<Problem> bank_from_json(const nlohmann::json& array);
std::string bank_to_json_string(const std::vector<Problem>& bank);
std::vector<Problem> load_bank(const std::filesystem::path& path);
void save_bank(const std::vector<Problem>& bank, const std::filesystem::path& path);

/// Ids unique, difficulty within [1, 5]. Throws ValidationError.
void validate_bank(const std::vector<Problem>& bank);

/// Synthetic bank: `tiers` difficulty levels with `per_tier` problems each,
/// ids `l<tier>-<index>`, tagged `level<tier>`.
std::vector<Problem> make_synthetic_bank(int tiers, int per_tier);

nlohmann::json to_json(const Rollout& r);
Rollout rollout_from_json(const nlohmann::json& j, std::string_view path);

/// Header line of a JSONL log.
struct RunHeader {
    std::string config_hash;
    std::uint64_t seed = 0;

    friend bool operator==(const RunHeader&, const RunHeader&) = default;
};

nlohmann::json to_json(const RunHeader& h);
RunHeader run_header_from_json(const nlohmann::json& j);

/// Rollout log: a header line followed by one Rollout per line.
struct RolloutLog {
    RunHeader header;
    std::vector<Rollout> rollouts;

    friend bool operator==(const RolloutLog&, const RolloutLog&) = default;
};

void write_rollout_log(std::ostream& out, const RolloutLog& log);
RolloutLog read_rollout_log(std::istream& in);

/// 16-hex-digit FNV-1a digest, used for config hashes.
std::string hex_digest(std::string_view text);

}  // namespace lapo
